# Location: src/latgauge/helpers.py
"""Parsers for the compact literals used on the command line."""

import numpy as np

from latgauge.lattice import Site


def _int_pair(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise ValueError(f"Expected 'i,j', got {text!r}")
    return int(parts[0]), int(parts[1])


def parse_sites(text: str) -> list[Site]:
    """'50,40;50,60' -> [(50, 40), (50, 60)]."""
    items = [chunk for chunk in text.split(";") if chunk.strip()]
    if not items:
        raise ValueError("Expected at least one 'i,j' site")
    return [_int_pair(chunk) for chunk in items]


def parse_site_pair(text: str) -> tuple[Site, Site]:
    """'50,40:50,60' -> ((50, 40), (50, 60))."""
    halves = text.split(":")
    if len(halves) != 2:
        raise ValueError(f"Expected 'i,j:i,j', got {text!r}")
    return _int_pair(halves[0]), _int_pair(halves[1])


def parse_int_pairs(text: str) -> list[tuple[int, int]]:
    """'1,2;2,4' -> [(1, 2), (2, 4)]."""
    return parse_sites(text)


def parse_int_list(text: str) -> list[int]:
    values = [int(chunk) for chunk in text.split(",") if chunk.strip()]
    if not values:
        raise ValueError(f"Expected a comma-separated integer list, got {text!r}")
    return values


def parse_range(text: str) -> np.ndarray:
    """'start:stop:step' -> inclusive grid of floats, e.g. '0:10:0.1' has 101 points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"Expected 'start:stop:step', got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"Range {text!r} needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def parse_region(text: str) -> tuple[int, int, int]:
    """'2,2,5' -> origin (2, 2), size 5."""
    parts = [int(chunk) for chunk in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"Expected 'i,j,M', got {text!r}")
    return parts[0], parts[1], parts[2]


def wrap_phase(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    return float(x - 2.0 * np.pi * np.ceil((x - np.pi) / (2.0 * np.pi)))
