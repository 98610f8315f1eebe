# Location: src/latgauge/continuum.py
"""Convergence series of lattice quantities toward their continuum forms.

The symmetric derivative has four soft points (the zone centre and the three
zone-edge corners), so G and D carry four long-range copies. At offset
(di, dj) they add with signs (-1)^(di c_i + dj c_j); all four agree at even
offsets and cancel at odd ones. The oracles below weight the single-copy
continuum coefficient 1/(2 pi) accordingly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import pandas as pd

from latgauge.lattice import GridSpec, Site
from latgauge.spectral import build_kernels, wave_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceSeries:
    n_values: tuple[int, ...]
    observable: str
    values: tuple[float, ...]
    estimate: float
    rate: float

    def __post_init__(self):
        if len(self.n_values) != len(self.values):
            raise ValueError("Series needs one value per grid size")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError(f"Grid sizes must increase, got {self.n_values}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError(f"Series {self.observable} holds non-finite values")

    @property
    def increments(self) -> list[float]:
        return [abs(b - a) for a, b in zip(self.values, self.values[1:])]

    def is_cauchy_like(self) -> bool:
        inc = self.increments
        return all(b < a for a, b in zip(inc, inc[1:]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "n": list(self.n_values),
                "observable": self.observable,
                "value": list(self.values),
                "estimate": self.estimate,
                "rate": self.rate,
            }
        )


def richardson(n_values: Sequence[int], values: Sequence[float]) -> tuple[float, float]:
    """Limit and observed order from the last three points.

    Falls back to (last value, nan) when the increments do not shrink.
    """
    if len(values) < 3:
        return float(values[-1]), float("nan")
    (n1, n2, n3), (v1, v2, v3) = n_values[-3:], values[-3:]
    d1, d2 = v2 - v1, v3 - v2
    if d2 == 0.0:
        return float(v3), float("inf")
    if d1 == 0.0 or abs(d2) >= abs(d1):
        return float(v3), float("nan")
    rate = math.log(abs(d1) / abs(d2)) / math.log(n3 / n2)
    return float(v3 + d2 / ((n3 / n2) ** rate - 1.0)), float(rate)


def _series(n_list: Sequence[int], observable: str, values: list[float]) -> ConvergenceSeries:
    estimate, rate = richardson(n_list, values)
    logger.info("%s: values=%s estimate=%.6g rate=%.3g", observable, values, estimate, rate)
    return ConvergenceSeries(tuple(n_list), observable, tuple(values), estimate, rate)


def doubler_weight(offset: Site) -> int:
    """Number of long-range kernel copies that survive at `offset` (0, 1, 2 or 4)."""
    di, dj = offset
    return (1 + (-1) ** (di % 2)) * (1 + (-1) ** (dj % 2))


def continuum_log_slope(offset: Site = (0, 2)) -> float:
    """Coefficient c in D(r) ~ -c ln r."""
    return doubler_weight(offset) / (2.0 * math.pi)


def continuum_inverse_distance(offset: Site) -> float:
    """Continuum G at `offset` (a = 1): weight / (2 pi r)."""
    return doubler_weight(offset) / (2.0 * math.pi * math.hypot(*offset))


def g_scaling_check(n_list: Sequence[int], r_over_a: int) -> ConvergenceSeries:
    """r G(0, r) at a = 1 for each N."""
    if r_over_a < 1:
        raise ValueError("r must be at least one lattice spacing")
    if 2 * r_over_a >= min(n_list):
        raise ValueError(f"r = {r_over_a} is not small against N = {min(n_list)}")
    values = [r_over_a * build_kernels(GridSpec(n)).g((0, r_over_a)) for n in n_list]
    return _series(n_list, f"r*G(r={r_over_a})", values)


def d_log_check(n_list: Sequence[int], r1: int, r2: int) -> ConvergenceSeries:
    """[D(0, r1) - D(0, r2)] / ln(r2 / r1) for each N."""
    if not 1 <= r1 < r2:
        raise ValueError(f"Need 1 <= r1 < r2, got r1={r1}, r2={r2}")
    if 2 * r2 >= min(n_list):
        raise ValueError(f"r2 = {r2} is not small against N = {min(n_list)}")
    values = []
    for n in n_list:
        table = build_kernels(GridSpec(n))
        values.append((table.d((0, r1)) - table.d((0, r2))) / math.log(r2 / r1))
    return _series(n_list, f"D-log({r1},{r2})", values)


def kvec_convergence(n_list: Sequence[int], mode_fraction: float) -> ConvergenceSeries:
    """Relative error |kbar - k| / |k| at a fixed physical wave number.

    The mode index is set on the coarsest grid (beta = round(fraction * N0)) and
    the box length L = N0 is held fixed, so a = N0 / N shrinks and the error
    falls as O(1/N^2).
    """
    if not 0.0 < mode_fraction < 0.25:
        raise ValueError(f"Mode fraction must lie in (0, 1/4), got {mode_fraction}")
    n0 = min(n_list)
    beta = max(1, round(mode_fraction * n0))
    length = float(n0)
    values = []
    for n in n_list:
        grid = GridSpec(n, length / n)
        kbar = wave_vector(grid, 0, beta).kx
        k = 2.0 * math.pi * beta / length
        values.append(abs(kbar - k) / k)
    return _series(n_list, f"kvec(beta={beta},L={n0})", values)


def series_frame(series: Sequence[ConvergenceSeries]) -> pd.DataFrame:
    return pd.concat([s.to_frame() for s in series], ignore_index=True)


def log_slope_oracle_gap(n: int, r1: int, r2: int) -> float:
    """Lattice log slope minus the continuum coefficient at a single N (even r only)."""
    if r1 % 2 or r2 % 2:
        raise ValueError("Odd offsets have no surviving long-range copies to compare")
    table = build_kernels(GridSpec(n))
    slope = (table.d((0, r1)) - table.d((0, r2))) / math.log(r2 / r1)
    return float(slope - continuum_log_slope((0, r1)))
