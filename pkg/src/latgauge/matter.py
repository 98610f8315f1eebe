# Location: src/latgauge/matter.py
"""Qubit-per-site matter: occupation configurations, superpositions over them
and the hopping (create/annihilate) ladder."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from types import MappingProxyType
from typing import Mapping

import numpy as np

from latgauge.errors import AnnihilatedState
from latgauge.lattice import GridSpec, ScalarField, Site

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12


@dataclass(frozen=True)
class MatterConfig:
    grid: GridSpec
    sites: frozenset[Site] = frozenset()

    def __post_init__(self):
        wrapped = frozenset(self.grid.wrap(s) for s in self.sites)
        object.__setattr__(self, "sites", wrapped)

    @classmethod
    def empty(cls, grid: GridSpec) -> "MatterConfig":
        return cls(grid)

    @classmethod
    def of(cls, grid: GridSpec, *sites: Site) -> "MatterConfig":
        config = cls(grid, frozenset(sites))
        if len(config.sites) != len(sites):
            raise ValueError(f"Duplicate occupied sites in {sites}")
        return config

    @property
    def total_charge(self) -> int:
        return len(self.sites)

    @property
    def occupations(self) -> np.ndarray:
        bits = np.zeros(self.grid.shape, dtype=bool)
        for i, j in self.sites:
            bits[i, j] = True
        return bits

    def is_occupied(self, site: Site) -> bool:
        return self.grid.wrap(site) in self.sites

    def sorted_sites(self) -> list[Site]:
        return sorted(self.sites)

    def moved(self, source: Site, target: Site) -> "MatterConfig":
        """Config with the charge at `source` moved to the empty site `target`."""
        source, target = self.grid.wrap(source), self.grid.wrap(target)
        if source not in self.sites or target in self.sites:
            raise AnnihilatedState(f"Cannot move a charge from {source} to {target}")
        return MatterConfig(self.grid, (self.sites - {source}) | {target})


def density(config: MatterConfig) -> ScalarField:
    """rho with 1 at occupied sites, 0 elsewhere."""
    return ScalarField(config.grid, config.occupations.astype(np.float64))


@dataclass(frozen=True, eq=False)
class MatterSuperposition:
    branches: Mapping[MatterConfig, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {cfg: complex(amp) for cfg, amp in self.branches.items()}
        if not cleaned:
            raise ValueError("A matter superposition needs at least one branch")
        charges = {cfg.total_charge for cfg in cleaned}
        if len(charges) != 1:
            raise ValueError(f"Branches mix total charges {sorted(charges)}")
        norm = sum(abs(a) ** 2 for a in cleaned.values())
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"Branch amplitudes have squared norm {norm!r}, expected 1")
        object.__setattr__(self, "branches", MappingProxyType(cleaned))

    @classmethod
    def single(cls, config: MatterConfig) -> "MatterSuperposition":
        return cls({config: 1.0})

    @property
    def total_charge(self) -> int:
        return next(iter(self.branches)).total_charge

    def amplitude(self, config: MatterConfig) -> complex:
        return self.branches.get(config, 0j)


def apply_ladder(
    state: MatterSuperposition, create_at: Site, annihilate_at: Site, strict: bool = False
) -> MatterSuperposition:
    """Apply a^dagger(create_at) a(annihilate_at) branch-wise.

    Branches where the move is impossible are dropped. In strict mode any drop is
    an error; otherwise the survivors are renormalized.
    """
    grid = next(iter(state.branches)).grid
    create_at, annihilate_at = grid.wrap(create_at), grid.wrap(annihilate_at)
    if create_at == annihilate_at:
        raise ValueError(f"Ladder move needs distinct sites, got {create_at} twice")

    survivors: dict[MatterConfig, complex] = {}
    for config, amp in state.branches.items():
        if config.is_occupied(annihilate_at) and not config.is_occupied(create_at):
            survivors[config.moved(annihilate_at, create_at)] = amp

    if not survivors:
        raise AnnihilatedState(f"Moving {annihilate_at} -> {create_at} annihilates every branch")
    dropped = len(state.branches) - len(survivors)
    if dropped:
        if strict:
            raise AnnihilatedState(
                f"Moving {annihilate_at} -> {create_at} drops {dropped} branches"
            )
        logger.debug("Ladder move dropped %d branches; renormalizing", dropped)
        norm = np.sqrt(sum(abs(a) ** 2 for a in survivors.values()))
        survivors = {cfg: amp / norm for cfg, amp in survivors.items()}
    return MatterSuperposition(survivors)


def _region_sites(region) -> set[Site]:
    return set(region.sites())


def enumerate_sector(grid: GridSpec, n: int, region_filter=None) -> list[MatterConfig]:
    """All configs with n charges in row-major combination order.

    With a (region_a, region_b) filter, exactly one charge sits in each region and
    the rest lie outside both.
    """
    if not 0 <= n <= grid.n_sites:
        raise ValueError(f"Charge count {n} outside 0..{grid.n_sites}")
    all_sites = list(grid.sites())
    if region_filter is None:
        return [MatterConfig(grid, frozenset(c)) for c in combinations(all_sites, n)]

    region_a, region_b = region_filter
    in_a = sorted(_region_sites(region_a))
    in_b = sorted(_region_sites(region_b))
    if set(in_a) & set(in_b):
        raise ValueError("Filter regions overlap")
    if n < 2:
        return []
    outside = [s for s in all_sites if s not in set(in_a) | set(in_b)]
    configs = [
        MatterConfig(grid, frozenset((sa, sb, *rest)))
        for sa, sb in product(in_a, in_b)
        for rest in combinations(outside, n - 2)
    ]
    return sorted(configs, key=MatterConfig.sorted_sites)
