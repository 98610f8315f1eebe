# Location: src/latgauge/fme/protocol.py
"""Field-mediated entanglement run.

Two charges on row l, at columns a (region A) and b (region B), are each put in
a spin-controlled superposition of a two-site move left (spin up) or right
(spin down). Every move is dressed with a single-link momentum kick so the
field keeps satisfying Gauss's law. After relaxation each branch is a ground
state and picks up phi(s) = -(E_rho(s) - E_0) tau; merging then leaves the
matter and field in one product state and the phases in the spins.

Branches are always ordered LL, LR, RL, RR (spins uu, ud, du, dd).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Literal, Mapping

import numpy as np
import pandas as pd

from latgauge.algebra import Region
from latgauge.errors import NotSeparable
from latgauge.fme.entropy import (
    four_phase_entropy,
    product_plus_state,
    reduced_spin_a,
    vn_entropy,
)
from latgauge.gaussian import (
    GaussianFieldState,
    coulomb_energy_shift,
    displace,
    evolve_phase,
    gauss_residual,
    ground_state,
)
from latgauge.lattice import GridSpec, ScalarField, Site, VectorField
from latgauge.matter import MatterConfig, MatterSuperposition, apply_ladder, density
from latgauge.spectral import KernelTable, build_kernels

logger = logging.getLogger(__name__)

BRANCHES = ("LL", "LR", "RL", "RR")
SPIN_LABELS = {"LL": "uu", "LR": "ud", "RL": "du", "RR": "dd"}
SEPARABLE_TOL = 1e-9
NULL_TOL = 1e-12

RegionName = Literal["A", "B"]
Move = Literal["left", "right"]


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    grid: GridSpec
    site_a: Site
    site_b: Site
    region_a: Region
    region_b: Region
    displacement: int = 2
    tau: float = 0.0
    gamma: Mapping[str, float] = field(default_factory=dict)
    gamma_prime: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.displacement != 2:
            raise ValueError(f"Charges move by exactly two sites, got {self.displacement}")
        if self.site_a[0] != self.site_b[0]:
            raise ValueError("Both charges must sit on the same row")
        if self.tau < 0:
            raise ValueError(f"Evolution time must be non-negative, got {self.tau}")
        for name in ("gamma", "gamma_prime"):
            unknown = set(getattr(self, name)) - set(BRANCHES)
            if unknown:
                raise ValueError(f"{name} has unknown branches {sorted(unknown)}")
        for region in (self.region_a, self.region_b):
            region.check(self.grid)
        if not self.region_a.disjoint(self.region_b):
            raise ValueError("Regions A and B overlap")
        for site, region, name in (
            (self.site_a, self.region_a, "A"),
            (self.site_b, self.region_b, "B"),
        ):
            l, col = site
            for target in ((l, col - 2), (l, col), (l, col + 2)):
                if not region.is_interior(target):
                    raise ValueError(f"Site {target} is not strictly inside region {name}")

    @classmethod
    def centered(
        cls,
        grid: GridSpec,
        site_a: Site,
        site_b: Site,
        tau: float = 0.0,
        region_size: int = 7,
        **kwargs,
    ) -> "ProtocolSpec":
        """Protocol with square regions of side region_size centred on the two charges."""
        return cls(
            grid,
            site_a,
            site_b,
            Region.centered(site_a, region_size),
            Region.centered(site_b, region_size),
            tau=tau,
            **kwargs,
        )

    @property
    def separation(self) -> int:
        return abs(self.site_b[1] - self.site_a[1])

    def region(self, name: RegionName) -> Region:
        return self.region_a if name == "A" else self.region_b

    def initial_matter(self) -> MatterConfig:
        return MatterConfig.of(self.grid, self.site_a, self.site_b)


@dataclass(frozen=True, eq=False)
class BranchState:
    matter: MatterConfig
    field: GaussianFieldState
    spin_label: str
    amplitude: complex = 0.5

    @property
    def branch(self) -> str:
        return {v: k for k, v in SPIN_LABELS.items()}[self.spin_label]

    def gauss_violation(self) -> float:
        return gauss_residual(self.field.shift, density(self.matter)).sup_norm()


@dataclass(frozen=True, eq=False)
class ProtocolTrace:
    spec: ProtocolSpec
    states_by_step: Mapping[int, tuple[BranchState, ...]]
    phi: Mapping[str, float]
    final_spin: np.ndarray
    entropies: Mapping[str, float]

    def thetas(self) -> np.ndarray:
        return np.angle(self.final_spin)


def _moving_charge(matter: MatterConfig, region: Region) -> Site:
    inside = [s for s in matter.sites if region.contains(s)]
    if len(inside) != 1:
        raise ValueError(f"Expected one charge in {region}, found {len(inside)}")
    return inside[0]


def dressing_shift(grid: GridSpec, source: Site, direction: Move) -> VectorField:
    """Momentum kick that accompanies a two-site hop starting at `source`.

    p_x on the link between the two sites changes by +2a for a right move and
    -2a for a left move; this keeps div p + rho unchanged at both ends.
    """
    sign = 1 if direction == "right" else -1
    link = grid.wrap((source[0], source[1] + sign))
    kick = ScalarField.zeros(grid).with_value(link, sign * 2.0 * grid.spacing)
    return VectorField(kick, ScalarField.zeros(grid))


def dressed_move(
    branch: BranchState,
    spec: ProtocolSpec,
    region: RegionName,
    direction: Move,
    dressed: bool = True,
) -> BranchState:
    """Move the charge of `region` two sites and, unless disabled, dress the field."""
    if direction not in ("left", "right"):
        raise ValueError(f"Direction must be 'left' or 'right', got {direction!r}")
    source = _moving_charge(branch.matter, spec.region(region))
    step = spec.displacement if direction == "right" else -spec.displacement
    target = (source[0], source[1] + step)

    moved = apply_ladder(MatterSuperposition.single(branch.matter), target, source, strict=True)
    (matter,) = moved.branches
    field_state = branch.field
    if dressed:
        field_state = displace(field_state, dressing_shift(spec.grid, source, direction))
    return replace(branch, matter=matter, field=field_state)


def _split_moves(branch_name: str) -> tuple[Move, Move]:
    return tuple("left" if c == "L" else "right" for c in branch_name)


def _opposite(move: Move) -> Move:
    return "right" if move == "left" else "left"


def _apply_moves(
    branch: BranchState, spec: ProtocolSpec, moves: Mapping[str, Move], dressed: bool
) -> BranchState:
    for region, move in moves.items():
        branch = dressed_move(branch, spec, region, move, dressed=dressed)
    return branch


def initial_branches(spec: ProtocolSpec, kernels: KernelTable) -> tuple[BranchState, ...]:
    s0 = spec.initial_matter()
    field0 = ground_state(density(s0), kernels)
    return tuple(BranchState(s0, field0, SPIN_LABELS[name]) for name in BRANCHES)


def split(
    branches, spec: ProtocolSpec, regions=("A", "B"), dressed: bool = True
) -> tuple[BranchState, ...]:
    """Spin-controlled moves: spin up moves left, spin down moves right."""
    out = []
    for branch in branches:
        moves = dict(zip(("A", "B"), _split_moves(branch.branch)))
        out.append(_apply_moves(branch, spec, {r: moves[r] for r in regions}, dressed))
    return tuple(out)


def merge(
    branches, spec: ProtocolSpec, regions=("A", "B"), dressed: bool = True
) -> tuple[BranchState, ...]:
    """Spin-controlled moves undoing `split`."""
    out = []
    for branch in branches:
        moves = dict(zip(("A", "B"), (_opposite(m) for m in _split_moves(branch.branch))))
        out.append(_apply_moves(branch, spec, {r: moves[r] for r in regions}, dressed))
    return tuple(out)


def branch_energies(spec: ProtocolSpec, kernels: KernelTable) -> dict[str, float]:
    """E_rho(s) - E_0 for each split configuration."""
    branches = split(initial_branches(spec, kernels), spec)
    return {
        b.branch: coulomb_energy_shift(density(b.matter), kernels) for b in branches
    }


def entangling_energy(kernels: KernelTable, separation: int, row_offset: int = 0) -> float:
    """2 D(d) - D(d + 4) - D(d - 4) for charges on one row."""
    d = separation
    return (
        2.0 * kernels.d((row_offset, d))
        - kernels.d((row_offset, d + 4))
        - kernels.d((row_offset, d - 4))
    )


def _check_norm(branches) -> None:
    norm = sum(abs(b.amplitude) ** 2 for b in branches)
    if abs(norm - 1.0) > 1e-12:
        raise ArithmeticError(f"Branch amplitudes lost normalization: {norm!r}")


def _check_merged(branches, s0: MatterConfig) -> None:
    """Every merged branch must hold s0 and a field in the s0 Gauss-law sector."""
    rho = density(s0)
    for b in branches:
        if b.matter != s0:
            raise NotSeparable(f"Branch {b.branch} ends with charges at {b.matter.sorted_sites()}")
        violation = gauss_residual(b.field.shift, rho).sup_norm()
        if violation > SEPARABLE_TOL:
            raise NotSeparable(
                f"Branch {b.branch} breaks the starting Gauss law by {violation:.3e} after merging"
            )


def run_protocol(spec: ProtocolSpec, kernels: KernelTable | None = None) -> ProtocolTrace:
    """Steps 0-5 of the entangling run.

    Separability is decided on the merged (step 4) branches: all must share the
    starting matter and a field in its Gauss-law sector. Step 5 then relaxes each
    field to the s0 ground state, leaving only the branch phases.
    """
    kernels = kernels or build_kernels(spec.grid)
    s0 = spec.initial_matter()
    steps: dict[int, tuple[BranchState, ...]] = {}

    steps[0] = initial_branches(spec, kernels)
    steps[1] = split(steps[0], spec)

    relaxed = []
    for b in steps[1]:
        phase = b.field.phase + spec.gamma.get(b.branch, 0.0)
        relaxed.append(replace(b, field=ground_state(density(b.matter), kernels, phase)))
    steps[2] = tuple(relaxed)

    phi: dict[str, float] = {}
    evolved = []
    for b in steps[2]:
        e_shift = coulomb_energy_shift(density(b.matter), kernels)
        phi[b.branch] = -e_shift * spec.tau
        evolved.append(replace(b, field=evolve_phase(b.field, e_shift, spec.tau)))
    steps[3] = tuple(evolved)

    steps[4] = merge(steps[3], spec)
    _check_merged(steps[4], s0)

    final = []
    for b in steps[4]:
        phase = b.field.phase + spec.gamma_prime.get(b.branch, 0.0)
        final.append(replace(b, field=ground_state(density(s0), kernels, phase)))
    steps[5] = tuple(final)

    for step, branches in steps.items():
        _check_norm(branches)
        logger.debug("Step %d phases %s", step, [round(b.field.phase, 12) for b in branches])

    final_spin = np.array([b.amplitude * b.field.phase_factor for b in steps[5]])
    h_sigma_a = vn_entropy(reduced_spin_a(final_spin))
    logger.info("Protocol tau=%g separation=%d entropy=%.12g", spec.tau, spec.separation, h_sigma_a)
    return ProtocolTrace(
        spec=spec,
        states_by_step=steps,
        phi=phi,
        final_spin=final_spin,
        entropies={"h_sigma_a": h_sigma_a, "ent_increase": h_sigma_a},
    )


def entanglement_increase(trace: ProtocolTrace) -> float:
    """Entropy of the reduced spin-A state; equals the L/R entanglement gain of the run."""
    return vn_entropy(reduced_spin_a(trace.final_spin))


def closed_form_entropy(trace: ProtocolTrace) -> float:
    return four_phase_entropy(trace.thetas())


def embezzlement_null_test(
    spec: ProtocolSpec, kernels: KernelTable | None = None, regions=("A", "B")
) -> bool:
    """Split then merge with nothing in between; True iff the initial state comes back."""
    kernels = kernels or build_kernels(spec.grid)
    start = initial_branches(spec, kernels)
    end = merge(split(start, spec, regions), spec, regions)

    for before, after in zip(start, end):
        if before.matter != after.matter:
            return False
        if not after.field.same_field(before.field, NULL_TOL):
            return False
        if abs(after.field.phase - before.field.phase) > NULL_TOL:
            return False
    spins = np.array([b.amplitude * b.field.phase_factor for b in end])
    return bool(np.allclose(spins, product_plus_state(), rtol=0.0, atol=NULL_TOL))


def sweep_tau(spec: ProtocolSpec, taus, kernels: KernelTable | None = None) -> pd.DataFrame:
    """One protocol run per tau; columns tau, phi_LL, phi_LR, phi_RL, phi_RR, entropy."""
    kernels = kernels or build_kernels(spec.grid)
    rows = []
    for tau in taus:
        trace = run_protocol(replace(spec, tau=float(tau)), kernels)
        rows.append(
            {
                "tau": float(tau),
                **{f"phi_{name}": trace.phi[name] for name in BRANCHES},
                "entropy": trace.entropies["h_sigma_a"],
            }
        )
    return pd.DataFrame(rows, columns=["tau", *(f"phi_{n}" for n in BRANCHES), "entropy"])
