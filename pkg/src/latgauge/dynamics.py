# Location: src/latgauge/dynamics.py
"""Temporal-gauge Hamiltonian dynamics: energy, equations of motion, the sourced
Gauss constraint, leapfrog stepping and gauge transformations.

Units follow m = 1, kappa a^2 = 1; q0 and p0 are never represented.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from latgauge.errors import UnstableStep
from latgauge.lattice import GridSpec, ScalarField, VectorField, curl_z, dbar, divergence
from latgauge.spectral import k_norm, wave_vector

logger = logging.getLogger(__name__)

DRIFT_LIMIT = 0.01


@dataclass(frozen=True, eq=False)
class PhaseSpaceState:
    q: VectorField
    p: VectorField
    time: float = 0.0

    def __post_init__(self):
        if self.q.grid != self.p.grid:
            raise ValueError("q and p must live on the same grid")

    @property
    def grid(self) -> GridSpec:
        return self.q.grid

    @classmethod
    def zeros(cls, grid: GridSpec) -> "PhaseSpaceState":
        return cls(VectorField.zeros(grid), VectorField.zeros(grid))


@dataclass(frozen=True, eq=False)
class SourceConfig:
    rho: ScalarField
    jx: ScalarField
    jy: ScalarField

    def __post_init__(self):
        if not (self.rho.grid == self.jx.grid == self.jy.grid):
            raise ValueError("Source components must share one grid")

    @classmethod
    def static(cls, rho: ScalarField) -> "SourceConfig":
        zero = ScalarField.zeros(rho.grid)
        return cls(rho, zero, zero)

    @classmethod
    def vacuum(cls, grid: GridSpec) -> "SourceConfig":
        return cls.static(ScalarField.zeros(grid))

    @property
    def current(self) -> VectorField:
        return VectorField(self.jx, self.jy)

    @property
    def is_static(self) -> bool:
        return not (np.any(self.jx.values) or np.any(self.jy.values))

    def continuity_residual(self, rho_dot: ScalarField | None = None) -> ScalarField:
        """dbar_x(Jx) + dbar_y(Jy) + d(rho)/dt; reported, never assumed zero."""
        residual = divergence(self.current)
        return residual if rho_dot is None else residual + rho_dot


def energy(state: PhaseSpaceState, source: SourceConfig) -> float:
    """H = 1/2 sum [p_x^2 + p_y^2 + b^2 - J.q]."""
    b = curl_z(state.q)
    quad = state.p.dot(state.p) + float(np.sum(b.values**2))
    return 0.5 * (quad - source.current.dot(state.q))


def conserved_energy(state: PhaseSpaceState, source: SourceConfig) -> float:
    """1/2 sum (p^2 + b^2) - sum J.q, the energy the equations of motion conserve.

    Equal to `energy` when J = 0.
    """
    b = curl_z(state.q)
    quad = state.p.dot(state.p) + float(np.sum(b.values**2))
    return 0.5 * quad - source.current.dot(state.q)


def force(q: VectorField, source: SourceConfig) -> VectorField:
    b = curl_z(q)
    return VectorField(-dbar(b, "y") + source.jx, dbar(b, "x") + source.jy)


def eom_rhs(state: PhaseSpaceState, source: SourceConfig) -> tuple[VectorField, VectorField]:
    """(dq/dt, dp/dt) with dq = p, dp_x = -dbar_y b + J_x, dp_y = dbar_x b + J_y."""
    return state.p, force(state.q, source)


def shadow_energy(state: PhaseSpaceState, source: SourceConfig, dt: float) -> float:
    """Quadratic invariant of the kick-drift-kick map, conserved to rounding.

    H - (dt^2 / 8) |F(q)|^2; differs from the energy by O(dt^2).
    """
    f = force(state.q, source)
    return conserved_energy(state, source) - dt * dt / 8.0 * f.dot(f)


def constraint_residual(state_or_p, source: SourceConfig) -> ScalarField:
    """C_rho = div p + rho; accepts a PhaseSpaceState or a bare momentum field."""
    p = state_or_p.p if isinstance(state_or_p, PhaseSpaceState) else state_or_p
    return divergence(p) + source.rho


def gauge_transform(state: PhaseSpaceState, epsilon: ScalarField) -> PhaseSpaceState:
    """q_s -> q_s - dbar_s(epsilon); p untouched."""
    q = VectorField(state.q.x - dbar(epsilon, "x"), state.q.y - dbar(epsilon, "y"))
    return replace(state, q=q)


def default_dt(grid: GridSpec) -> float:
    return 0.1 * grid.spacing / np.sqrt(2.0)


def mode_frequencies(grid: GridSpec) -> np.ndarray:
    """Angular frequency |k| of every mode [alpha, beta]."""
    return k_norm(grid)


def transverse_mode_state(
    grid: GridSpec, alpha: int, beta: int, amplitude: float = 1.0
) -> PhaseSpaceState:
    """Single-mode standing wave q = A e cos(2 pi (i alpha + j beta) / N), p = 0.

    e = (-k_y, k_x) / |k| is the transverse polarization, an eigenvector of the
    force with eigenvalue -|k|^2.
    """
    k = wave_vector(grid, alpha, beta)
    if k.norm == 0.0:
        raise ValueError(f"Mode ({alpha}, {beta}) has |k| = 0 and no oscillation")
    i, j = np.indices(grid.shape)
    wave = amplitude * np.cos(2.0 * np.pi * (i * alpha + j * beta) / grid.n)
    q = VectorField.from_arrays(grid, -k.ky / k.norm * wave, k.kx / k.norm * wave)
    return PhaseSpaceState(q, VectorField.zeros(grid))


def _kdk(state: PhaseSpaceState, source: SourceConfig, dt: float) -> PhaseSpaceState:
    half = state.p + force(state.q, source) * (0.5 * dt)
    q = state.q + half * dt
    p = half + force(q, source) * (0.5 * dt)
    return PhaseSpaceState(q, p, state.time + dt)


def _energy_scale(state: PhaseSpaceState, source: SourceConfig) -> float:
    b = curl_z(state.q)
    quad = 0.5 * (state.p.dot(state.p) + float(np.sum(b.values**2)))
    return quad + abs(source.current.dot(state.q))


def trajectory(
    state: PhaseSpaceState, source: SourceConfig, dt: float, n_steps: int
) -> Iterator[PhaseSpaceState]:
    """Yield the initial state and each of the n_steps leapfrog updates."""
    if dt <= 0:
        raise ValueError(f"Time step must be positive, got {dt}")
    if n_steps < 0:
        raise ValueError(f"Step count must be non-negative, got {n_steps}")

    e0 = conserved_energy(state, source)
    scale = _energy_scale(state, source)
    yield state
    for step in range(n_steps):
        state = _kdk(state, source, dt)
        drift = abs(conserved_energy(state, source) - e0)
        if scale > 0.0 and drift > DRIFT_LIMIT * scale:
            raise UnstableStep(
                f"Energy drifted by {drift:.3e} (initial {e0:.3e}) at step {step + 1}; "
                f"dt={dt} is too large for |k|max = {np.sqrt(2.0) / state.grid.spacing:.3f}"
            )
        yield state


def step_leapfrog(
    state: PhaseSpaceState, source: SourceConfig, dt: float, n_steps: int
) -> PhaseSpaceState:
    """Advance by n_steps kick-drift-kick steps of size dt (static sources)."""
    final = state
    for final in trajectory(state, source, dt, n_steps):
        pass
    logger.debug("Leapfrog finished at t=%g after %d steps", final.time, n_steps)
    return final
