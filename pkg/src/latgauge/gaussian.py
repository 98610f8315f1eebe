# Location: src/latgauge/gaussian.py
"""Gaussian ground states of the field, with and without static sources.

A state is a fixed vacuum Gaussian (through its kernel table), displaced in
momentum by a classical background, times a global phase. hbar = 1.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from latgauge.errors import NonNeutralWarning
from latgauge.helpers import wrap_phase
from latgauge.lattice import GridSpec, ScalarField, VectorField, divergence
from latgauge.spectral import (
    FourierField,
    KernelTable,
    dft_forward,
    dft_inverse,
    k_norm,
    wave_vectors,
    zero_mode_mask,
    zero_mode_projection,
)

logger = logging.getLogger(__name__)

CONSTRAINT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GaussianFieldState:
    kernel: KernelTable = field(repr=False)
    shift: VectorField = field(repr=False)
    phase: float = 0.0
    norm_const_log: float = 0.0

    def __post_init__(self):
        if self.shift.grid != self.kernel.grid:
            raise ValueError("Momentum shift and kernel table live on different grids")
        object.__setattr__(self, "phase", wrap_phase(self.phase))

    @property
    def grid(self) -> GridSpec:
        return self.kernel.grid

    @property
    def phase_factor(self) -> complex:
        return complex(np.exp(1j * self.phase))

    def same_field(self, other: "GaussianFieldState", atol: float = 0.0) -> bool:
        """Equal kernels and shifts; the phase is not compared."""
        return self.kernel.grid == other.kernel.grid and self.shift.equals(other.shift, atol)


@dataclass(frozen=True)
class EnergyReport:
    e0: float
    e_shift: float

    @property
    def total(self) -> float:
        return self.e0 + self.e_shift


@dataclass(frozen=True, eq=False)
class CoulombSolution:
    momentum: VectorField
    non_neutral: bool


def ground_energy(grid: GridSpec) -> float:
    """E0 = 1/2 sum over all modes of |k|; zero modes add nothing."""
    return 0.5 * float(k_norm(grid).sum())


def _live_inverse_square(grid: GridSpec) -> np.ndarray:
    k = k_norm(grid)
    out = np.zeros(grid.shape)
    live = ~zero_mode_mask(grid)
    out[live] = 1.0 / k[live] ** 2
    return out


def _is_neutral(rho: ScalarField) -> bool:
    residue = zero_mode_projection(rho).sup_norm()
    return residue <= 1e-12 * max(rho.sup_norm(), 1.0)


def coulomb_momentum(
    rho: ScalarField, kernels: KernelTable, warn: bool = False
) -> CoulombSolution:
    """p_rho with div p_rho = -(rho minus its zero-mode part).

    Solved in mode space as i k_s rho~ / |k|^2 with the |k| = 0 modes dropped.
    """
    if rho.grid != kernels.grid:
        raise ValueError("Charge field and kernel table live on different grids")
    grid = rho.grid
    rho_modes = dft_forward(rho).modes * _live_inverse_square(grid)
    kx, ky = wave_vectors(grid)
    px = dft_inverse(FourierField(grid, 1j * kx * rho_modes))
    py = dft_inverse(FourierField(grid, 1j * ky * rho_modes))

    non_neutral = not _is_neutral(rho)
    if non_neutral:
        logger.debug("Charge field has total %.6g; zero modes dropped", rho.total())
        if warn:
            warnings.warn(
                "Non-neutral charge: p_rho solves Gauss's law only up to the zero modes",
                NonNeutralWarning,
                stacklevel=2,
            )
    return CoulombSolution(VectorField(px, py), non_neutral)


def coulomb_energy_shift(
    rho: ScalarField, kernels: KernelTable, method: str = "spectral"
) -> float:
    """E_rho - E0 = 1/2 sum_x sum_y D(x - y) rho(x) rho(y).

    "spectral" evaluates (1 / 2N^2) sum' |rho~|^2 / |k|^2; "direct" sums the
    kernel table over charged sites.
    """
    if rho.grid != kernels.grid:
        raise ValueError("Charge field and kernel table live on different grids")
    if method == "spectral":
        n = rho.grid.n
        power = np.abs(dft_forward(rho).modes) ** 2
        return 0.5 * float(np.sum(power * _live_inverse_square(rho.grid))) / (n * n)
    if method == "direct":
        return 0.5 * float(np.sum(rho.values * convolve_kernel(kernels.d_values, rho)))
    raise ValueError(f"Unknown evaluation method {method!r}")


def convolve_kernel(table: np.ndarray, f: ScalarField) -> np.ndarray:
    """(K * f)[x] = sum_y K(x - y) f(y), summing only over sites where f is nonzero."""
    out = np.zeros(f.grid.shape)
    for n, m in zip(*np.nonzero(f.values)):
        out += f.values[n, m] * np.roll(table, shift=(n, m), axis=(0, 1))
    return out


def transverse_quadratic_form(
    v: VectorField, kernels: KernelTable, method: str = "spectral"
) -> float:
    """sum_s sum_x sum_y G(x - y) v_s(x) v_s(y)."""
    if method == "direct":
        return float(
            sum(np.sum(c.values * convolve_kernel(kernels.g_values, c)) for c in (v.x, v.y))
        )
    if method != "spectral":
        raise ValueError(f"Unknown evaluation method {method!r}")
    grid = v.grid
    k = k_norm(grid)
    weight = np.zeros(grid.shape)
    live = ~zero_mode_mask(grid)
    weight[live] = 1.0 / k[live]
    total = sum(float(np.sum(weight * np.abs(dft_forward(c).modes) ** 2)) for c in (v.x, v.y))
    return total / (grid.n * grid.n)


def energy_report(rho: ScalarField, kernels: KernelTable) -> EnergyReport:
    return EnergyReport(e0=ground_energy(rho.grid), e_shift=coulomb_energy_shift(rho, kernels))


def vacuum_state(kernels: KernelTable, phase: float = 0.0) -> GaussianFieldState:
    return GaussianFieldState(kernels, VectorField.zeros(kernels.grid), phase)


def ground_state(rho: ScalarField, kernels: KernelTable, phase: float = 0.0) -> GaussianFieldState:
    """Ground state of the sector with static charge rho: vacuum shifted by p_rho."""
    return GaussianFieldState(kernels, coulomb_momentum(rho, kernels).momentum, phase)


def gauss_residual(p: VectorField, rho: ScalarField) -> ScalarField:
    """div p + rho with rho's zero-mode part removed."""
    return divergence(p) + (rho - zero_mode_projection(rho))


def log_amplitude_p(
    state: GaussianFieldState, p_sample: VectorField, rho: ScalarField, tol: float = CONSTRAINT_TOL
) -> tuple[float, bool]:
    """log|Psi[p]| without the delta factor, plus whether p satisfies Gauss's law.

    The delta(C_rho) factor is reported as the boolean; the modulus is
    norm_const_log - 1/2 sum G (p - p_rho)(p - p_rho).
    """
    if p_sample.grid != state.grid:
        raise ValueError("Momentum sample and state live on different grids")
    on_constraint = gauss_residual(p_sample, rho).sup_norm() < tol
    delta = p_sample - state.shift
    log_modulus = state.norm_const_log - 0.5 * transverse_quadratic_form(delta, state.kernel)
    return log_modulus, bool(on_constraint)


def evolve_phase(state: GaussianFieldState, energy: float, tau: float) -> GaussianFieldState:
    """Energy eigenstate evolution: phase <- wrap(phase - energy * tau)."""
    return replace(state, phase=state.phase - energy * tau)


def displace(state: GaussianFieldState, delta_p: VectorField) -> GaussianFieldState:
    """Momentum translation: shift <- shift + delta_p."""
    return replace(state, shift=state.shift + delta_p)
