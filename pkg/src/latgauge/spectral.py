# Location: src/latgauge/spectral.py
"""DFT with C = 1 forward and 1/N^2 inverse, discrete wave vectors, and the
real-space kernels G (1/|k|) and D (1/|k|^2) with zero modes excluded.

Mode arrays are indexed [alpha, beta]: alpha pairs with the row index i (y),
beta with the column index j (x).
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Literal

import numpy as np

from latgauge.errors import KernelCacheError, KernelConsistencyError, NonRealResult
from latgauge.lattice import Direction, GridSpec, ScalarField, Site
from latgauge.storage import kernel_cache_path, read_kernel_cache, write_kernel_cache

logger = logging.getLogger(__name__)

Method = Literal["fft", "direct"]

IMAG_TOL = 1e-10
SYMMETRY_TOL = 1e-10
SYMBOL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FourierField:
    grid: GridSpec
    modes: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.modes, dtype=np.complex128, copy=True)
        if arr.shape != self.grid.shape:
            raise ValueError(f"Mode array must have shape {self.grid.shape}, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "modes", arr)

    def norm(self) -> float:
        return float(np.linalg.norm(self.modes))

    def is_conjugate_symmetric(self, rtol: float = SYMMETRY_TOL) -> bool:
        mirrored = self.modes[np.ix_(_negated(self.grid.n), _negated(self.grid.n))]
        scale = max(self.norm(), 1.0)
        return bool(np.max(np.abs(mirrored - np.conj(self.modes))) <= rtol * scale)


@dataclass(frozen=True)
class WaveVector:
    kx: float
    ky: float

    @property
    def norm(self) -> float:
        return float(np.hypot(self.kx, self.ky))


def _negated(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


def _sines(grid: GridSpec) -> np.ndarray:
    """sin(2 pi m / N) / a for m = 0..N-1, exactly zero where 2m is a multiple of N."""
    m = np.arange(grid.n)
    values = np.sin(2.0 * np.pi * m / grid.n) / grid.spacing
    values[(2 * m) % grid.n == 0] = 0.0
    return values


def wave_vector(grid: GridSpec, alpha: int, beta: int) -> WaveVector:
    if not (0 <= alpha < grid.n and 0 <= beta < grid.n):
        raise ValueError(f"Mode ({alpha}, {beta}) is outside 0..{grid.n - 1}")
    s = _sines(grid)
    return WaveVector(kx=float(s[beta]), ky=float(s[alpha]))


def wave_vectors(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """(kx, ky) tables indexed [alpha, beta]."""
    s = _sines(grid)
    kx = np.broadcast_to(s[np.newaxis, :], grid.shape).copy()
    ky = np.broadcast_to(s[:, np.newaxis], grid.shape).copy()
    return kx, ky


def k_norm(grid: GridSpec) -> np.ndarray:
    kx, ky = wave_vectors(grid)
    return np.hypot(kx, ky)


def zero_mode_mask(grid: GridSpec) -> np.ndarray:
    """True on every mode with |k| = 0: (0,0) for odd N, {0, N/2}^2 for even N."""
    return k_norm(grid) == 0.0


def _phase_matrix(n: int, sign: float) -> np.ndarray:
    m = np.arange(n)
    return np.exp(sign * 2j * np.pi * np.outer(m, m) / n)


def dft_forward(f: ScalarField, method: Method = "fft") -> FourierField:
    """f~[alpha, beta] = sum_ij f[i, j] exp(-2 pi i (i alpha + j beta) / N)."""
    if method == "fft":
        modes = np.fft.fft2(f.values)
    elif method == "direct":
        e = _phase_matrix(f.grid.n, -1.0)
        modes = e @ f.values @ e.T
    else:
        raise ValueError(f"Unknown DFT method {method!r}")
    return FourierField(f.grid, modes)


def dft_inverse_complex(modes: FourierField, method: Method = "fft") -> np.ndarray:
    n = modes.grid.n
    if method == "fft":
        return np.fft.ifft2(modes.modes)
    if method == "direct":
        e = _phase_matrix(n, 1.0)
        return (e @ modes.modes @ e.T) / (n * n)
    raise ValueError(f"Unknown DFT method {method!r}")


def dft_inverse(modes: FourierField, method: Method = "fft") -> ScalarField:
    """Inverse transform with 1/N^2; refuses a result with a real imaginary part."""
    values = dft_inverse_complex(modes, method)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    bound = IMAG_TOL * modes.norm()
    if residue > bound:
        raise NonRealResult(
            f"Inverse DFT imaginary residue {residue:.3e} exceeds {bound:.3e}; "
            "the modes are not conjugate-symmetric"
        )
    return ScalarField(modes.grid, values.real)


def discrete_delta(n: int, alpha: int, gamma: int) -> complex:
    """(1/N) sum_j exp(2 pi i (gamma - alpha) j / N), the Kronecker delta mod N."""
    j = np.arange(n)
    return complex(np.exp(2j * np.pi * (gamma - alpha) * j / n).sum() / n)


def derivative_symbol(grid: GridSpec, direction: Direction) -> np.ndarray:
    """Multiplier i*k_s that dbar_s becomes in mode space."""
    kx, ky = wave_vectors(grid)
    return 1j * (kx if direction == "x" else ky)


def zero_mode_projection(f: ScalarField) -> ScalarField:
    """Part of f carried by the |k| = 0 modes (its mean for odd N)."""
    modes = dft_forward(f).modes * zero_mode_mask(f.grid)
    return ScalarField(f.grid, np.fft.ifft2(modes).real)


# ---------- kernels ----------


@dataclass(frozen=True, eq=False)
class KernelTable:
    grid: GridSpec
    g_values: np.ndarray = field(repr=False)
    d_values: np.ndarray = field(repr=False)
    zero_mode_policy: str = "exclude"

    def __post_init__(self):
        for name in ("g_values", "d_values"):
            arr = np.array(getattr(self, name), dtype=np.float64, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def g(self, offset: Site) -> float:
        return float(self.g_values[offset[0] % self.grid.n, offset[1] % self.grid.n])

    def d(self, offset: Site) -> float:
        return float(self.d_values[offset[0] % self.grid.n, offset[1] % self.grid.n])


def _weights(grid: GridSpec, power: int) -> np.ndarray:
    k = k_norm(grid)
    w = np.zeros(grid.shape)
    live = k > 0.0
    w[live] = 1.0 / k[live] ** power
    return w


def _kernel_fft(w: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    return np.fft.fft2(w) / (n * n)


def _kernel_direct(w: np.ndarray, workers: int | None = None) -> np.ndarray:
    n = w.shape[0]
    e = _phase_matrix(n, -1.0)
    left = e @ w

    def row(di: int) -> np.ndarray:
        return left[di] @ e.T

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, range(n)))
    return np.array(rows) / (n * n)


def _checked_real(name: str, grid: GridSpec, table: np.ndarray) -> np.ndarray:
    scale = max(float(np.max(np.abs(table.real))), 1.0)
    imag = float(np.max(np.abs(table.imag)))
    if imag > IMAG_TOL * scale:
        raise KernelConsistencyError(f"Kernel {name} on N={grid.n} has imaginary part {imag:.3e}")
    real = table.real
    neg = _negated(grid.n)
    asym = float(np.max(np.abs(real - real[np.ix_(neg, neg)])))
    if asym > SYMMETRY_TOL * scale:
        raise KernelConsistencyError(f"Kernel {name} on N={grid.n} is not even (off by {asym:.3e})")
    return real


def _check_symbol(name: str, grid: GridSpec, table: np.ndarray, power: int) -> None:
    """fft2 of a kernel table must give back 1/|k|^power on live modes and 0 on zero modes."""
    w = _weights(grid, power)
    err = float(np.max(np.abs(np.fft.fft2(table) - w)))
    if err > SYMBOL_TOL * max(float(np.max(w)), 1.0):
        raise KernelConsistencyError(f"Kernel {name} on N={grid.n} misses its symbol by {err:.3e}")


def _validated_cache(grid: GridSpec, g_values: np.ndarray, d_values: np.ndarray) -> KernelTable:
    try:
        g = _checked_real("G", grid, g_values)
        d = _checked_real("D", grid, d_values)
        _check_symbol("G", grid, g, 1)
        _check_symbol("D", grid, d, 2)
    except KernelConsistencyError as exc:
        raise KernelCacheError(f"Cached kernels fail validation: {exc}") from exc
    return KernelTable(grid, g, d)


@lru_cache(maxsize=16)
def build_kernels(grid: GridSpec, method: Method = "fft") -> KernelTable:
    """G and D for `grid`, excluding every |k| = 0 mode. Memoized per (grid, method)."""
    excluded = int(zero_mode_mask(grid).sum())
    expected = 1 if grid.n % 2 else 4
    if excluded != expected:
        raise KernelConsistencyError(
            f"N={grid.n}: found {excluded} zero modes, expected {expected}"
        )

    if method == "fft":
        g_raw, d_raw = _kernel_fft(_weights(grid, 1)), _kernel_fft(_weights(grid, 2))
    elif method == "direct":
        g_raw, d_raw = _kernel_direct(_weights(grid, 1)), _kernel_direct(_weights(grid, 2))
    else:
        raise ValueError(f"Unknown kernel method {method!r}")

    logger.info("Built kernels for N=%d a=%g (%s path)", grid.n, grid.spacing, method)
    return KernelTable(grid, _checked_real("G", grid, g_raw), _checked_real("D", grid, d_raw))


def load_kernels(grid: GridSpec, cache_dir: Path | None = None) -> KernelTable:
    """Kernel table from the on-disk cache, rebuilding (and rewriting) when absent or unreadable."""
    if cache_dir is None:
        return build_kernels(grid)

    path = kernel_cache_path(cache_dir, grid)
    if path.exists():
        try:
            table = _validated_cache(grid, *read_kernel_cache(path, grid))
            logger.info("Kernel cache hit: %s", path)
            return table
        except KernelCacheError as exc:
            logger.warning("Discarding kernel cache: %s", exc)

    table = build_kernels(grid)
    try:
        write_kernel_cache(path, grid, table.g_values, table.d_values)
        logger.info("Kernel cache written: %s", path)
    except OSError:
        logger.error("Could not write kernel cache %s", path, exc_info=True)
    return table
