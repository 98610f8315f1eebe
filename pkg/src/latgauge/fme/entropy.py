# Location: src/latgauge/fme/entropy.py
import numpy as np

from latgauge.errors import NotDensityMatrix

DENSITY_TOL = 1e-10
EIGEN_FLOOR = 1e-15


def vn_entropy(density_matrix) -> float:
    """-Tr(rho ln rho) in nats for a 2x2 or 4x4 density matrix."""
    rho = np.asarray(density_matrix, dtype=np.complex128)
    if rho.shape not in ((2, 2), (4, 4)):
        raise NotDensityMatrix(f"Expected a 2x2 or 4x4 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > DENSITY_TOL:
        raise NotDensityMatrix("Matrix is not Hermitian")
    trace = np.trace(rho)
    if abs(trace - 1.0) > DENSITY_TOL:
        raise NotDensityMatrix(f"Trace is {trace.real:.12g}, expected 1")
    eigenvalues = np.linalg.eigvalsh(rho)
    if eigenvalues.min() < -DENSITY_TOL:
        raise NotDensityMatrix(f"Negative eigenvalue {eigenvalues.min():.3e}")
    live = eigenvalues[eigenvalues > EIGEN_FLOOR]
    return float(-np.sum(live * np.log(live)))


def reduced_spin_a(amplitudes) -> np.ndarray:
    """Partial trace over spin B of a two-qubit state ordered (uu, ud, du, dd)."""
    c = np.asarray(amplitudes, dtype=np.complex128).reshape(2, 2)
    return c @ c.conj().T


def product_plus_state() -> np.ndarray:
    """|+>|+> in the (uu, ud, du, dd) basis."""
    return np.full(4, 0.5, dtype=np.complex128)


def phase_imbalance(thetas) -> float:
    """theta_LL + theta_RR - theta_LR - theta_RL for phases ordered (LL, LR, RL, RR)."""
    t = np.asarray(thetas, dtype=np.float64)
    return float(t[0] + t[3] - t[1] - t[2])


def four_phase_entropy(thetas) -> float:
    """Closed form for 1/2 sum_s e^{i theta_s} |s>: eigenvalues (1 +- |cos(imbalance/2)|)/2."""
    c = abs(np.cos(0.5 * phase_imbalance(thetas)))
    out = 0.0
    for lam in (0.5 * (1.0 + c), 0.5 * (1.0 - c)):
        if lam > EIGEN_FLOOR:
            out -= lam * np.log(lam)
    return float(out)
