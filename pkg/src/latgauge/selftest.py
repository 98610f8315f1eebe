# Location: src/latgauge/selftest.py
"""Acceptance suite behind `latgauge selftest`.

Each check returns (passed, detail). Randomized checks draw from one seeded
generator so a run is reproducible from its seed.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import replace
from pathlib import Path
from typing import Callable

import numpy as np
from pydantic import BaseModel

from latgauge import algebra
from latgauge.continuum import continuum_log_slope, d_log_check, g_scaling_check
from latgauge.dynamics import (
    PhaseSpaceState,
    SourceConfig,
    constraint_residual,
    mode_frequencies,
    shadow_energy,
    trajectory,
)
from latgauge.fme.entropy import four_phase_entropy
from latgauge.fme.protocol import (
    ProtocolSpec,
    dressed_move,
    embezzlement_null_test,
    entangling_energy,
    initial_branches,
    run_protocol,
    sweep_tau,
)
from latgauge.gaussian import coulomb_momentum, gauss_residual, ground_energy
from latgauge.lattice import (
    GridSpec,
    ScalarField,
    VectorField,
    dbar,
    product_rule_rhs,
    sum_by_parts_residual,
)
from latgauge.matter import density
from latgauge.spectral import (
    FourierField,
    derivative_symbol,
    dft_forward,
    dft_inverse,
    discrete_delta,
    load_kernels,
)

logger = logging.getLogger(__name__)

Check = Callable[[np.random.Generator, Path | None], tuple[bool, str]]


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str
    seconds: float


class SelftestReport(BaseModel):
    seed: int
    passed: bool
    checks: list[CheckResult]


def check_calculus(rng, cache_dir):
    worst = 0.0
    for n in (5, 8, 9):
        grid = GridSpec(n)
        for _ in range(100):
            f, g = ScalarField.random(grid, rng), ScalarField.random(grid, rng)
            scale = np.linalg.norm(f.values) * np.linalg.norm(g.values)
            schwarz = (dbar(dbar(f, "y"), "x") - dbar(dbar(f, "x"), "y")).sup_norm()
            product = max(
                (dbar(f * g, d) - product_rule_rhs(f, g, d)).sup_norm() for d in ("x", "y")
            )
            parts = max(abs(sum_by_parts_residual(f, g, d)) / scale for d in ("x", "y"))
            worst = max(worst, schwarz, product, parts)
    return worst < 1e-12, f"max residual {worst:.2e}"


def check_dft(rng, cache_dir):
    worst = 0.0
    for n in (4, 5, 16):
        grid = GridSpec(n)
        f, g = ScalarField.random(grid, rng), ScalarField.random(grid, rng)
        ft, gt = dft_forward(f), dft_forward(g)
        direct = dft_forward(f, method="direct")
        worst = max(worst, np.max(np.abs(direct.modes - ft.modes)) / ft.norm())
        worst = max(worst, (dft_inverse(ft) - f).sup_norm() / f.sup_norm())
        lhs = float(np.sum(f.values * g.values))
        rhs = float(np.sum(ft.modes * np.conj(gt.modes)).real) / n**2
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1.0))
        for d in ("x", "y"):
            diff = dft_forward(dbar(f, d)).modes - derivative_symbol(grid, d) * ft.modes
            worst = max(worst, np.max(np.abs(diff)) / ft.norm())
        for alpha in range(n):
            for gamma in range(n):
                worst = max(worst, abs(discrete_delta(n, alpha, gamma) - float(alpha == gamma)))
        back = dft_inverse(FourierField(grid, ft.modes), method="direct")
        worst = max(worst, (back - f).sup_norm() / f.sup_norm())
    return worst < 1e-10, f"max relative deviation {worst:.2e}"


def check_ground_energy(rng, cache_dir):
    expected = math.sqrt(3.0) * (1.0 + math.sqrt(2.0))
    e3 = ground_energy(GridSpec(3))
    ok = abs(e3 - expected) < 1e-9
    for n in range(3, 65):
        grid = GridSpec(n)
        ok &= ground_energy(grid) == 0.5 * float(mode_frequencies(grid).sum())
    return ok, f"E0(N=3) = {e3:.10f}"


def check_gauss_solver(rng, cache_dir):
    grid = GridSpec(31)
    kernels = load_kernels(grid, cache_dir)
    worst = 0.0
    for _ in range(20):
        rho = ScalarField(grid, rng.integers(-3, 4, size=grid.shape))
        p = coulomb_momentum(rho, kernels).momentum
        worst = max(worst, gauss_residual(p, rho).sup_norm())
    return worst < 1e-9, f"max Gauss residual {worst:.2e}"


def check_leapfrog(rng, cache_dir):
    grid = GridSpec(16)
    dt, steps = 0.05, 10_000
    source = SourceConfig.vacuum(grid)
    start = PhaseSpaceState(VectorField.random(grid, rng), VectorField.random(grid, rng))
    c0 = constraint_residual(start, source)
    s0 = shadow_energy(start, source, dt)
    growth, drift = 0.0, 0.0
    for state in trajectory(start, source, dt, steps):
        growth = max(growth, (constraint_residual(state, source) - c0).sup_norm())
    drift = abs(shadow_energy(state, source, dt) - s0) / abs(s0)
    return growth < 1e-9 and drift < 1e-6, f"constraint growth {growth:.2e}, drift {drift:.2e}"


def check_b_minimality(rng, cache_dir):
    grid = GridSpec(9)
    center = (4, 4)
    cross = algebra.gauge_invariant_nullspace(algebra.cross_support(center), grid)
    b = algebra.b_op(grid, center)
    ok = len(cross) == 1 and algebra.rank([cross[0], b]) == 1
    square = algebra.gauge_invariant_nullspace(algebra.Region((3, 3), 4), GridSpec(11))
    ok &= len(square) == 4
    return ok, f"cross dim {len(cross)}, 4x4 dim {len(square)}"


def check_center(rng, cache_dir):
    grid = GridSpec(11)
    region = algebra.Region((3, 3), 5)
    basis = algebra.center_basis(region, grid)
    gens = algebra.local_generators(region, grid)
    crosses = [algebra.constraint_op(grid, s) for s in region.interior_sites()]
    members = list(basis.generators)
    ok = len(basis) == 41
    ok &= all(algebra.in_span(c, members) for c in crosses)
    ok &= all(
        algebra.commutator_scalar(z, g) == 0 for z in basis.generators for g in gens.generators
    )
    return ok, f"center dimension {len(basis)}"


def _small_spec() -> ProtocolSpec:
    return ProtocolSpec.centered(GridSpec(31), (15, 8), (15, 22))


def check_dressing(rng, cache_dir):
    spec = _small_spec()
    kernels = load_kernels(spec.grid, cache_dir)
    worst = 0.0
    undressed_ok = True
    for branch in initial_branches(spec, kernels):
        for region in ("A", "B"):
            for move in ("left", "right"):
                moved = dressed_move(branch, spec, region, move)
                worst = max(worst, moved.gauss_violation())
                bare = dressed_move(branch, spec, region, move, dressed=False)
                residual = gauss_residual(bare.field.shift, density(bare.matter))
                hits = np.sort(np.abs(residual.values).ravel())[-3:]
                undressed_ok &= bool(np.allclose(hits, [0.0, 1.0, 1.0], atol=1e-9))
    return worst < 1e-9 and undressed_ok, f"dressed residual {worst:.2e}"


def check_null_test(rng, cache_dir):
    spec = _small_spec()
    kernels = load_kernels(spec.grid, cache_dir)
    null_ok = embezzlement_null_test(spec, kernels)
    entropy = run_protocol(spec, kernels).entropies["h_sigma_a"]
    return null_ok and entropy < 1e-12, f"null test {null_ok}, tau=0 entropy {entropy:.2e}"


def check_fme(rng, cache_dir):
    grid = GridSpec(101)
    kernels = load_kernels(grid, cache_dir)
    spec = ProtocolSpec.centered(grid, (50, 40), (50, 60))
    x = entangling_energy(kernels, spec.separation)
    tau_star = math.pi / abs(x)
    taus = np.linspace(0.0, 2.0 * tau_star, 41)
    frame = sweep_tau(spec, taus, kernels)
    model = [four_phase_entropy([0.0, 0.0, 0.0, t * x]) for t in frame["tau"]]
    pointwise = float(np.max(np.abs(frame["entropy"].to_numpy() - np.array(model))))
    peak = run_protocol(replace(spec, tau=tau_star), kernels)
    peak_gap = abs(peak.entropies["h_sigma_a"] - math.log(2.0))
    generic = run_protocol(replace(spec, tau=0.37 * tau_star), kernels)
    ok = pointwise < 1e-9 and peak_gap < 1e-6 and generic.entropies["h_sigma_a"] > 1e-3
    return ok, f"X = {x:.6g}, pointwise {pointwise:.1e}, ln2 gap {peak_gap:.1e}"


def check_continuum(rng, cache_dir):
    slopes = [d_log_check([201], r, 2 * r).values[-1] for r in (2, 4, 8)]
    target = continuum_log_slope((0, 8))
    agree = abs(slopes[0] - slopes[1]) / abs(slopes[1]) < 0.02
    near = abs(slopes[2] - target) < 5e-3
    g_series = g_scaling_check([51, 101, 201], 4)
    return agree and near and g_series.is_cauchy_like(), (
        f"log slopes {slopes[0]:.4f}, {slopes[1]:.4f}, {slopes[2]:.4f} vs {target:.4f}"
    )


CHECKS: list[tuple[str, Check]] = [
    ("discrete calculus", check_calculus),
    ("dft identities", check_dft),
    ("vacuum ground energy", check_ground_energy),
    ("gauss-law solver", check_gauss_solver),
    ("constraint conservation", check_leapfrog),
    ("b minimality", check_b_minimality),
    ("center structure", check_center),
    ("dressing repairs gauss law", check_dressing),
    ("embezzlement null test", check_null_test),
    ("fme entanglement", check_fme),
    ("continuum log law", check_continuum),
]


def run_selftest(
    seed: int, cache_dir: Path | None = None, only: list[str] | None = None
) -> SelftestReport:
    rng = np.random.default_rng(seed)
    results = []
    for name, check in CHECKS:
        if only and name not in only:
            continue
        started = time.perf_counter()
        try:
            passed, detail = check(rng, cache_dir)
        except Exception as exc:
            logger.error("Check %r raised", name, exc_info=True)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - started
        results.append(CheckResult(name=name, passed=bool(passed), detail=detail, seconds=elapsed))
        logger.info("%s: %s (%.2fs)", name, "PASS" if passed else "FAIL", elapsed)
    return SelftestReport(seed=seed, passed=all(r.passed for r in results), checks=results)


def format_table(report: SelftestReport) -> str:
    width = max(len(c.name) for c in report.checks) if report.checks else 10
    lines = [f"{'check':<{width}}  result  seconds  detail"]
    for c in report.checks:
        verdict = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.name:<{width}}  {verdict:<6}  {c.seconds:7.2f}  {c.detail}")
    return "\n".join(lines)
