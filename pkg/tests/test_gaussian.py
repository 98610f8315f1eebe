import math

import numpy as np
import pytest

from latgauge.errors import NonNeutralWarning
from latgauge.gaussian import (
    EnergyReport,
    GaussianFieldState,
    coulomb_energy_shift,
    coulomb_momentum,
    displace,
    energy_report,
    evolve_phase,
    gauss_residual,
    ground_energy,
    ground_state,
    log_amplitude_p,
    transverse_quadratic_form,
    vacuum_state,
)
from latgauge.lattice import GridSpec, ScalarField, VectorField, dbar
from latgauge.spectral import build_kernels


def _pair(grid, plus, minus):
    return ScalarField.zeros(grid).with_value(plus, 1.0).with_value(minus, -1.0)


def test_ground_energy_closed_form():
    expected = math.sqrt(3.0) * (1.0 + math.sqrt(2.0))
    assert ground_energy(GridSpec(3)) == pytest.approx(expected, abs=1e-9)
    assert ground_energy(GridSpec(3)) == pytest.approx(4.18154055, abs=1e-7)


def test_ground_energy_scales_inversely_with_spacing():
    assert ground_energy(GridSpec(12, 2.0)) == pytest.approx(ground_energy(GridSpec(12)) / 2.0)


def test_energy_report_total():
    grid = GridSpec(15)
    report = energy_report(_pair(grid, (7, 3), (7, 11)), build_kernels(grid))
    assert isinstance(report, EnergyReport)
    assert report.total == report.e0 + report.e_shift
    assert report.e_shift > 0.0


def test_zero_charge_has_no_shift():
    grid = GridSpec(7)
    assert coulomb_energy_shift(ScalarField.zeros(grid), build_kernels(grid)) == 0.0


def test_shift_paths_agree(rng):
    grid = GridSpec(15)
    kernels = build_kernels(grid)
    rho = ScalarField(grid, rng.integers(-2, 3, size=grid.shape))
    spectral = coulomb_energy_shift(rho, kernels)
    direct = coulomb_energy_shift(rho, kernels, method="direct")
    assert direct == pytest.approx(spectral, rel=1e-9)


def test_pair_shift_differences_follow_d(kernels31, grid31):
    near = coulomb_energy_shift(_pair(grid31, (15, 5), (15, 15)), kernels31)
    far = coulomb_energy_shift(_pair(grid31, (15, 5), (15, 21)), kernels31)
    assert near == pytest.approx(kernels31.d((0, 0)) - kernels31.d((0, 10)), abs=1e-10)
    assert far - near == pytest.approx(kernels31.d((0, 10)) - kernels31.d((0, 16)), abs=1e-10)


def test_shift_is_translation_invariant(rng, kernels31, grid31):
    rho = ScalarField(grid31, rng.integers(-1, 2, size=grid31.shape))
    rolled = ScalarField(grid31, np.roll(rho.values, (4, -9), axis=(0, 1)))
    assert coulomb_energy_shift(rolled, kernels31) == pytest.approx(
        coulomb_energy_shift(rho, kernels31), rel=1e-10
    )


def test_shift_grows_with_even_separation():
    grid = GridSpec(51)
    kernels = build_kernels(grid)
    shifts = [coulomb_energy_shift(_pair(grid, (25, 10), (25, 10 + d)), kernels)
              for d in range(2, 14, 2)]
    assert all(b > a for a, b in zip(shifts, shifts[1:]))


def test_classical_field_carries_the_shift(kernels31, grid31):
    rho = _pair(grid31, (10, 10), (20, 18))
    p = coulomb_momentum(rho, kernels31).momentum
    assert 0.5 * p.dot(p) == pytest.approx(coulomb_energy_shift(rho, kernels31), rel=1e-9)


def test_coulomb_momentum_of_zero_charge(kernels31, grid31):
    solution = coulomb_momentum(ScalarField.zeros(grid31), kernels31)
    assert solution.momentum.sup_norm() == 0.0
    assert not solution.non_neutral


def test_coulomb_momentum_solves_gauss_law(rng, kernels31, grid31):
    for _ in range(5):
        rho = ScalarField(grid31, rng.integers(-3, 4, size=grid31.shape))
        p = coulomb_momentum(rho, kernels31).momentum
        assert gauss_residual(p, rho).sup_norm() < 1e-9


def test_non_neutral_charge_is_flagged(kernels31, grid31):
    single = ScalarField.zeros(grid31).with_value((3, 3), 1.0)
    assert coulomb_momentum(single, kernels31).non_neutral
    assert not coulomb_momentum(_pair(grid31, (3, 3), (9, 9)), kernels31).non_neutral
    with pytest.warns(NonNeutralWarning):
        coulomb_momentum(single, kernels31, warn=True)


def test_point_charge_field_is_odd(kernels101, grid101):
    rho = ScalarField.zeros(grid101).with_value((0, 0), 1.0)
    p = coulomb_momentum(rho, kernels101).momentum
    neg = (-np.arange(101)) % 101
    for c in (p.x, p.y):
        assert np.max(np.abs(c.values[np.ix_(neg, neg)] + c.values)) < 1e-10


def test_grid_mismatch_rejected(kernels31):
    with pytest.raises(ValueError):
        coulomb_momentum(ScalarField.zeros(GridSpec(5)), kernels31)


def test_amplitude_peaks_on_classical_field(kernels31, grid31):
    rho = _pair(grid31, (15, 8), (15, 22))
    state = ground_state(rho, kernels31)
    assert log_amplitude_p(state, state.shift, rho) == (0.0, True)


def test_amplitude_falls_off_quadratically(rng, kernels31, grid31):
    rho = _pair(grid31, (15, 8), (15, 22))
    state = ground_state(rho, kernels31)
    g = ScalarField.random(grid31, rng)
    v = VectorField(dbar(g, "y"), -dbar(g, "x"))
    q = transverse_quadratic_form(v, kernels31)
    assert q > 0.0
    assert transverse_quadratic_form(v, kernels31, method="direct") == pytest.approx(q, rel=1e-9)
    for t in (-1.0, -0.5, 0.25, 1.0):
        log_modulus, on_constraint = log_amplitude_p(state, state.shift + v * t, rho)
        assert on_constraint
        assert log_modulus == pytest.approx(-0.5 * t * t * q, rel=1e-9)


def test_amplitude_flags_constraint_violation(kernels31, grid31):
    rho = _pair(grid31, (15, 8), (15, 22))
    state = ground_state(rho, kernels31)
    bump = VectorField(ScalarField.zeros(grid31).with_value((2, 2), 1.0), ScalarField.zeros(grid31))
    assert log_amplitude_p(state, state.shift + bump, rho)[1] is False


def test_phase_is_wrapped(kernels31):
    state = vacuum_state(kernels31, phase=3.0 * math.pi)
    assert state.phase == pytest.approx(math.pi)
    assert state.phase_factor == pytest.approx(-1.0)


def test_evolve_phase(kernels31):
    state = vacuum_state(kernels31)
    assert evolve_phase(state, 1.7, 0.0).phase == state.phase
    assert evolve_phase(state, math.pi, 1.0).phase == pytest.approx(math.pi)
    first = evolve_phase(state, 0.3, 2.0)
    second = evolve_phase(state, 0.1, 2.0)
    assert first.phase - second.phase == pytest.approx(-0.4)


def test_displace(kernels31, grid31):
    vacuum = vacuum_state(kernels31)
    assert displace(vacuum, VectorField.zeros(grid31)).same_field(vacuum)
    rho = _pair(grid31, (4, 4), (4, 10))
    target = ground_state(rho, kernels31)
    moved = displace(vacuum, target.shift)
    assert moved.same_field(target)
    assert displace(moved, -target.shift).same_field(vacuum)


def test_state_rejects_mismatched_shift(kernels31):
    with pytest.raises(ValueError):
        GaussianFieldState(kernels31, VectorField.zeros(GridSpec(5)))
