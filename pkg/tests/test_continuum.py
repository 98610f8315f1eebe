import math

import pytest

from latgauge.continuum import (
    ConvergenceSeries,
    continuum_inverse_distance,
    continuum_log_slope,
    d_log_check,
    doubler_weight,
    g_scaling_check,
    kvec_convergence,
    log_slope_oracle_gap,
    richardson,
    series_frame,
)

TWO_OVER_PI = 2.0 / math.pi


def test_richardson_recovers_quadratic_convergence():
    ns = [10, 20, 40]
    estimate, rate = richardson(ns, [1.0 + 1.0 / n**2 for n in ns])
    assert estimate == pytest.approx(1.0, abs=1e-12)
    assert rate == pytest.approx(2.0, abs=1e-9)


def test_richardson_fallbacks():
    assert richardson([10, 20], [1.0, 2.0])[0] == 2.0
    estimate, rate = richardson([10, 20, 40], [1.0, 2.0, 4.0])
    assert estimate == 4.0 and math.isnan(rate)


@pytest.mark.parametrize(
    "offset, weight", [((0, 2), 4), ((2, 2), 4), ((0, 1), 0), ((1, 1), 0), ((1, 2), 0)]
)
def test_doubler_weight(offset, weight):
    assert doubler_weight(offset) == weight


def test_oracles():
    assert continuum_log_slope((0, 4)) == pytest.approx(TWO_OVER_PI)
    assert continuum_inverse_distance((0, 4)) == pytest.approx(4.0 / (2.0 * math.pi * 4.0))


def test_series_validation():
    with pytest.raises(ValueError):
        ConvergenceSeries((10, 10), "x", (1.0, 1.0), 1.0, 0.0)
    with pytest.raises(ValueError):
        ConvergenceSeries((10, 20), "x", (1.0,), 1.0, 0.0)
    with pytest.raises(ValueError):
        ConvergenceSeries((10, 20), "x", (1.0, math.inf), 1.0, 0.0)


def test_cauchy_like():
    assert ConvergenceSeries((1, 2, 3), "x", (1.0, 1.5, 1.6), 1.6, 1.0).is_cauchy_like()
    assert not ConvergenceSeries((1, 2, 3), "x", (1.0, 1.1, 1.6), 1.6, 1.0).is_cauchy_like()


def test_kvec_error_falls_as_inverse_square():
    series = kvec_convergence([40, 80, 160], 0.05)
    errors = series.values
    assert errors[0] > errors[1] > errors[2] > 0.0
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.2)
    assert errors[1] / errors[2] == pytest.approx(4.0, rel=0.2)
    assert series.rate == pytest.approx(2.0, abs=0.2)


@pytest.mark.parametrize("fraction", [0.0, 0.25, 0.5])
def test_kvec_rejects_fraction(fraction):
    with pytest.raises(ValueError):
        kvec_convergence([40, 80], fraction)


def test_log_law_slopes_agree_between_radius_pairs():
    inner = d_log_check([201], 2, 4).values[-1]
    outer = d_log_check([201], 4, 8).values[-1]
    assert abs(inner - outer) / abs(outer) < 0.02


def test_log_law_slope_matches_continuum():
    slope = d_log_check([201], 8, 16).values[-1]
    assert abs(slope - TWO_OVER_PI) < 5e-3


def test_log_slope_gap_small_and_even_only():
    assert abs(log_slope_oracle_gap(201, 8, 16)) < 5e-3
    with pytest.raises(ValueError):
        log_slope_oracle_gap(201, 1, 2)


def test_inverse_distance_increments_shrink():
    series = g_scaling_check([51, 101, 201], 4)
    assert series.is_cauchy_like()
    assert all(v > 0.0 for v in series.values)


@pytest.mark.parametrize("r1, r2", [(2, 2), (0, 2), (4, 2)])
def test_d_log_rejects_radii(r1, r2):
    with pytest.raises(ValueError):
        d_log_check([51], r1, r2)


def test_offsets_must_be_small_against_grid():
    with pytest.raises(ValueError):
        d_log_check([21], 4, 12)
    with pytest.raises(ValueError):
        g_scaling_check([21], 11)
    with pytest.raises(ValueError):
        g_scaling_check([21], 0)


def test_series_frame_columns():
    frame = series_frame([kvec_convergence([40, 80, 160], 0.05)])
    assert list(frame.columns) == ["n", "observable", "value", "estimate", "rate"]
    assert list(frame["n"]) == [40, 80, 160]
