import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latgauge.helpers import (
    parse_int_list,
    parse_range,
    parse_region,
    parse_site_pair,
    parse_sites,
    wrap_phase,
)


def test_parse_sites():
    assert parse_sites("50,40;50,60") == [(50, 40), (50, 60)]
    assert parse_sites(" 1, 2 ;") == [(1, 2)]


@pytest.mark.parametrize("text", ["", "1", "1,2,3", "a,b"])
def test_parse_sites_rejects(text):
    with pytest.raises(ValueError):
        parse_sites(text)


def test_parse_site_pair():
    assert parse_site_pair("50,40:50,60") == ((50, 40), (50, 60))
    with pytest.raises(ValueError):
        parse_site_pair("50,40")


def test_parse_range_is_inclusive():
    taus = parse_range("0:10:0.1")
    assert len(taus) == 101
    assert taus[-1] == pytest.approx(10.0)
    assert list(parse_range("1:1:0.5")) == [1.0]


@pytest.mark.parametrize("text", ["0:1", "0:1:0", "2:1:0.1", "0:1:-1"])
def test_parse_range_rejects(text):
    with pytest.raises(ValueError):
        parse_range(text)


def test_parse_int_list_and_region():
    assert parse_int_list("51,101,201") == [51, 101, 201]
    assert parse_region("2,2,5") == (2, 2, 5)
    with pytest.raises(ValueError):
        parse_region("2,2")
    with pytest.raises(ValueError):
        parse_int_list(",")


def test_wrap_phase_edges():
    assert wrap_phase(math.pi) == pytest.approx(math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)
    assert wrap_phase(0.0) == 0.0


@given(st.floats(-1e4, 1e4, allow_nan=False))
def test_wrap_phase_range(x):
    y = wrap_phase(x)
    assert -math.pi - 1e-9 < y <= math.pi + 1e-9
    assert math.cos(y) == pytest.approx(math.cos(x), abs=1e-9)
