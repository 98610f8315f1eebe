import json

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from latgauge.errors import KernelCacheError
from latgauge.lattice import GridSpec, ScalarField
from latgauge.storage import (
    FieldDocument,
    field_from_csv,
    field_from_json,
    field_to_csv,
    field_to_json,
    kernel_cache_path,
    load_field,
    load_json,
    read_kernel_cache,
    save_field,
    save_json,
    write_kernel_cache,
    write_series,
)


def test_load_json_default_on_missing(tmp_path):
    assert load_json(tmp_path / "missing.json", default={"x": 1}) == {"x": 1}


def test_load_json_default_on_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    assert load_json(path) is None


def test_save_json_creates_folders(tmp_path):
    path = tmp_path / "a" / "b" / "out.json"
    save_json(path, {"e0": 1.5})
    assert load_json(path) == {"e0": 1.5}
    assert path.read_text(encoding="utf-8").endswith("\n")


def test_field_json_is_bit_exact(rng):
    f = ScalarField.random(GridSpec(6, 0.37), rng)
    back = field_from_json(field_to_json(f))
    assert back.grid == f.grid
    assert np.array_equal(back.values, f.values)


def test_field_json_layout(rng):
    f = ScalarField.random(GridSpec(3), rng)
    doc = json.loads(field_to_json(f))
    assert set(doc) == {"N", "a", "values"}
    assert doc["N"] == 3
    assert doc["values"][1] == {"i": 0, "j": 1, "value": f.values[0, 1]}


def test_field_csv_round_trip(rng):
    f = ScalarField.random(GridSpec(5, 2.0), rng)
    text = field_to_csv(f)
    assert text.splitlines()[:3] == ["N,a", "5,2.0", "i,j,value"]
    back = field_from_csv(text)
    assert back.grid == f.grid
    np.testing.assert_allclose(back.values, f.values, rtol=1e-15, atol=0)


def test_field_csv_rejects_missing_header():
    with pytest.raises(ValueError):
        field_from_csv("i,j,value\n0,0,1.0\n")


def test_document_rejects_incomplete_grid():
    with pytest.raises(ValidationError):
        FieldDocument(N=3, a=1.0, values=[{"i": 0, "j": 0, "value": 1.0}])


def test_document_rejects_small_grid():
    with pytest.raises(ValidationError):
        FieldDocument(N=2, a=1.0, values=[{"i": 0, "j": 0, "value": 1.0}] * 4)


@pytest.mark.parametrize("name", ["rho.json", "rho.csv"])
def test_save_and_load_field(tmp_path, rng, name):
    f = ScalarField(GridSpec(4), rng.integers(-2, 3, size=(4, 4)))
    save_field(tmp_path / name, f)
    assert load_field(tmp_path / name).equals(f)


def test_write_series_keeps_column_order(tmp_path):
    frame = pd.DataFrame({"t": [0.0, 0.1], "energy": [1.0, 1.0]})
    write_series(tmp_path / "s.csv", frame)
    assert (tmp_path / "s.csv").read_text(encoding="utf-8").splitlines()[0] == "t,energy"


def test_kernel_cache_round_trip(tmp_path, rng):
    grid = GridSpec(5, 0.5)
    g, d = rng.standard_normal((5, 5)), rng.standard_normal((5, 5))
    path = kernel_cache_path(tmp_path, grid)
    write_kernel_cache(path, grid, g, d)
    g2, d2 = read_kernel_cache(path, grid)
    assert np.array_equal(g, g2) and np.array_equal(d, d2)


def test_kernel_cache_name_depends_on_grid(tmp_path):
    assert kernel_cache_path(tmp_path, GridSpec(5)) != kernel_cache_path(tmp_path, GridSpec(6))
    assert kernel_cache_path(tmp_path, GridSpec(5)) != kernel_cache_path(
        tmp_path, GridSpec(5, 0.5)
    )


def test_kernel_cache_rejects_truncation(tmp_path):
    grid = GridSpec(4)
    path = kernel_cache_path(tmp_path, grid)
    write_kernel_cache(path, grid, np.zeros((4, 4)), np.zeros((4, 4)))
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(KernelCacheError):
        read_kernel_cache(path, grid)


def test_kernel_cache_rejects_other_grid(tmp_path):
    grid = GridSpec(4)
    path = tmp_path / "k.lgk"
    write_kernel_cache(path, grid, np.zeros((4, 4)), np.zeros((4, 4)))
    with pytest.raises(KernelCacheError):
        read_kernel_cache(path, GridSpec(4, 2.0))


def test_kernel_cache_rejects_bad_magic(tmp_path):
    grid = GridSpec(3)
    path = tmp_path / "k.lgk"
    write_kernel_cache(path, grid, np.ones((3, 3)), np.ones((3, 3)))
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(KernelCacheError):
        read_kernel_cache(path, grid)


def test_kernel_cache_rejects_non_finite(tmp_path):
    grid = GridSpec(3)
    path = tmp_path / "k.lgk"
    g = np.ones((3, 3))
    g[1, 1] = np.nan
    write_kernel_cache(path, grid, g, np.ones((3, 3)))
    with pytest.raises(KernelCacheError):
        read_kernel_cache(path, grid)


def test_kernel_cache_missing_file(tmp_path):
    with pytest.raises(KernelCacheError):
        read_kernel_cache(tmp_path / "nope.lgk", GridSpec(3))
