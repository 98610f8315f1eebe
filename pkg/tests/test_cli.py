import json

import pandas as pd
import pytest

from latgauge.cli import main, parse_args
from latgauge.errors import UsageError
from latgauge.lattice import GridSpec
from latgauge.spectral import build_kernels
from latgauge.storage import kernel_cache_path, read_kernel_cache


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    monkeypatch.setenv("LATGAUGE_CACHE", str(tmp_path / "cache"))
    monkeypatch.delenv("LATGAUGE_SEED", raising=False)
    monkeypatch.delenv("LATGAUGE_LOG_LEVEL", raising=False)


def test_parse_coulomb_arguments():
    cfg = parse_args(["coulomb", "--n", "101", "--charges", "50,40;50,60"])
    assert cfg.command == "coulomb"
    assert cfg.grid == GridSpec(101)
    assert cfg.params["charges"] == [(50, 40), (50, 60)]
    assert cfg.seed == 0


def test_global_flags():
    cfg = parse_args(["--seed", "7", "--log-level", "debug", "selftest", "--only", "a, b"])
    assert cfg.seed == 7 and cfg.log_level == "DEBUG"
    assert cfg.params["only"] == ["a", "b"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["coulomb", "--n", "2", "--charges", "0,0"],
        ["coulomb", "--n", "9", "--charges", "0;0"],
        ["coulomb", "--n", "9", "--a", "-1", "--charges", "0,0"],
        ["fme", "--n", "31", "--sites", "15,8"],
        ["continuum", "--check", "nope"],
        ["--seed", "-3", "selftest"],
        ["dynamics", "--n", "8", "--unknown"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)


def test_usage_error_exit_code(capsys):
    assert main(["coulomb", "--n", "2", "--charges", "0,0"]) == 2
    assert "invalid n" in capsys.readouterr().err
    assert main([]) == 2


def test_coulomb_writes_json(tmp_path):
    out = tmp_path / "coulomb.json"
    assert main(["coulomb", "--n", "15", "--charges", "7,3;7,11", "--out", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))
    table = build_kernels(GridSpec(15))
    assert result["pair_distance"] == 8.0
    assert result["D_of_d"] == pytest.approx(table.d((0, 8)))
    assert result["total"] == pytest.approx(result["e0"] + result["e_shift"])
    assert result["non_neutral"] is True


def test_coulomb_duplicate_charges_is_usage_error():
    assert main(["coulomb", "--n", "9", "--charges", "1,1;1,1"]) == 2


def test_coulomb_prints_to_stdout(capsys):
    assert main(["coulomb", "--n", "9", "--charges", "4,4"]) == 0
    assert json.loads(capsys.readouterr().out)["charges"] == [[4, 4]]


def test_dynamics_is_reproducible(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["dynamics", "--n", "8", "--steps", "20"]
    assert main([*argv, "--out", str(first)]) == 0
    assert main([*argv, "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    frame = pd.read_csv(first)
    assert list(frame.columns) == ["t", "H", "max_constraint_residual"]
    assert len(frame) == 21


def test_dynamics_single_mode(tmp_path):
    out = tmp_path / "mode.csv"
    argv = ["dynamics", "--n", "16", "--init", "mode", "--mode", "1,2", "--steps", "50"]
    assert main([*argv, "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert frame["max_constraint_residual"].max() < 1e-9


def test_unstable_dynamics_exit_code():
    assert main(["dynamics", "--n", "8", "--dt", "2.0", "--steps", "200"]) == 1


def test_fme_sweep(tmp_path):
    out = tmp_path / "fme.csv"
    argv = ["fme", "--n", "31", "--sites", "15,8:15,22", "--sweep-tau", "0:1:0.5"]
    assert main([*argv, "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame["tau"]) == [0.0, 0.5, 1.0]
    assert frame["entropy"].iloc[0] < 1e-12


def test_fme_null_test(capsys):
    assert main(["fme", "--n", "31", "--sites", "15,8:15,22", "--null-test"]) == 0
    assert "embezzlement null test: PASS" in capsys.readouterr().out


def test_fme_row_mismatch():
    assert main(["fme", "--n", "31", "--sites", "15,8:15,22", "--row", "14"]) == 2


def test_fme_bad_geometry():
    assert main(["fme", "--n", "31", "--sites", "15,8:15,12"]) == 2


def test_algebra_dump(tmp_path):
    out = tmp_path / "center.json"
    assert main(["algebra", "--n", "9", "--region", "3,3,3", "--dump", str(out)]) == 0
    result = json.loads(out.read_text(encoding="utf-8"))
    assert result["generator_count"] == 19
    assert result["center_dimension"] == 17
    assert len(result["center"]) == 17


def test_algebra_region_outside_grid():
    assert main(["algebra", "--n", "9", "--region", "6,6,5"]) == 2


def test_continuum_kvec(tmp_path):
    out = tmp_path / "kvec.csv"
    argv = ["continuum", "--check", "kvec", "--n-list", "40,80,160", "--out", str(out)]
    assert main(argv) == 0
    assert len(pd.read_csv(out)) == 3


def test_continuum_bad_radius():
    assert main(["continuum", "--check", "g-scaling", "--n-list", "21", "--r", "11"]) == 2


def test_selftest_subset(tmp_path, capsys):
    out = tmp_path / "report.json"
    argv = ["--seed", "3", "selftest", "--only", "dft identities,discrete calculus"]
    assert main([*argv, "--out", str(out)]) == 0
    table = capsys.readouterr().out
    assert "dft identities" in table and "PASS" in table
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["passed"] and len(report["checks"]) == 2


def test_selftest_recovers_from_corrupt_cache(tmp_path):
    cache = tmp_path / "kernels"
    grid = GridSpec(31)
    path = kernel_cache_path(cache, grid)
    path.parent.mkdir(parents=True)
    path.write_bytes(b"not a kernel table")
    argv = ["--cache-dir", str(cache), "selftest", "--only", "gauss-law solver"]
    assert main(argv) == 0
    g_values, _ = read_kernel_cache(path, grid)
    assert g_values.shape == (31, 31)
