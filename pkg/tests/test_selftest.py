import pytest

from latgauge.selftest import CHECKS, SelftestReport, format_table, run_selftest


def test_check_names_are_unique():
    names = [name for name, _ in CHECKS]
    assert len(names) == len(set(names))


def test_selected_checks_pass(tmp_path):
    report = run_selftest(11, tmp_path, ["vacuum ground energy", "b minimality"])
    assert isinstance(report, SelftestReport)
    assert [c.name for c in report.checks] == ["vacuum ground energy", "b minimality"]
    assert report.passed


def test_failing_check_is_reported(monkeypatch):
    def broken(rng, cache_dir):
        raise RuntimeError("boom")

    monkeypatch.setattr("latgauge.selftest.CHECKS", [("broken", broken)])
    report = run_selftest(0)
    assert not report.passed
    assert report.checks[0].detail == "RuntimeError: boom"
    assert "FAIL" in format_table(report)


@pytest.mark.slow
def test_full_suite_passes(tmp_path):
    report = run_selftest(0, tmp_path)
    assert report.passed, format_table(report)
