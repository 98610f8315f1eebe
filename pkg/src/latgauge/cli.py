# Location: src/latgauge/cli.py
"""`latgauge` command line.

Exit codes: 0 success, 1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Literal, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from latgauge import algebra
from latgauge.config import configure_logging, load_settings
from latgauge.continuum import d_log_check, g_scaling_check, kvec_convergence, series_frame
from latgauge.dynamics import (
    PhaseSpaceState,
    SourceConfig,
    constraint_residual,
    default_dt,
    energy,
    trajectory,
    transverse_mode_state,
)
from latgauge.errors import LatgaugeError, UsageError
from latgauge.fme.protocol import ProtocolSpec, embezzlement_null_test, sweep_tau
from latgauge.gaussian import coulomb_momentum, energy_report
from latgauge.helpers import (
    parse_int_list,
    parse_int_pairs,
    parse_range,
    parse_region,
    parse_site_pair,
    parse_sites,
)
from latgauge.lattice import GridSpec, VectorField
from latgauge.matter import MatterConfig, density
from latgauge.selftest import format_table, run_selftest
from latgauge.spectral import load_kernels
from latgauge.storage import save_json, write_series

logger = logging.getLogger(__name__)

Command = Literal["dynamics", "coulomb", "fme", "algebra", "continuum", "selftest"]


class RunConfig(BaseModel):
    command: Command
    n: int | None = Field(default=None, ge=3)
    a: float = Field(default=1.0, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    out_path: Path | None = None
    cache_dir: Path | None = None
    log_level: str = "INFO"
    params: dict[str, Any] = Field(default_factory=dict)

    @property
    def grid(self) -> GridSpec:
        if self.n is None:
            raise UsageError(f"{self.command} needs --n")
        return GridSpec(self.n, self.a)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latgauge", description="2D periodic lattice gauge toy model")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    parser.add_argument("--cache-dir", default=None, help="kernel cache (env LATGAUGE_CACHE)")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized steps")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grid_args(p, n_default=None):
        p.add_argument("--n", type=int, default=n_default, required=n_default is None)
        p.add_argument("--a", type=float, default=1.0)

    p = sub.add_parser("dynamics", help="leapfrog run; CSV rows t,H,max_constraint_residual")
    grid_args(p)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--init", choices=("random", "mode"), default="random")
    p.add_argument("--mode", default="1,0", help="alpha,beta for --init mode")
    p.add_argument("--out", default=None)

    p = sub.add_parser("coulomb", help="ground-state energies with static charges (JSON)")
    grid_args(p)
    p.add_argument("--charges", required=True, help='e.g. "50,40;50,60"')
    p.add_argument("--out", default=None)

    p = sub.add_parser("fme", help="field-mediated entanglement run or tau sweep (CSV)")
    grid_args(p)
    p.add_argument("--sites", required=True, help='e.g. "50,40:50,60"')
    p.add_argument("--row", type=int, default=None)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--sweep-tau", default=None, help="start:stop:step")
    p.add_argument("--region-size", type=int, default=7)
    p.add_argument("--null-test", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("algebra", help="center basis of a square region (JSON)")
    grid_args(p)
    p.add_argument("--region", required=True, help="i,j,M")
    p.add_argument("--dump", default=None)

    p = sub.add_parser("continuum", help="convergence series toward continuum forms (CSV)")
    p.add_argument("--check", choices=("g-scaling", "d-log", "kvec"), required=True)
    p.add_argument("--n-list", default="51,101,201")
    p.add_argument("--pairs", default="2,4;4,8", help="even r1,r2 pairs for d-log")
    p.add_argument("--r", type=int, default=4, help="offset for g-scaling")
    p.add_argument("--fraction", type=float, default=0.05, help="mode fraction for kvec")
    p.add_argument("--out", default=None)

    p = sub.add_parser("selftest", help="acceptance suite with a PASS/FAIL table")
    p.add_argument("--only", default=None, help="comma-separated check names")
    p.add_argument("--out", default=None, help="optional JSON summary")
    return parser


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Validated RunConfig; every malformed input becomes a UsageError."""
    ns = build_parser().parse_args(list(argv))
    raw = vars(ns).copy()
    try:
        settings = load_settings(raw.pop("cache_dir"), raw.pop("log_level"), raw.pop("seed"))
    except LatgaugeError as exc:
        raise UsageError(str(exc)) from exc

    command = raw.pop("command")
    out, dump = raw.pop("out", None), raw.pop("dump", None)
    out = out or dump
    n, a = raw.pop("n", None), raw.pop("a", 1.0)
    params = _parse_params(command, raw)
    try:
        return RunConfig(
            command=command,
            n=n,
            a=a,
            seed=settings.seed,
            out_path=Path(out) if out else None,
            cache_dir=settings.cache_dir,
            log_level=settings.log_level,
            params=params,
        )
    except ValidationError as exc:
        raise UsageError(_first_error(exc)) from exc


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    where = ".".join(str(p) for p in err["loc"])
    return f"invalid {where}: {err['msg']}"


def _parse_params(command: str, raw: dict) -> dict:
    try:
        if command == "coulomb":
            raw["charges"] = parse_sites(raw["charges"])
        elif command == "fme":
            raw["sites"] = parse_site_pair(raw["sites"])
            if raw["sweep_tau"]:
                raw["sweep_tau"] = parse_range(raw["sweep_tau"]).tolist()
        elif command == "algebra":
            raw["region"] = parse_region(raw["region"])
        elif command == "continuum":
            raw["n_list"] = parse_int_list(raw["n_list"])
            raw["pairs"] = parse_int_pairs(raw["pairs"])
        elif command == "dynamics":
            raw["mode"] = parse_int_pairs(raw["mode"])[0]
        elif command == "selftest" and raw.get("only"):
            raw["only"] = [s.strip() for s in raw["only"].split(",")]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return raw


# ---------- commands ----------


def run_dynamics(cfg: RunConfig) -> int:
    grid = cfg.grid
    dt = cfg.params["dt"] or default_dt(grid)
    source = SourceConfig.vacuum(grid)
    if cfg.params["init"] == "mode":
        state = transverse_mode_state(grid, *cfg.params["mode"])
    else:
        rng = np.random.default_rng(cfg.seed)
        state = PhaseSpaceState(VectorField.random(grid, rng), VectorField.random(grid, rng))
    rows = [
        {
            "t": s.time,
            "H": energy(s, source),
            "max_constraint_residual": constraint_residual(s, source).sup_norm(),
        }
        for s in trajectory(state, source, dt, cfg.params["steps"])
    ]
    frame = pd.DataFrame(rows, columns=["t", "H", "max_constraint_residual"])
    _emit_frame(cfg, frame)
    return 0


def run_coulomb(cfg: RunConfig) -> int:
    grid = cfg.grid
    charges = cfg.params["charges"]
    try:
        config = MatterConfig.of(grid, *charges)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    kernels = load_kernels(grid, cfg.cache_dir)
    rho = density(config)
    report = energy_report(rho, kernels)
    result = {
        "n": grid.n,
        "a": grid.spacing,
        "charges": [list(s) for s in config.sorted_sites()],
        "e0": report.e0,
        "e_shift": report.e_shift,
        "total": report.total,
        "non_neutral": coulomb_momentum(rho, kernels).non_neutral,
    }
    if len(charges) == 2:
        (i1, j1), (i2, j2) = charges
        offset = (i2 - i1, j2 - j1)
        result["pair_offset"] = list(offset)
        result["pair_distance"] = float(np.hypot(*offset)) * grid.spacing
        result["D_of_d"] = kernels.d(offset)
    _emit_json(cfg, result)
    return 0


def run_fme(cfg: RunConfig) -> int:
    grid = cfg.grid
    site_a, site_b = cfg.params["sites"]
    row = cfg.params["row"]
    if row is not None and (site_a[0] != row or site_b[0] != row):
        raise UsageError(f"--row {row} does not match the rows of --sites")
    try:
        spec = ProtocolSpec.centered(
            grid, site_a, site_b, tau=cfg.params["tau"], region_size=cfg.params["region_size"]
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    kernels = load_kernels(grid, cfg.cache_dir)

    if cfg.params["null_test"]:
        ok = embezzlement_null_test(spec, kernels)
        print(f"embezzlement null test: {'PASS' if ok else 'FAIL'}")
        if not ok:
            return 1

    taus = cfg.params["sweep_tau"] or [spec.tau]
    _emit_frame(cfg, sweep_tau(spec, taus, kernels))
    return 0


def run_algebra(cfg: RunConfig) -> int:
    grid = cfg.grid
    i, j, m = cfg.params["region"]
    region = algebra.Region((i, j), m)
    try:
        region.check(grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    gens = algebra.local_generators(region, grid)
    basis = algebra.center_basis(region, grid)
    result = {
        "n": grid.n,
        "region": {"origin": [i, j], "size": m},
        "generator_count": len(gens),
        "center_dimension": len(basis),
        "center": algebra.to_document(basis),
    }
    _emit_json(cfg, result)
    return 0


def run_continuum(cfg: RunConfig) -> int:
    n_list = cfg.params["n_list"]
    check = cfg.params["check"]
    try:
        if check == "d-log":
            series = [d_log_check(n_list, r1, r2) for r1, r2 in cfg.params["pairs"]]
        elif check == "g-scaling":
            series = [g_scaling_check(n_list, cfg.params["r"])]
        else:
            series = [kvec_convergence(n_list, cfg.params["fraction"])]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit_frame(cfg, series_frame(series))
    return 0


def run_selftest_command(cfg: RunConfig) -> int:
    report = run_selftest(cfg.seed, cfg.cache_dir, cfg.params.get("only"))
    print(format_table(report))
    if cfg.out_path:
        save_json(cfg.out_path, report.model_dump())
    return 0 if report.passed else 1


def _emit_frame(cfg: RunConfig, frame: pd.DataFrame) -> None:
    if cfg.out_path:
        write_series(cfg.out_path, frame)
        logger.info("Wrote %d rows to %s", len(frame), cfg.out_path)
    else:
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")


def _emit_json(cfg: RunConfig, data: dict) -> None:
    if cfg.out_path:
        save_json(cfg.out_path, data)
        logger.info("Wrote %s", cfg.out_path)
    else:
        print(json.dumps(data, indent=2))


COMMANDS = {
    "dynamics": run_dynamics,
    "coulomb": run_coulomb,
    "fme": run_fme,
    "algebra": run_algebra,
    "continuum": run_continuum,
    "selftest": run_selftest_command,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code

    configure_logging(cfg.log_level)
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code
    except LatgaugeError as exc:
        logger.error("%s failed: %s", cfg.command, exc, exc_info=True)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
