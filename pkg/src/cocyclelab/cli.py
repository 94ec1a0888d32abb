"""Command-line front end.

Every experiment is described by a JSON config file (see README for the
schema); the seed always comes from the config or flags, never from the
wall clock, so a fixed invocation produces byte-identical reports.

Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cocycle import cocycle_from_dict
from .errors import (
    CocycleLabError,
    ConfigError,
    InvalidCocycle,
    InvalidParams,
    NotConverged,
)
from .experiments import run_continuity_sweep, run_support_jitter
from .exponents import estimate_extremal_mc
from .holder import (
    ShiftMetricParams,
    build_construction,
    holder_bound,
    holder_seminorm,
    kifer_family,
    perturbation_difference,
)
from .oseledets import angle_convergence_experiment
from .experiments import perturb_matrices
from .report import ReportTable, emit_report
from .stationary import residual, save_measure, solve_stationary

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config key {key!r} is required")
    return cfg[key]


def _get_cocycle(cfg: dict):
    return cocycle_from_dict(_require(cfg, "cocycle"))


def _get_seed(cfg: dict, args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("COCYCLELAB_SEED")
    if env is not None:
        return int(env)
    if "seed" not in cfg:
        raise ConfigError("seed must be given in config, --seed, or COCYCLELAB_SEED")
    return int(cfg["seed"])


def _get_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    return int(os.environ.get("COCYCLELAB_THREADS", "1"))


def _estimate_row(est) -> list:
    return [
        est.method,
        est.n_steps,
        est.n_trials,
        est.lambda_plus,
        est.stderr_plus,
        est.lambda_minus,
        est.stderr_minus,
    ]


_ESTIMATE_COLUMNS = (
    "method",
    "n_steps",
    "n_trials",
    "lambda_plus",
    "stderr_plus",
    "lambda_minus",
    "stderr_minus",
)


def _cmd_estimate(cfg, args):
    cocycle = _get_cocycle(cfg)
    seed = _get_seed(cfg, args)
    est = estimate_extremal_mc(
        cocycle,
        int(_require(cfg, "n_steps")),
        int(_require(cfg, "n_trials")),
        seed,
        n_workers=_get_threads(args),
    )
    return ReportTable(
        columns=_ESTIMATE_COLUMNS,
        rows=[_estimate_row(est)],
        metadata={"seed": seed, "subcommand": "estimate"},
    )


def _cmd_stationary(cfg, args):
    cocycle = _get_cocycle(cfg)
    seed = _get_seed(cfg, args)
    measure, res = solve_stationary(
        cocycle,
        particle_budget=int(cfg.get("particle_budget", 10_000)),
        max_iters=int(cfg.get("max_iters", 200)),
        tol=float(cfg.get("tol", 1e-2)),
        seed=seed,
    )
    save_measure(measure, args.out, res, provenance=f"stationary seed={seed}")
    return None  # the measure dump is the report


def _cmd_oseledets(cfg, args):
    base = _get_cocycle(cfg)
    seed = _get_seed(cfg, args)
    eps = float(cfg.get("eps", 0.2))
    depth = int(cfg.get("depth", 200))
    n_points = int(cfg.get("n_points", 2000))
    rows = []
    for gamma in _require(cfg, "gammas"):
        other = perturb_matrices(base, float(gamma))
        result = angle_convergence_experiment(base, other, eps, depth, n_points, seed)
        rows.append(
            [float(gamma), result.fraction, result.n_valid, result.n_excluded]
        )
    return ReportTable(
        columns=("gamma", "fraction", "n_valid", "n_excluded"),
        rows=rows,
        metadata={
            "seed": seed,
            "subcommand": "oseledets",
            "eps": eps,
            "depth": depth,
            "n_points": n_points,
        },
    )


def _sweep_table(result, subcommand, seed) -> ReportTable:
    rows = [[row[c] for c in result.columns] for row in result.rows]
    meta = dict(result.metadata)
    meta.update({"seed": seed, "subcommand": subcommand})
    return ReportTable(columns=result.columns, rows=rows, metadata=meta)


def _cmd_sweep(cfg, args):
    base = _get_cocycle(cfg)
    seed = _get_seed(cfg, args)
    result = run_continuity_sweep(
        base,
        _require(cfg, "gammas"),
        int(_require(cfg, "n_steps")),
        int(_require(cfg, "n_trials")),
        seed,
        mode=cfg.get("mode", "matrices"),
        n_workers=_get_threads(args),
    )
    return _sweep_table(result, "sweep", seed)


def _cmd_jitter(cfg, args):
    base = _get_cocycle(cfg)
    seed = _get_seed(cfg, args)
    result = run_support_jitter(
        base,
        _require(cfg, "deltas"),
        int(_require(cfg, "n_steps")),
        int(_require(cfg, "n_trials")),
        seed,
        split=int(cfg.get("split", 3)),
        weight_split=cfg.get("weight_split"),
        n_workers=_get_threads(args),
    )
    return _sweep_table(result, "jitter", seed)


def _cmd_holder(cfg, args):
    sigma = float(_require(cfg, "sigma"))
    r = float(_require(cfg, "r"))
    weights = cfg.get("weights", [0.7, 0.3])
    params = ShiftMetricParams(exponent=r)
    rows = []
    for k in _require(cfg, "k_values"):
        c = build_construction(sigma, int(k), weights)
        norm = holder_seminorm(perturbation_difference(c), params)
        rows.append(
            [
                int(k),
                r,
                norm.sup_term,
                norm.quotient_term,
                norm.total,
                holder_bound(sigma, r, int(k)),
            ]
        )
    return ReportTable(
        columns=("k", "r", "sup_term", "quotient_term", "total", "bound"),
        rows=rows,
        metadata={"subcommand": "holder", "sigma": sigma},
    )


def _cmd_kifer(cfg, args):
    sigma = float(cfg.get("sigma", 2.0))
    seed = _get_seed(cfg, args)
    n_steps = int(_require(cfg, "n_steps"))
    n_trials = int(cfg.get("n_trials", 1))
    rows = []
    for p1 in _require(cfg, "p1_values"):
        est = estimate_extremal_mc(
            kifer_family(sigma, float(p1)),
            n_steps,
            n_trials,
            seed,
            n_workers=_get_threads(args),
        )
        rows.append([float(p1)] + _estimate_row(est))
    return ReportTable(
        columns=("p1",) + _ESTIMATE_COLUMNS,
        rows=rows,
        metadata={"subcommand": "kifer", "sigma": sigma, "seed": seed},
    )


_COMMANDS = {
    "estimate": _cmd_estimate,
    "stationary": _cmd_stationary,
    "oseledets": _cmd_oseledets,
    "sweep": _cmd_sweep,
    "jitter": _cmd_jitter,
    "holder": _cmd_holder,
    "kifer": _cmd_kifer,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocyclelab",
        description="Numerical experiments on random products of 2x2 matrices.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="overrides config seed")
        p.add_argument("--out", required=True, help="output report path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        table = _COMMANDS[args.subcommand](cfg, args)
        if table is not None:
            emit_report(table, args.format, args.out)
    except (ConfigError, InvalidCocycle, InvalidParams, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotConverged as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CocycleLabError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
