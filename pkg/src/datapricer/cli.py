"""Command-line entry point. Every subcommand is a thin shell over library
calls; no pricing or learning logic lives here.

Subcommands::

    discretize           grid sizes, exact family count, and the closed-form bound
    offline-opt          best curve in the configured family
    oracle-check         brute-force optimum vs. family best (small instances)
    simulate-stochastic  full stochastic runs over the config's seeds
    simulate-adversarial full adversarial runs over the config's seeds
    sweep                (horizon x seed) grid, aggregated into sweep.csv

All commands accept ``--seed`` (overrides the config's seed list) and
``--out DIR``. Exit status 0 on success; errors print one line to stderr and
exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config, resolve_epsilon
from .grids import GridParams, build_space, monotone_count_bound
from .harness import run_sweep, run_trial, write_outputs
from .market import TypeDistribution
from .offline import best_in_space, brute_force_opt
from .steps import CapExceededError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="datapricer",
        description="Revenue-optimal data pricing: discretize, optimize, simulate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    disc = sub.add_parser("discretize", help="print grid sizes and family counts")
    disc.add_argument("--scheme", required=True, choices=("monotone", "smooth", "diminishing"))
    disc.add_argument("--eps", required=True, type=float)
    disc.add_argument("--m", required=True, type=int)
    disc.add_argument("--n", required=True, type=int)
    disc.add_argument("--L", type=float, default=None)
    disc.add_argument("--J", type=float, default=None)

    for name in ("offline-opt", "simulate-stochastic", "simulate-adversarial", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)

    oracle = sub.add_parser("oracle-check", help="oracle vs. family approximation gap")
    oracle.add_argument("--config", required=True)
    oracle.add_argument("--resolution", type=float, default=0.01)

    for p in sub.choices.values():
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
    return parser


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, run=replace(cfg.run, seeds=(args.seed,)))
    return cfg


def _prepared(cfg):
    from .config import build_instance, resolve_grid_params

    instance = build_instance(cfg)
    eps = resolve_epsilon(cfg, cfg.run.horizon)
    params = resolve_grid_params(cfg, instance, eps)
    prune = instance.max_value() if cfg.space.prune else None
    space = build_space(params, cfg.space.scheme, prune_above=prune, cap=cfg.space.cap)
    return instance, space


def _cmd_discretize(args) -> int:
    params = GridParams(
        epsilon=args.eps, m=args.m, n_total=args.n, smoothness=args.L, diminishing=args.J
    )
    space = build_space(params, args.scheme)
    bound = monotone_count_bound(args.eps, args.m, args.n)
    print(f"scheme:            {args.scheme}")
    print(f"value grid size:   {space.value_grid.size}")
    print(f"data grid size:    {space.data_grid.size}")
    print(f"family size exact: {space.count}")
    print(f"monotone bound:    {bound:.6g}")
    return 0


def _cmd_offline_opt(args) -> int:
    cfg = _load(args)
    if cfg.setting.kind != "stochastic":
        raise ConfigError("offline-opt needs a stochastic config (known weights)")
    instance, space = _prepared(cfg)
    dist = TypeDistribution(np.asarray(cfg.setting.weights))
    curve, revenue = best_in_space(instance, dist, space)
    payload = {
        "revenue": revenue,
        "boundaries": curve.boundaries.tolist(),
        "values": curve.values.tolist(),
        "space_size": space.count,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "offline_opt.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
    return 0


def _cmd_oracle_check(args) -> int:
    cfg = _load(args)
    if cfg.setting.kind != "stochastic":
        raise ConfigError("oracle-check needs a stochastic config (known weights)")
    instance, space = _prepared(cfg)
    dist = TypeDistribution(np.asarray(cfg.setting.weights))
    _, family_rev = best_in_space(instance, dist, space)
    _, oracle_rev = brute_force_opt(instance, dist, args.resolution)
    eps = space.epsilon
    payload = {
        "family_revenue": family_rev,
        "oracle_revenue": oracle_rev,
        "gap": oracle_rev - family_rev,
        "epsilon": eps,
        "guarantee": 2 * eps / (1 + eps) + args.resolution,
        "resolution": args.resolution,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "oracle_check.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
    return 0


def _cmd_simulate(args, expected_kind: str) -> int:
    cfg = _load(args)
    if cfg.setting.kind != expected_kind:
        raise ConfigError(f"config setting.kind is {cfg.setting.kind!r}, expected {expected_kind!r}")
    out = args.out or "out"
    for seed in cfg.run.seeds:
        start = time.perf_counter()
        result = run_trial(cfg, seed)
        elapsed = time.perf_counter() - start
        trace_path, summary_path = write_outputs(result, out, seed)
        print(
            f"seed {seed}: T={result.summary['horizon']} "
            f"family={result.summary['space_size']} "
            f"regret={result.summary['final_regret']:.6g} "
            f"({elapsed:.2f}s) -> {trace_path}, {summary_path}"
        )
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    out = args.out or "out"
    rows = run_sweep(cfg, out_dir=out)
    for row in rows:
        regret = row["final_regret"]
        regret_str = f"{regret:.6g}" if isinstance(regret, float) else regret
        print(
            f"T={row['horizon']} seed={row['seed']} family={row['space_size']} "
            f"regret={regret_str}"
        )
    print(f"wrote {Path(out) / 'sweep.csv'}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "discretize":
            return _cmd_discretize(args)
        if args.command == "offline-opt":
            return _cmd_offline_opt(args)
        if args.command == "oracle-check":
            return _cmd_oracle_check(args)
        if args.command == "simulate-stochastic":
            return _cmd_simulate(args, "stochastic")
        if args.command == "simulate-adversarial":
            return _cmd_simulate(args, "adversarial")
        if args.command == "sweep":
            return _cmd_sweep(args)
        print(f"error: unknown command {args.command!r}", file=sys.stderr)
        return 2
    except (ConfigError, CapExceededError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
