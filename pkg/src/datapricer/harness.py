"""Experiment harness: buyer environments, learner drivers, regret
accounting, and trace/summary serialization.

Regret bookkeeping
------------------
Stochastic runs benchmark against the best curve *within the posted family*
under the true type distribution (computable exactly); the gap between that
and the unconstrained optimum is reported separately via the brute-force
oracle whenever the instance is small enough for it. Adversarial runs
benchmark against the best fixed curve in the family for the realized type
sequence; the per-round regret column uses the hindsight-best over the
prefix so far, so the final row matches the run benchmark exactly.

Determinism
-----------
Every run derives two independent RNG streams from its seed: one for the
environment (type draws), one for the learner (perturbations). Changing the
learner stream never changes the environment's draws. Adversarial type
sequences are generated in full before the learner exists. Repeated runs
with the same configuration and seed produce byte-identical outputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .config import ExperimentConfig, build_instance, resolve_epsilon, resolve_grid_params
from .ftpl import FtplLearner, default_theta
from .grids import build_space, space_demand_tables
from .market import MarketInstance, TypeDistribution
from .offline import ORACLE_MAX_N, ORACLE_MAX_TYPES, best_in_space, brute_force_opt
from .ucb import GIVEAWAY, UcbLearner

TRACE_HEADER = (
    "t",
    "curve_idx",
    "buyer_type",
    "amount",
    "payment",
    "feedback",
    "cum_revenue",
    "cum_regret",
)

SUMMARY_KEYS = (
    "schema",
    "setting",
    "seed",
    "horizon",
    "config",
    "backend",
    "value_grid_size",
    "data_grid_size",
    "space_size",
    "epsilon",
    "benchmark",
    "total_revenue",
    "final_regret",
    "regret_checkpoints",
    "oracle_gap",
    "theta",
    "checks",
)

BTL_COMPARATORS = 100
# Slack for the be-the-leader inequality: it holds exactly in real
# arithmetic; accumulated float sums can drift by ULPs.
BTL_SLACK = 1e-9


@dataclass(frozen=True)
class RoundRecord:
    """One market round as it appears in the trace CSV."""

    t: int
    curve_idx: int
    buyer_type: int
    amount: int
    payment: float
    feedback: int | None
    cum_revenue: float
    cum_regret: float


def adversary_sequence(spec: dict, horizon: int, m: int, seed: int) -> np.ndarray:
    """Oblivious type sequence, generated entirely before any run starts.

    Kinds: ``constant`` (one type throughout), ``periodic`` (a repeating
    pattern), ``blocks`` (k equal blocks cycling through the types), and
    ``random`` (seeded uniform draws, one per block of ``block`` rounds).
    """
    kind = spec.get("kind")
    if kind == "constant":
        t = int(spec.get("type", 0))
        if not 0 <= t < m:
            raise ValueError(f"constant adversary type {t} outside 0..{m - 1}")
        return np.full(horizon, t, dtype=np.int64)
    if kind == "periodic":
        pattern = np.asarray(spec.get("pattern", []), dtype=np.int64)
        if pattern.size == 0 or pattern.min() < 0 or pattern.max() >= m:
            raise ValueError("periodic adversary needs a pattern of type indices")
        reps = -(-horizon // pattern.size)
        return np.tile(pattern, reps)[:horizon]
    if kind == "blocks":
        k = int(spec.get("k", 2))
        if k < 1:
            raise ValueError("blocks adversary needs k >= 1")
        block = -(-horizon // k) if horizon else 1
        return np.array([(t // block) % m for t in range(horizon)], dtype=np.int64)
    if kind == "random":
        block = int(spec.get("block", 1))
        if block < 1:
            raise ValueError("random adversary needs block >= 1")
        rng = np.random.default_rng(seed)
        n_blocks = -(-horizon // block) if horizon else 0
        draws = rng.integers(0, m, size=n_blocks)
        return np.repeat(draws, block)[:horizon].astype(np.int64)
    raise ValueError(f"unknown adversary kind {kind!r}")


def _rng_pair(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    env_ss, learner_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(env_ss), np.random.default_rng(learner_ss)


def _checkpoints(horizon: int) -> list[int]:
    marks = {horizon, horizon // 2, horizon // 4}
    p = 1
    while p <= horizon:
        marks.add(p)
        p *= 2
    return sorted(t for t in marks if t >= 1)


@dataclass
class RunResult:
    records: list[RoundRecord]
    summary: dict


def _prepare(cfg: ExperimentConfig, horizon: int):
    instance = build_instance(cfg)
    epsilon = resolve_epsilon(cfg, horizon)
    params = resolve_grid_params(cfg, instance, epsilon)
    prune = instance.max_value() if cfg.space.prune else None
    space = build_space(params, cfg.space.scheme, prune_above=prune, cap=cfg.space.cap)
    amounts, payments = space_demand_tables(space, instance)
    return instance, space, amounts, payments


def _oracle_gap(instance: MarketInstance, dist: TypeDistribution, space_best: float):
    if instance.n_total > ORACLE_MAX_N or instance.m > ORACLE_MAX_TYPES:
        return None
    _, oracle_rev = brute_force_opt(instance, dist)
    return {"oracle_revenue": oracle_rev, "gap": oracle_rev - space_best}


def _summary_base(cfg, setting, seed, horizon, space, benchmark):
    return {
        "schema": 1,
        "setting": setting,
        "seed": seed,
        "horizon": horizon,
        "config": cfg.echo(),
        "backend": _kernels.backend_name(),
        "value_grid_size": int(space.value_grid.size),
        "data_grid_size": int(space.data_grid.size),
        "space_size": int(space.count),
        "epsilon": space.epsilon,
        "benchmark": benchmark,
        "theta": None,
        "oracle_gap": None,
        "checks": {},
    }


def run_stochastic(cfg: ExperimentConfig, seed: int, horizon: int | None = None) -> RunResult:
    """One stochastic trial: i.i.d. buyer types, UCB learner, regret vs. the
    family's best curve under the true distribution."""
    if cfg.setting.kind != "stochastic":
        raise ValueError("config does not describe a stochastic setting")
    horizon = cfg.run.horizon if horizon is None else horizon
    instance, space, amounts, payments = _prepare(cfg, horizon)
    dist = TypeDistribution(np.asarray(cfg.setting.weights))
    env_rng, _ = _rng_pair(seed)
    types = (
        env_rng.choice(instance.m, size=horizon, p=dist.weights)
        if horizon
        else np.zeros(0, dtype=np.int64)
    )

    _, opt_rev = best_in_space(instance, dist, space)
    records: list[RoundRecord] = []
    cum_revenue = 0.0
    if horizon >= 1:
        learner = UcbLearner(horizon, amounts, payments)
        for t in range(1, horizon + 1):
            buyer = int(types[t - 1])
            if t == 1:
                curve_idx, amount, payment = GIVEAWAY, instance.n_total, 0.0
            else:
                curve_idx = learner.select()
                amount = int(amounts[curve_idx, buyer])
                payment = float(payments[curve_idx, buyer])
            feedback = buyer if amount > 0 else None
            learner.update(curve_idx, feedback)
            cum_revenue += payment
            records.append(
                RoundRecord(
                    t=t,
                    curve_idx=curve_idx,
                    buyer_type=buyer,
                    amount=amount,
                    payment=payment,
                    feedback=feedback,
                    cum_revenue=cum_revenue,
                    cum_regret=t * opt_rev - cum_revenue,
                )
            )

    summary = _summary_base(
        cfg,
        "stochastic",
        seed,
        horizon,
        space,
        {"kind": "best_in_family_under_true_weights", "revenue_per_round": opt_rev},
    )
    summary["total_revenue"] = cum_revenue
    summary["final_regret"] = horizon * opt_rev - cum_revenue
    summary["regret_checkpoints"] = {
        str(t): records[t - 1].cum_regret for t in _checkpoints(horizon) if t <= len(records)
    }
    summary["oracle_gap"] = _oracle_gap(instance, dist, opt_rev)
    return RunResult(records, summary)


def run_adversarial(cfg: ExperimentConfig, seed: int, horizon: int | None = None) -> RunResult:
    """One adversarial trial: oblivious type sequence, FTPL learner, regret
    vs. the family's best fixed curve in hindsight.

    Also verifies, round by round, that the chosen curve's reward equals its
    realized payment, and that the be-the-leader inequality holds at every
    prefix against a fixed set of randomly drawn comparator curves.
    """
    if cfg.setting.kind != "adversarial":
        raise ValueError("config does not describe an adversarial setting")
    horizon = cfg.run.horizon if horizon is None else horizon
    instance, space, amounts, payments = _prepare(cfg, horizon)
    env_rng, learner_rng = _rng_pair(seed)
    # The sequence is fixed up front from the environment stream: the
    # adversary is oblivious by construction (no learner state exists yet).
    seq_seed = int(env_rng.integers(0, 2**63 - 1))
    types = adversary_sequence(cfg.setting.sequence, horizon, instance.m, seq_seed)

    theta = (
        default_theta(space.count, instance.m, max(horizon, 1))
        if cfg.setting.theta is None
        else cfg.setting.theta
    )
    learner = FtplLearner(amounts, payments, theta, learner_rng)
    first_choice = learner.select()

    n_comp = min(BTL_COMPARATORS, space.count)
    comparators = learner_rng.choice(space.count, size=n_comp, replace=False)
    comparator_sums = np.zeros(n_comp)
    leader_sum = 0.0
    feedback_identity_ok = True
    btl_ok = True

    hindsight = np.zeros(space.count)
    records: list[RoundRecord] = []
    cum_revenue = 0.0
    for t in range(1, horizon + 1):
        buyer = int(types[t - 1])
        curve_idx = learner.select()
        amount = int(amounts[curve_idx, buyer])
        payment = float(payments[curve_idx, buyer])
        feedback = buyer if amount > 0 else None
        rewards = learner.update(curve_idx, feedback)
        if rewards[curve_idx] != payment:
            feedback_identity_ok = False
        next_choice = learner.select()  # hindsight leader after round t
        leader_sum += float(rewards[next_choice])
        comparator_sums += rewards[comparators]
        baseline = leader_sum + learner.perturbations[first_choice] + BTL_SLACK
        if np.any(comparator_sums + learner.perturbations[comparators] > baseline):
            btl_ok = False
        hindsight_best = _kernels.add_column_max(hindsight, payments, buyer)
        cum_revenue += payment
        records.append(
            RoundRecord(
                t=t,
                curve_idx=curve_idx,
                buyer_type=buyer,
                amount=amount,
                payment=payment,
                feedback=feedback,
                cum_revenue=cum_revenue,
                cum_regret=hindsight_best - cum_revenue,
            )
        )

    benchmark_total = hindsight_best if horizon else 0.0
    summary = _summary_base(
        cfg,
        "adversarial",
        seed,
        horizon,
        space,
        {"kind": "best_fixed_in_family_hindsight", "total_revenue": benchmark_total},
    )
    summary["theta"] = theta
    summary["total_revenue"] = cum_revenue
    summary["final_regret"] = benchmark_total - cum_revenue
    summary["regret_checkpoints"] = {
        str(t): records[t - 1].cum_regret for t in _checkpoints(horizon) if t <= len(records)
    }
    summary["checks"] = {
        "reward_equals_realized_payment": feedback_identity_ok,
        "be_the_leader_prefixes": btl_ok,
        "comparators_checked": int(n_comp),
    }
    return RunResult(records, summary)


def run_trial(cfg: ExperimentConfig, seed: int, horizon: int | None = None) -> RunResult:
    if cfg.setting.kind == "stochastic":
        return run_stochastic(cfg, seed, horizon)
    return run_adversarial(cfg, seed, horizon)


def write_outputs(result: RunResult, out_dir: str | Path, seed: int) -> tuple[Path, Path]:
    """Write ``trace_<seed>.csv`` and ``summary_<seed>.json``.

    Floats are serialized with ``repr`` (shortest round-trip), so identical
    runs produce byte-identical files and the regret column can be
    re-derived exactly from the parsed trace.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / f"trace_{seed}.csv"
    summary_path = out / f"summary_{seed}.json"
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for r in result.records:
            writer.writerow(
                [
                    r.t,
                    r.curve_idx,
                    r.buyer_type,
                    r.amount,
                    repr(r.payment),
                    "" if r.feedback is None else r.feedback,
                    repr(r.cum_revenue),
                    repr(r.cum_regret),
                ]
            )
    with open(summary_path, "w") as fh:
        json.dump(result.summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return trace_path, summary_path


def read_trace(path: str | Path) -> list[RoundRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ValueError(f"unexpected trace header in {path}")
        for row in reader:
            records.append(
                RoundRecord(
                    t=int(row["t"]),
                    curve_idx=int(row["curve_idx"]),
                    buyer_type=int(row["buyer_type"]),
                    amount=int(row["amount"]),
                    payment=float(row["payment"]),
                    feedback=None if row["feedback"] == "" else int(row["feedback"]),
                    cum_revenue=float(row["cum_revenue"]),
                    cum_regret=float(row["cum_regret"]),
                )
            )
    return records


def run_sweep(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> list[dict]:
    """Run every (horizon, seed) pair in the config; optionally write the
    per-trial outputs plus an aggregated ``sweep.csv``."""
    rows = []
    for horizon in cfg.run.horizons:
        finals = []
        for seed in cfg.run.seeds:
            result = run_trial(cfg, seed, horizon)
            if out_dir is not None:
                write_outputs(result, Path(out_dir) / f"T{horizon}", seed)
            rows.append(
                {
                    "horizon": horizon,
                    "seed": seed,
                    "space_size": result.summary["space_size"],
                    "total_revenue": result.summary["total_revenue"],
                    "final_regret": result.summary["final_regret"],
                }
            )
            finals.append(result.summary["final_regret"])
        rows.append(
            {
                "horizon": horizon,
                "seed": "mean",
                "space_size": rows[-1]["space_size"],
                "total_revenue": "",
                "final_regret": float(np.mean(finals)),
            }
        )
    if out_dir is not None:
        sweep_path = Path(out_dir) / "sweep.csv"
        with open(sweep_path, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["horizon", "seed", "space_size", "total_revenue", "final_regret"]
            )
            writer.writeheader()
            for row in rows:
                writer.writerow(
                    {
                        k: (repr(v) if isinstance(v, float) else v)
                        for k, v in row.items()
                    }
                )
    return rows
