#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths on a mid-sized pricing problem:

* demand-table construction (family x types),
* the streaming best-revenue scan,
* the per-round weighted argmax a learner runs every round.

Usage: python benchmarks/benchmark_kernels.py [--n 60] [--m 3] [--eps 0.12]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from datapricer import _kernels
from datapricer.grids import GridParams, build_space
from datapricer.market import MarketInstance
from datapricer.steps import materialize
from datapricer.valuations import random_monotone_curve


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=60)
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--eps", type=float, default=0.12)
    parser.add_argument("--rounds", type=int, default=200)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    curves = tuple(
        random_monotone_curve(int(rng.integers(0, 2**31)), args.n, 5) for _ in range(args.m)
    )
    instance = MarketInstance(args.n, curves)
    space = build_space(GridParams(args.eps, args.m, args.n), "monotone")
    print(f"family: {space.count} curves over {space.value_grid.size} levels, m={args.m}, N={args.n}")

    bounds, values, ks = materialize(space.data_grid, space.value_grid, args.m, cap=10**8)
    weights = np.full(args.m, 1.0 / args.m)

    backends = {name: _kernels.get_kernels(name) for name in ("numba", "numpy")}
    # warm up the jit so compile time is not measured
    backends["numba"].demand_tables(bounds[:10], values[:10], ks[:10], instance.value_matrix)
    backends["numba"].scan_best(
        space.data_grid[:-1][:3], space.value_grid[:4], args.m, args.n,
        instance.value_matrix, weights,
    )

    results = {}
    for name, k in backends.items():
        t_tables = _time(lambda: k.demand_tables(bounds, values, ks, instance.value_matrix))
        t_scan = _time(
            lambda: k.scan_best(
                space.data_grid[:-1], space.value_grid, args.m, args.n,
                instance.value_matrix, weights,
            )
        )
        _, payments = k.demand_tables(bounds, values, ks, instance.value_matrix)

        def rounds():
            w = weights.copy()
            for i in range(args.rounds):
                w[0] = 0.3 + 0.4 * (i % 3) / 3
                k.argmax_weighted(payments, w)

        t_rounds = _time(rounds)
        results[name] = (t_tables, t_scan, t_rounds)

    print(f"{'kernel':<22}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for label, idx in (("demand tables", 0), ("best-revenue scan", 1),
                       (f"{args.rounds} learner rounds", 2)):
        nb, np_ = results["numba"][idx], results["numpy"][idx]
        print(f"{label:<22}{nb:>11.4f}s{np_:>11.4f}s{np_ / nb:>9.1f}x")

    # sanity: identical outputs
    a_nb, p_nb = backends["numba"].demand_tables(bounds, values, ks, instance.value_matrix)
    a_np, p_np = backends["numpy"].demand_tables(bounds, values, ks, instance.value_matrix)
    assert np.array_equal(a_nb, a_np) and np.array_equal(p_nb, p_np)
    print("outputs identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
