"""Shared test helpers: random instance generators and independent oracles.

The oracles here deliberately re-derive results by exhaustive enumeration
over all amounts 0..N, independent of the library's step-structure
shortcuts, so they can certify those shortcuts.
"""

from __future__ import annotations

import numpy as np

from datapricer.market import MarketInstance, StepCurve, TypeDistribution
from datapricer.valuations import random_monotone_curve


def make_instance(rng: np.random.Generator, n_total: int, m: int) -> MarketInstance:
    curves = tuple(
        random_monotone_curve(int(rng.integers(0, 2**31)), n_total, int(rng.integers(1, 7)))
        for _ in range(m)
    )
    return MarketInstance(n_total=n_total, valuations=curves)


def make_weights(rng: np.random.Generator, m: int) -> TypeDistribution:
    raw = rng.uniform(0.05, 1.0, size=m)
    w = raw / raw.sum()
    w[-1] = 1.0 - w[:-1].sum()  # make the sum exactly 1.0 in floats
    return TypeDistribution(w)


def make_step_curve(rng: np.random.Generator, n_total: int, max_steps: int = 4) -> StepCurve:
    k = int(rng.integers(1, max_steps + 1))
    k = min(k, n_total)
    interior = sorted(rng.choice(np.arange(1, n_total), size=k - 1, replace=False).tolist())
    bounds = np.array(interior + [n_total], dtype=np.int64)
    values = np.sort(rng.uniform(0.0, 1.2, size=k))
    while np.any(np.diff(values) <= 0):  # enforce strictly increasing levels
        values = np.sort(rng.uniform(0.0, 1.2, size=k))
    return StepCurve(bounds, values)


def dense_prices(curve: StepCurve) -> np.ndarray:
    """Dense price vector by the literal rule: price(n) is the value of the
    first step whose boundary is >= n; price(0) = 0."""
    n_total = curve.n_total
    out = np.zeros(n_total + 1)
    for n in range(1, n_total + 1):
        for b, v in zip(curve.boundaries, curve.values):
            if b >= n:
                out[n] = v
                break
    return out


def demand_by_enumeration(values: np.ndarray, prices: np.ndarray) -> int:
    """Independent demand oracle: scan every amount 0..N.

    Returns 0 if utility is negative at every amount >= 1, otherwise the
    largest utility-maximizing amount among 1..N.
    """
    best_u = -np.inf
    best_n = 0
    for n in range(1, len(values)):
        u = values[n] - prices[n]
        if u >= best_u:
            best_u = u
            best_n = n
    return best_n if best_u >= 0.0 else 0


def revenue_by_enumeration(
    instance: MarketInstance, weights: np.ndarray, prices: np.ndarray
) -> float:
    total = 0.0
    for i, v in enumerate(instance.valuations):
        d = demand_by_enumeration(v.values, prices)
        total += weights[i] * prices[d]
    return total


def random_dense_monotone(rng: np.random.Generator, n_total: int) -> np.ndarray:
    """A random non-decreasing dense price curve with price(0) = 0."""
    increments = rng.uniform(0.0, 1.0, size=n_total + 1)
    increments[0] = 0.0
    zero_out = rng.random(n_total + 1) < 0.5  # flat stretches are common
    increments[zero_out] = 0.0
    prices = np.cumsum(increments)
    top = prices[-1]
    if top > 0:
        prices = prices * rng.uniform(0.2, 1.2) / top
    return prices
