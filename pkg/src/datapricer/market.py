"""Core market semantics: valuation curves, step price curves, buyer demand,
purchase sets, and expected revenue.

Conventions used throughout the package:

* Amounts are exact integers in ``0..N``; values and prices are float64.
* Utility comparisons are exact floating-point ``>=`` / ``>`` with no
  tolerance. A buyer purchases whenever her best achievable utility is
  non-negative, and ties in utility resolve to the **largest** amount.
* A step curve prices amount ``n >= 1`` at the value of the first step whose
  boundary is ``>= n`` (steps are right-closed); ``price(0) = 0``.
* Step values may exceed 1 (value grids produce levels up to roughly
  ``(1+eps)^2``); such steps simply never sell against values in [0, 1].

All types are immutable after construction and every operation is a pure
function, so evaluation can be parallelized over prices or types freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ValuationCurve:
    """A buyer type's value for each amount of data.

    ``values[n]`` is the value of holding ``n`` units for ``n = 0..N``.
    Values start at 0, are non-decreasing, and lie in [0, 1].
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("valuation curve needs values for amounts 0..N with N >= 1")
        if vals[0] != 0.0:
            raise ValueError("value at amount 0 must be exactly 0")
        if np.any(np.diff(vals) < 0.0):
            raise ValueError("valuation curve must be non-decreasing")
        if vals[-1] > 1.0:
            raise ValueError("valuation values must lie in [0, 1]")
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def n_total(self) -> int:
        return self.values.size - 1

    def __call__(self, amount: int) -> float:
        return float(self.values[amount])


@dataclass(frozen=True)
class StepCurve:
    """A non-decreasing step price curve over amounts ``1..N``.

    ``boundaries`` are strictly increasing amounts whose last entry is ``N``;
    ``values`` are the strictly increasing price levels (one per step, so a
    k-step curve has exactly k distinct levels). ``price_at(n)`` for
    ``n >= 1`` is the value of the first step whose boundary is ``>= n``;
    ``price_at(0) = 0``.
    """

    boundaries: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bounds = np.ascontiguousarray(self.boundaries, dtype=np.int64)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if bounds.ndim != 1 or vals.ndim != 1 or bounds.size != vals.size:
            raise ValueError("boundaries and values must be 1-d and equally sized")
        if bounds.size == 0:
            raise ValueError("a step curve needs at least one step")
        if bounds[0] < 1:
            raise ValueError("step boundaries must be amounts >= 1")
        if np.any(np.diff(bounds) <= 0):
            raise ValueError("step boundaries must be strictly increasing")
        if np.any(vals < 0.0):
            raise ValueError("step values must be non-negative")
        if np.any(np.diff(vals) <= 0.0):
            raise ValueError("step values must be strictly increasing")
        object.__setattr__(self, "boundaries", _frozen(bounds))
        object.__setattr__(self, "values", _frozen(vals))

    @classmethod
    def zero(cls, n_total: int) -> "StepCurve":
        """The free-giveaway curve: price 0 for every amount."""
        return cls(np.array([n_total]), np.array([0.0]))

    @classmethod
    def flat(cls, n_total: int, value: float) -> "StepCurve":
        return cls(np.array([n_total]), np.array([float(value)]))

    @property
    def n_total(self) -> int:
        return int(self.boundaries[-1])

    @property
    def n_steps(self) -> int:
        return self.boundaries.size

    def price_at(self, amount: int) -> float:
        if amount == 0:
            return 0.0
        if amount < 0 or amount > self.n_total:
            raise ValueError(f"amount {amount} outside 0..{self.n_total}")
        j = int(np.searchsorted(self.boundaries, amount, side="left"))
        return float(self.values[j])

    def as_dense(self) -> np.ndarray:
        """Dense price vector of length N+1 (index = amount)."""
        out = np.zeros(self.n_total + 1)
        lo = 1
        for b, v in zip(self.boundaries, self.values):
            out[lo : int(b) + 1] = v
            lo = int(b) + 1
        return out


@dataclass(frozen=True)
class TypeDistribution:
    """Probability weights over the buyer types."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-d sequence")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {w.sum()!r}")
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def uniform(cls, m: int) -> "TypeDistribution":
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def point_mass(cls, m: int, index: int) -> "TypeDistribution":
        w = np.zeros(m)
        w[index] = 1.0
        return cls(w)

    @property
    def m(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class MarketInstance:
    """A market: N units for sale and m buyer types with known valuations.

    ``smoothness`` bounds valuation increments by ``smoothness / N`` per unit;
    ``diminishing`` bounds the increment at amount n by ``diminishing / n``.
    Both are optional and only needed by the grid schemes that use them.
    """

    n_total: int
    valuations: tuple[ValuationCurve, ...]
    smoothness: float | None = None
    diminishing: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "valuations", tuple(self.valuations))
        if self.n_total < 1:
            raise ValueError("n_total must be >= 1")
        if not self.valuations:
            raise ValueError("at least one buyer type is required")
        for v in self.valuations:
            if v.n_total != self.n_total:
                raise ValueError(
                    f"valuation curve over 0..{v.n_total} does not match N={self.n_total}"
                )

    @property
    def m(self) -> int:
        return len(self.valuations)

    @cached_property
    def value_matrix(self) -> np.ndarray:
        """float64 matrix [m, N+1] of all valuation curves."""
        return _frozen(np.stack([v.values for v in self.valuations]))

    def max_value(self) -> float:
        return float(max(v.values[-1] for v in self.valuations))


def buyer_demand(valuation: ValuationCurve, price: StepCurve) -> int:
    """Amount a buyer with ``valuation`` purchases at ``price``.

    Returns 0 when no amount gives non-negative utility, otherwise the
    largest utility-maximizing amount. Only step boundaries are examined:
    within a step the price is constant and the valuation non-decreasing, so
    the in-step maximizer (and the largest one) is the boundary itself.
    """
    if valuation.n_total != price.n_total:
        raise ValueError(
            f"valuation over 0..{valuation.n_total} does not match price over "
            f"0..{price.n_total}"
        )
    utilities = valuation.values[price.boundaries] - price.values
    # np.argmax takes the first maximum; reversing makes that the largest amount.
    j = price.n_steps - 1 - int(np.argmax(utilities[::-1]))
    if utilities[j] < 0.0:
        return 0
    return int(price.boundaries[j])


def purchase_set(instance: MarketInstance, price: StepCurve) -> frozenset[int]:
    """Type indices that would purchase (achieve utility >= 0) at ``price``."""
    return frozenset(
        i for i, v in enumerate(instance.valuations) if buyer_demand(v, price) > 0
    )


def expected_revenue(
    instance: MarketInstance, dist: TypeDistribution, price: StepCurve
) -> float:
    """Expected per-round revenue: sum of weight_i * price(demand_i)."""
    if dist.m != instance.m:
        raise ValueError(f"distribution over {dist.m} types, instance has {instance.m}")
    total = 0.0
    for i, v in enumerate(instance.valuations):
        total += float(dist.weights[i]) * price.price_at(buyer_demand(v, price))
    return total


def pad_curves(
    prices: Sequence[StepCurve], n_total: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pack step curves into padded (boundaries, values, step-count) arrays."""
    n = len(prices)
    width = max((p.n_steps for p in prices), default=1)
    bounds = np.zeros((n, width), dtype=np.int64)
    values = np.full((n, width), _kernels.PAD_VALUE, dtype=np.float64)
    steps = np.zeros(n, dtype=np.int64)
    for row, p in enumerate(prices):
        if p.n_total != n_total:
            raise ValueError(f"price curve over 0..{p.n_total} does not match N={n_total}")
        k = p.n_steps
        bounds[row, :k] = p.boundaries
        values[row, :k] = p.values
        steps[row] = k
    return bounds, values, steps


def demand_matrix(
    instance: MarketInstance, prices: Sequence[StepCurve]
) -> tuple[np.ndarray, np.ndarray]:
    """Demand of every type at every price, as two [n_prices, m] arrays.

    Returns ``(amounts, payments)`` with ``amounts[c, i]`` the amount type i
    purchases at curve c and ``payments[c, i]`` the resulting payment. This
    is the precomputation both online learners run on: per-round work becomes
    O(n_prices * m) instead of O(n_prices * N).
    """
    if not prices:
        return (
            np.zeros((0, instance.m), dtype=np.int64),
            np.zeros((0, instance.m), dtype=np.float64),
        )
    bounds, values, steps = pad_curves(prices, instance.n_total)
    return _kernels.demand_tables(bounds, values, steps, instance.value_matrix)
