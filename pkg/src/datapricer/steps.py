"""Step-curve algebra: collapsing a dense non-decreasing price curve to a
revenue-preserving curve with at most m steps, and enumerating/counting all
step curves over a (data grid, value grid) pair.

Enumeration order is fixed and documented because learners and optimizers
index curves by position: step count ascending, then interior-boundary
combinations in lexicographic order over the sorted data grid, then value
combinations in lexicographic order over the sorted value grid. The final
boundary is always N (the largest data-grid entry), so a k-step curve is a
choice of k-1 interior boundaries plus k strictly increasing values.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterator

import numpy as np

from . import _kernels
from .market import MarketInstance, StepCurve


class CapExceededError(RuntimeError):
    """Raised when a price family is too large to enumerate or materialize."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"price family holds {count} curves, above the configured cap of {cap}"
        )
        self.count = count
        self.cap = cap


def _dense_demand(values: np.ndarray, prices: np.ndarray) -> int:
    # Demand under an arbitrary dense price vector: largest maximizer of
    # value - price over amounts 1..N, or 0 if every utility is negative.
    util = values[1:] - prices[1:]
    j = util.size - 1 - int(np.argmax(util[::-1]))
    if util[j] < 0.0:
        return 0
    return j + 1


def m_step_reduce(prices: np.ndarray, instance: MarketInstance) -> StepCurve:
    """Collapse a dense non-decreasing price curve onto the instance's demand
    points, yielding a curve with at most m steps and no less expected
    revenue under any type distribution.

    The construction places one step per distinct positive demand point,
    carrying the original price there, and extends the final level to N.
    Each type then purchases either its old demand point (same payment) or N
    (paying the top level, which is at least its old payment). Types with
    demand 0 contribute no step; duplicate demand points and repeated price
    levels are merged.
    """
    p = np.ascontiguousarray(prices, dtype=np.float64)
    if p.ndim != 1 or p.size != instance.n_total + 1:
        raise ValueError(
            f"dense curve must have {instance.n_total + 1} entries, got shape {p.shape}"
        )
    if p[0] != 0.0:
        raise ValueError("dense price curve must have price 0 at amount 0")
    if np.any(p < 0.0):
        raise ValueError("dense price curve must be non-negative")
    if np.any(np.diff(p) < 0.0):
        raise ValueError("reduction requires a non-decreasing price curve")

    demands = sorted(
        {d for v in instance.valuations if (d := _dense_demand(v.values, p)) > 0}
    )
    n_total = instance.n_total
    if not demands:
        return StepCurve.zero(n_total)

    bounds = demands[:-1] + [n_total]
    levels = [float(p[d]) for d in demands]
    out_bounds: list[int] = []
    out_levels: list[float] = []
    for b, lv in zip(bounds, levels):
        if out_levels and lv == out_levels[-1]:
            out_bounds[-1] = b  # same level: keep the later boundary
        else:
            out_bounds.append(b)
            out_levels.append(lv)
    return StepCurve(np.array(out_bounds), np.array(out_levels))


def _check_grids(data_grid: np.ndarray, value_grid: np.ndarray):
    dg = np.ascontiguousarray(data_grid, dtype=np.int64)
    vg = np.ascontiguousarray(value_grid, dtype=np.float64)
    if dg.size == 0 or vg.size == 0:
        raise ValueError("data and value grids must be non-empty")
    if dg[0] < 1 or np.any(np.diff(dg) <= 0):
        raise ValueError("data grid must be sorted, deduplicated amounts >= 1")
    if np.any(np.diff(vg) <= 0):
        raise ValueError("value grid must be sorted and deduplicated")
    if np.any(vg < 0.0):
        raise ValueError("value grid must be non-negative")
    return dg, vg


def count_m_steps(data_grid, value_grid, max_steps: int) -> int:
    """Exact number of step curves over the grids with 1..max_steps steps.

    Exactly matches the cardinality of :func:`enumerate_m_steps`. Python
    integers are unbounded, so the count never overflows; astronomically
    large families are reported exactly.
    """
    dg, vg = _check_grids(data_grid, value_grid)
    interior = dg.size - 1
    return sum(comb(interior, k - 1) * comb(vg.size, k) for k in range(1, max_steps + 1))


def enumerate_m_steps(data_grid, value_grid, max_steps: int) -> Iterator[StepCurve]:
    """Yield every step curve over the grids, lazily, in enumeration order.

    The final boundary is the largest data-grid entry (N); interior
    boundaries come from the rest of the data grid and values from the value
    grid, strictly increasing.
    """
    dg, vg = _check_grids(data_grid, value_grid)
    n_total = int(dg[-1])
    interior = dg[:-1]
    for k in range(1, max_steps + 1):
        if k - 1 > interior.size or k > vg.size:
            continue
        for bs in combinations(interior.tolist(), k - 1):
            for vs in combinations(vg.tolist(), k):
                yield StepCurve(np.array(bs + (n_total,)), np.array(vs))


def _unrank_combination(n: int, r: int, rank: int) -> list[int]:
    # Lexicographic unranking of an r-subset of range(n).
    out = []
    x = 0
    for slot in range(r):
        while True:
            block = comb(n - x - 1, r - slot - 1)
            if rank < block:
                break
            rank -= block
            x += 1
        out.append(x)
        x += 1
    return out


def curve_at(data_grid, value_grid, max_steps: int, index: int) -> StepCurve:
    """The curve at ``index`` in enumeration order, without streaming to it."""
    dg, vg = _check_grids(data_grid, value_grid)
    n_total = int(dg[-1])
    interior = dg[:-1]
    if index < 0:
        raise IndexError(index)
    for k in range(1, max_steps + 1):
        n_bounds = comb(interior.size, k - 1)
        n_values = comb(vg.size, k)
        block = n_bounds * n_values
        if index < block:
            b_rank, v_rank = divmod(index, n_values)
            b_idx = _unrank_combination(interior.size, k - 1, b_rank)
            v_idx = _unrank_combination(vg.size, k, v_rank)
            bounds = np.append(interior[b_idx], n_total)
            return StepCurve(bounds, vg[v_idx])
        index -= block
    raise IndexError("curve index beyond the family size")


def materialize(
    data_grid, value_grid, max_steps: int, cap: int = 10_000_000
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Padded (boundaries, values, step-count) arrays for the whole family,
    in enumeration order. Raises :class:`CapExceededError` above ``cap``.
    """
    dg, vg = _check_grids(data_grid, value_grid)
    total = count_m_steps(dg, vg, max_steps)
    if total > cap:
        raise CapExceededError(total, cap)
    return _kernels.fill_curves(dg[:-1], vg, max_steps, int(dg[-1]), total)
