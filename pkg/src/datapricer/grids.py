"""Grid construction for approximate revenue maximization.

Three schemes assemble a finite family of step price curves guaranteed to
contain a curve whose expected revenue is within O(eps) of the optimum over
all non-decreasing price curves:

* ``monotone``    -- geometric value bands over [eps, ~1], every amount in
                     1..N available as a boundary.
* ``smooth``      -- same value grid, boundaries restricted to multiples of
                     ``floor(eps * N / (m * L))`` when valuation increments
                     are bounded by L/N per unit.
* ``diminishing`` -- value bands starting one band higher, boundaries dense
                     up to ``2*J*m/eps^2`` and geometric beyond, when the
                     increment at amount n is bounded by J/n.

The value grid is built from bands ``Z_i = eps * (1 + eps)^i``: band i holds
``Z_{i-1} * (1 + eps*k/m)`` for ``k = 1..ceil((2+eps)*m)``. Ceilings and
floors of float expressions are nudged by 1e-12 before rounding so that grid
sizes are deterministic across platforms when the argument is mathematically
an exact integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from . import _kernels, steps
from .market import MarketInstance, StepCurve

SCHEMES = ("monotone", "smooth", "diminishing")

DEFAULT_CAP = 10_000_000

_NUDGE = 1e-12


class DegenerateGridError(ValueError):
    """Raised when a scheme's grid resolution collapses to nothing."""


def _ceil(x: float) -> int:
    return math.ceil(x - _NUDGE)


def _floor(x: float) -> int:
    return math.floor(x + _NUDGE)


def _round15(x: float) -> float:
    # Dedup key: exact equality after rounding to 15 significant digits.
    return float(f"{x:.15g}")


def band_count(epsilon: float) -> int:
    """Index of the last value band: ceil(log_{1+eps}(1/eps))."""
    return _ceil(math.log(1.0 / epsilon) / math.log1p(epsilon))


def build_value_grid(epsilon: float, m: int, start_band: int = 1) -> np.ndarray:
    """Sorted, deduplicated price levels of all bands from ``start_band`` up.

    Every level is strictly above ``epsilon`` (the smallest is
    ``eps * (1 + eps/m)``); the largest is about ``(1 + eps)^2``, i.e. levels
    above 1 exist and simply never sell against values in [0, 1].
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    last = band_count(epsilon)
    if start_band > last:
        raise DegenerateGridError(
            f"no value bands: start band {start_band} exceeds last band {last} "
            f"at epsilon={epsilon}"
        )
    per_band = _ceil((2.0 + epsilon) * m)
    out: set[float] = set()
    for i in range(start_band, last + 1):
        base = epsilon * (1.0 + epsilon) ** (i - 1)
        for k in range(1, per_band + 1):
            out.add(_round15(base * (1.0 + epsilon * k / m)))
    return np.array(sorted(out))


def smooth_data_grid(epsilon: float, m: int, smoothness: float, n_total: int) -> np.ndarray:
    """Boundary amounts for the smooth scheme: multiples of
    ``delta = floor(eps*N/(m*L))`` up to a final entry clamped to N.
    """
    if smoothness <= 0.0:
        raise ValueError(f"smoothness constant must be positive, got {smoothness}")
    delta = _floor(epsilon * n_total / (m * smoothness))
    if delta < 1:
        raise DegenerateGridError(
            f"data resolution too fine: floor(eps*N/(m*L)) = 0 for eps={epsilon}, "
            f"N={n_total}, m={m}, L={smoothness}"
        )
    grid = delta * np.arange(1, _ceil(n_total / delta) + 1, dtype=np.int64)
    grid[-1] = min(int(grid[-1]), n_total)
    return grid


def diminishing_data_grid(
    epsilon: float, m: int, diminishing: float, n_total: int
) -> np.ndarray:
    """Boundary amounts for the diminishing-returns scheme.

    Dense prefix ``1..floor(2*J*m/eps^2)``, then geometric blocks with ratio
    ``1 + eps^2`` each split into ``floor(2*J*m)`` even parts, clamped to N
    with N always included. When the dense prefix already covers N the grid
    is simply all of 1..N.
    """
    if diminishing <= 0.0:
        raise ValueError(f"diminishing constant must be positive, got {diminishing}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    base = 2.0 * diminishing * m / epsilon**2
    if base >= n_total:
        return np.arange(1, n_total + 1, dtype=np.int64)
    entries = set(range(1, _floor(base) + 1))
    blocks = _ceil(math.log(n_total / base) / math.log1p(epsilon**2))
    subdivisions = _floor(2.0 * diminishing * m)
    for i in range(0, blocks + 1):
        anchor = _floor(base * (1.0 + epsilon**2) ** i)
        for k in range(0, subdivisions + 1):
            entry = _floor(anchor + anchor * epsilon**2 * k / (2.0 * diminishing * m))
            if 1 <= entry <= n_total:
                entries.add(entry)
    entries.add(n_total)
    return np.array(sorted(entries), dtype=np.int64)


def monotone_count_bound(epsilon: float, m: int, n_total: int) -> float:
    """Closed-form upper bound on the monotone family size:
    ``(e(N-1)/m)^m * (e * ceil(2+eps) * ceil(log_{1+eps}(1/eps)))^m``.
    Returns ``inf`` when the float computation overflows (too large to
    represent); the exact count from :func:`steps.count_m_steps` is still
    available in that case.
    """
    try:
        left = (math.e * (n_total - 1) / m) ** m
        right = (math.e * _ceil(2.0 + epsilon) * band_count(epsilon)) ** m
        return left * right
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class GridParams:
    """Inputs shared by the three schemes."""

    epsilon: float
    m: int
    n_total: int
    smoothness: float | None = None
    diminishing: float | None = None

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.m < 1 or self.n_total < 1:
            raise ValueError("m and n_total must be >= 1")
        if self.smoothness is not None and self.smoothness <= 0.0:
            raise ValueError("smoothness constant must be positive when given")
        if self.diminishing is not None and self.diminishing <= 0.0:
            raise ValueError("diminishing constant must be positive when given")


@dataclass(frozen=True)
class PriceSpace:
    """An enumerable family of step curves over (data grid x value grid).

    Curves are indexed by enumeration position (see :mod:`datapricer.steps`);
    the family is never materialized unless demand tables are requested, and
    materialization is refused above ``cap``.
    """

    scheme: str
    n_total: int
    max_steps: int
    data_grid: np.ndarray
    value_grid: np.ndarray
    epsilon: float
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        dg = np.ascontiguousarray(self.data_grid, dtype=np.int64)
        vg = np.ascontiguousarray(self.value_grid, dtype=np.float64)
        if int(dg[-1]) != self.n_total:
            raise ValueError("data grid must end at n_total")
        dg.setflags(write=False)
        vg.setflags(write=False)
        object.__setattr__(self, "data_grid", dg)
        object.__setattr__(self, "value_grid", vg)

    @cached_property
    def count(self) -> int:
        return steps.count_m_steps(self.data_grid, self.value_grid, self.max_steps)

    def check_cap(self):
        if self.count > self.cap:
            raise steps.CapExceededError(self.count, self.cap)

    def curves(self) -> Iterator[StepCurve]:
        return steps.enumerate_m_steps(self.data_grid, self.value_grid, self.max_steps)

    def curve_at(self, index: int) -> StepCurve:
        return steps.curve_at(self.data_grid, self.value_grid, self.max_steps, index)


def build_space(
    params: GridParams,
    scheme: str,
    prune_above: float | None = None,
    cap: int = DEFAULT_CAP,
) -> PriceSpace:
    """Assemble the price family for ``scheme``.

    ``prune_above`` drops value-grid levels strictly above the given number
    (normally the largest valuation in the instance). A price above every
    valuation sells to nobody, and because step values increase, dropping
    such levels truncates curves to equal-or-better counterparts that are
    still in the family, so the achievable revenue of the family does not
    shrink. At least one level is always kept.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {SCHEMES}")
    if scheme == "monotone":
        data_grid = np.arange(1, params.n_total + 1, dtype=np.int64)
        value_grid = build_value_grid(params.epsilon, params.m, start_band=1)
    elif scheme == "smooth":
        if params.smoothness is None:
            raise ValueError("smooth scheme requires the smoothness constant")
        data_grid = smooth_data_grid(
            params.epsilon, params.m, params.smoothness, params.n_total
        )
        value_grid = build_value_grid(params.epsilon, params.m, start_band=1)
    else:
        if params.diminishing is None:
            raise ValueError("diminishing scheme requires the diminishing constant")
        data_grid = diminishing_data_grid(
            params.epsilon, params.m, params.diminishing, params.n_total
        )
        value_grid = build_value_grid(params.epsilon, params.m, start_band=2)
    if prune_above is not None:
        kept = value_grid[value_grid <= prune_above]
        value_grid = kept if kept.size else value_grid[:1]
    return PriceSpace(
        scheme=scheme,
        n_total=params.n_total,
        max_steps=params.m,
        data_grid=data_grid,
        value_grid=value_grid,
        epsilon=params.epsilon,
        cap=cap,
    )


def space_demand_tables(
    space: PriceSpace, instance: MarketInstance
) -> tuple[np.ndarray, np.ndarray]:
    """(amounts, payments) arrays [count, m] for every curve in the space,
    in enumeration order. Refused above the space's cap."""
    if instance.n_total != space.n_total:
        raise ValueError(
            f"instance over 0..{instance.n_total} does not match space over "
            f"0..{space.n_total}"
        )
    space.check_cap()
    bounds, values, ks = steps.materialize(
        space.data_grid, space.value_grid, space.max_steps, cap=space.cap
    )
    return _kernels.demand_tables(bounds, values, ks, instance.value_matrix)
