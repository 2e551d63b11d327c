"""Exhaustive revenue maximization: the best curve in a discretized price
family, and an independent brute-force optimum for small instances.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .grids import PriceSpace
from .market import MarketInstance, StepCurve, TypeDistribution

ORACLE_MAX_N = 15
ORACLE_MAX_TYPES = 3
DEFAULT_ORACLE_RESOLUTION = 0.01


def best_in_space(
    instance: MarketInstance, dist: TypeDistribution, space: PriceSpace
) -> tuple[StepCurve, float]:
    """Exact maximizer of expected revenue over the space's enumeration.

    Ties break to the first maximizer in enumeration order. The scan streams
    the family without materializing it; the space's cap still applies.
    """
    if dist.m != instance.m:
        raise ValueError(f"distribution over {dist.m} types, instance has {instance.m}")
    if instance.n_total != space.n_total:
        raise ValueError("instance and space disagree on the total amount")
    space.check_cap()
    rev, index, k, bounds, values = _kernels.scan_best(
        space.data_grid[:-1],
        space.value_grid,
        space.max_steps,
        space.n_total,
        instance.value_matrix,
        dist.weights,
    )
    if index < 0:
        raise RuntimeError("empty price family")
    return StepCurve(bounds[:k].copy(), values[:k].copy()), float(rev)


def oracle_value_grid(resolution: float) -> np.ndarray:
    """The oracle's fine value grid {0, r, 2r, ..., 1}."""
    if not 0.0 < resolution <= 1.0:
        raise ValueError(f"resolution must be in (0, 1], got {resolution}")
    n_levels = int(round(1.0 / resolution))
    return np.linspace(0.0, 1.0, n_levels + 1)


def brute_force_opt(
    instance: MarketInstance,
    dist: TypeDistribution,
    value_resolution: float = DEFAULT_ORACLE_RESOLUTION,
) -> tuple[StepCurve, float]:
    """Ground-truth optimum for small instances: exhaustive search over all
    non-decreasing step curves with at most m steps, boundaries anywhere in
    1..N, and values on the fine grid {0, r, ..., 1}.

    Only defined for N <= 15 and m <= 3; the search is exponential in m by
    design. Note the optimum is over non-decreasing curves; this is the
    definition of the oracle benchmark throughout the package.
    """
    if instance.n_total > ORACLE_MAX_N:
        raise ValueError(
            f"oracle limited to N <= {ORACLE_MAX_N}, got N = {instance.n_total}"
        )
    if instance.m > ORACLE_MAX_TYPES:
        raise ValueError(
            f"oracle limited to m <= {ORACLE_MAX_TYPES}, got m = {instance.m}"
        )
    if dist.m != instance.m:
        raise ValueError(f"distribution over {dist.m} types, instance has {instance.m}")
    grid = oracle_value_grid(value_resolution)
    interior = np.arange(1, instance.n_total, dtype=np.int64)
    rev, index, k, bounds, values = _kernels.scan_best(
        interior,
        grid,
        instance.m,
        instance.n_total,
        instance.value_matrix,
        dist.weights,
    )
    if index < 0:
        raise RuntimeError("oracle search produced no curve")
    return StepCurve(bounds[:k].copy(), values[:k].copy()), float(rev)
