"""Grid construction: value bands, data grids, assembled price families."""

import math

import numpy as np
import pytest

from conftest import make_weights
from datapricer.grids import (
    DegenerateGridError,
    GridParams,
    band_count,
    build_space,
    build_value_grid,
    diminishing_data_grid,
    monotone_count_bound,
    smooth_data_grid,
    space_demand_tables,
)
from datapricer.market import MarketInstance, ValuationCurve
from datapricer.offline import best_in_space, brute_force_opt
from datapricer.steps import count_m_steps
from datapricer.valuations import random_monotone_curve


# ---------------------------------------------------------------------------
# value grid
# ---------------------------------------------------------------------------


def test_value_grid_worked_example():
    # eps = 0.5, m = 1: two bands of three levels each
    grid = build_value_grid(0.5, 1)
    assert np.allclose(grid, [0.75, 1.0, 1.125, 1.25, 1.5, 1.875], atol=1e-12)
    assert grid.size == 6


def test_value_grid_size_bound():
    for eps in (0.05, 0.1, 0.2, 0.5, 0.8):
        for m in (1, 2, 3, 5):
            grid = build_value_grid(eps, m)
            assert grid.size <= math.ceil((2 + eps) * m) * band_count(eps)


def test_value_grid_levels_above_epsilon():
    for eps in (0.1, 0.3, 0.6):
        grid = build_value_grid(eps, 2)
        assert np.all(grid > eps)


def test_value_grid_band_nesting():
    for eps in (0.1, 0.25):
        full = set(build_value_grid(eps, 3, start_band=1).tolist())
        tail = set(build_value_grid(eps, 3, start_band=2).tolist())
        assert tail <= full


def test_value_grid_deterministic():
    a = build_value_grid(0.17, 3)
    b = build_value_grid(0.17, 3)
    assert a.tobytes() == b.tobytes()


def test_value_grid_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        build_value_grid(1.0, 2)
    with pytest.raises(ValueError):
        build_value_grid(0.0, 2)
    with pytest.raises(DegenerateGridError):
        build_value_grid(0.8, 2, start_band=2)  # only one band at eps=0.8


# ---------------------------------------------------------------------------
# smooth data grid
# ---------------------------------------------------------------------------


def test_smooth_grid_worked_example():
    grid = smooth_data_grid(0.1, 2, 5.0, 1000)
    assert grid[0] == 10 and grid[-1] == 1000
    assert grid.size == 100
    assert np.array_equal(grid, 10 * np.arange(1, 101))


def test_smooth_grid_single_entry_when_stride_covers_n():
    grid = smooth_data_grid(0.9, 1, 0.01, 50)  # stride floor(0.9*50/0.01) >> 50
    assert np.array_equal(grid, [50])


def test_smooth_grid_size_formula():
    for eps, m, L, n in [(0.2, 2, 0.7, 37), (0.35, 1, 1.1, 80), (0.12, 3, 0.25, 55)]:
        delta = math.floor(eps * n / (m * L) + 1e-12)
        grid = smooth_data_grid(eps, m, L, n)
        assert grid.size == math.ceil(n / delta - 1e-12)
        assert grid[-1] == n


def test_smooth_grid_degenerate_resolution():
    with pytest.raises(DegenerateGridError, match="too fine"):
        smooth_data_grid(0.01, 3, 5.0, 20)


# ---------------------------------------------------------------------------
# diminishing data grid
# ---------------------------------------------------------------------------


def test_diminishing_dense_when_prefix_covers_n():
    # 2*J*m/eps^2 = 2*0.5*2/0.04 = 50 >= 40
    grid = diminishing_data_grid(0.2, 2, 0.5, 40)
    assert np.array_equal(grid, np.arange(1, 41))


def test_diminishing_worked_example_reevaluated():
    eps, m, J, n = 0.5, 2, 0.5, 100
    grid = diminishing_data_grid(eps, m, J, n)
    # independent re-evaluation of the construction
    base = 2 * J * m / eps**2
    assert base == 8.0
    expected = set(range(1, 9))
    blocks = math.ceil(math.log(n * eps**2 / (2 * J * m)) / math.log1p(eps**2) - 1e-12)
    for i in range(blocks + 1):
        anchor = math.floor(base * (1 + eps**2) ** i + 1e-12)
        for k in range(math.floor(2 * J * m) + 1):
            entry = math.floor(anchor * (1 + eps**2 * k / (2 * J * m)) + 1e-12)
            if 1 <= entry <= n:
                expected.add(entry)
    expected.add(n)
    assert set(grid.tolist()) == expected
    assert grid[0] == 1 and grid[-1] == n


def test_diminishing_size_bound():
    # Raw construction size: the dense prefix, floor(2Jm)+1 entries per
    # geometric block over blocks+1 blocks, plus the appended N.
    rng = np.random.default_rng(11)
    for _ in range(20):
        eps = float(rng.uniform(0.1, 0.7))
        m = int(rng.integers(1, 4))
        j_const = float(rng.uniform(0.05, 2.0))
        n = int(rng.integers(20, 8000))
        grid = diminishing_data_grid(eps, m, j_const, n)
        base = 2 * j_const * m / eps**2
        if base >= n:
            assert grid.size == n
            continue
        blocks = math.ceil(math.log(n / base) / math.log1p(eps**2) - 1e-12)
        bound = math.floor(base) + (math.floor(2 * j_const * m) + 1) * (blocks + 1) + 1
        assert grid.size <= bound


def test_diminishing_deterministic():
    a = diminishing_data_grid(0.31, 2, 0.7, 500)
    b = diminishing_data_grid(0.31, 2, 0.7, 500)
    assert a.tobytes() == b.tobytes()


# ---------------------------------------------------------------------------
# assembled spaces
# ---------------------------------------------------------------------------


def test_monotone_space_flat_curves_example():
    space = build_space(GridParams(0.5, 1, 10), "monotone")
    assert space.count == 6  # one flat curve per value level
    curves = list(space.curves())
    assert all(c.n_steps == 1 for c in curves)
    assert [c.values[0] for c in curves] == sorted(build_value_grid(0.5, 1).tolist())


def test_smooth_space_no_larger_than_monotone():
    params = GridParams(0.2, 2, 60, smoothness=0.8)
    mono = build_space(params, "monotone")
    smooth = build_space(params, "smooth")
    assert smooth.count <= mono.count


def test_diminishing_space_count_matches_closed_form():
    params = GridParams(0.3, 2, 120, diminishing=0.4)
    space = build_space(params, "diminishing")
    assert space.count == count_m_steps(space.data_grid, space.value_grid, 2)
    assert space.count == sum(1 for _ in space.curves())


def test_scheme_requires_its_constant():
    with pytest.raises(ValueError, match="smoothness"):
        build_space(GridParams(0.2, 2, 30), "smooth")
    with pytest.raises(ValueError, match="diminishing"):
        build_space(GridParams(0.2, 2, 30), "diminishing")
    with pytest.raises(ValueError, match="unknown scheme"):
        build_space(GridParams(0.2, 2, 30), "linear")


def test_prune_drops_unsellable_levels_without_losing_revenue():
    rng = np.random.default_rng(4)
    curves = tuple(
        random_monotone_curve(int(rng.integers(0, 2**31)), 12, 4) for _ in range(2)
    )
    inst = MarketInstance(12, curves)
    q = make_weights(rng, 2)
    params = GridParams(0.25, 2, 12)
    full = build_space(params, "monotone")
    pruned = build_space(params, "monotone", prune_above=inst.max_value())
    assert pruned.count < full.count
    assert np.all(pruned.value_grid <= inst.max_value())
    _, rev_full = best_in_space(inst, q, full)
    _, rev_pruned = best_in_space(inst, q, pruned)
    assert rev_pruned == rev_full


def test_prune_keeps_at_least_one_level():
    space = build_space(GridParams(0.5, 1, 5), "monotone", prune_above=0.01)
    assert space.value_grid.size == 1


def test_count_bound_dominates_exact_count():
    for eps, m, n in [(0.3, 2, 25), (0.15, 3, 18), (0.5, 1, 40)]:
        space = build_space(GridParams(eps, m, n), "monotone")
        assert space.count <= monotone_count_bound(eps, m, n)


def test_desk_scale_approximation_single_instance():
    # small sanity version of the full approximation gate
    rng = np.random.default_rng(9)
    curves = tuple(
        random_monotone_curve(int(rng.integers(0, 2**31)), 10, 3) for _ in range(2)
    )
    inst = MarketInstance(10, curves)
    q = make_weights(rng, 2)
    _, oracle_rev = brute_force_opt(inst, q, 0.01)
    eps = 0.2
    space = build_space(GridParams(eps, 2, 10), "monotone")
    _, family_rev = best_in_space(inst, q, space)
    assert family_rev >= oracle_rev - 2 * eps / (1 + eps) - 0.01 - 1e-9


def test_grid_params_validation():
    with pytest.raises(ValueError):
        GridParams(1.2, 2, 10)
    with pytest.raises(ValueError):
        GridParams(0.2, 0, 10)
    with pytest.raises(ValueError):
        GridParams(0.2, 2, 10, smoothness=-1.0)


def test_space_demand_tables_requires_matching_instance():
    space = build_space(GridParams(0.4, 1, 6), "monotone")
    inst = MarketInstance(7, (ValuationCurve(np.concatenate(([0], np.linspace(0.1, 0.9, 7)))),))
    with pytest.raises(ValueError):
        space_demand_tables(space, inst)
