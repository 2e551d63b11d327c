"""Valuation generators and measured smoothness / diminishing constants."""

import numpy as np
import pytest

from datapricer.market import ValuationCurve
from datapricer.valuations import (
    PowerLawSpec,
    measure_constants,
    measure_instance_constants,
    power_law_curve,
    random_monotone_curve,
)


def test_power_law_known_values():
    curve = power_law_curve(PowerLawSpec(1.0, 1.0, 0.5), 4)
    expected = [0.0, 0.0, 1 - 2**-0.5, 1 - 3**-0.5, 0.5]
    assert np.allclose(curve.values, expected, atol=1e-12)
    assert np.allclose(np.round(curve.values, 4), [0.0, 0.0, 0.2929, 0.4226, 0.5])


def test_power_law_zero_beta_is_constant():
    curve = power_law_curve(PowerLawSpec(0.7, 0.0, 0.5), 6)
    assert np.array_equal(curve.values[1:], np.full(6, 0.7))


def test_power_law_always_valid_curve():
    rng = np.random.default_rng(0)
    for _ in range(50):
        spec = PowerLawSpec(
            alpha=float(rng.uniform(0.01, 1.0)),
            beta=float(rng.uniform(0.0, 2.0)),
            gamma=float(rng.uniform(0.01, 1.0)),
        )
        curve = power_law_curve(spec, int(rng.integers(1, 40)))
        assert isinstance(curve, ValuationCurve)  # invariants checked on build


def test_power_law_spec_validation():
    with pytest.raises(ValueError):
        PowerLawSpec(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        PowerLawSpec(0.5, -1.0, 0.5)
    with pytest.raises(ValueError):
        PowerLawSpec(0.5, 1.0, 1.5)
    with pytest.raises(ValueError):
        power_law_curve(PowerLawSpec(0.5, 0.1, 0.5), 0)


def test_random_monotone_deterministic_and_valid():
    a = random_monotone_curve(123, 25, 5)
    b = random_monotone_curve(123, 25, 5)
    assert np.array_equal(a.values, b.values)
    c = random_monotone_curve(124, 25, 5)
    assert not np.array_equal(a.values, c.values)


def test_random_monotone_single_knot_constant():
    curve = random_monotone_curve(7, 12, 1)
    assert np.all(curve.values[1:] == curve.values[1])


def test_measured_constants_linear_curve():
    n = 20
    curve = ValuationCurve(np.arange(n + 1) / n)
    l_hat, j_hat = measure_constants(curve)
    assert l_hat == pytest.approx(1.0, abs=1e-12)
    assert j_hat == pytest.approx((n - 1) / n, abs=1e-12)


def test_measured_constants_constant_after_one():
    curve = ValuationCurve(np.array([0.0, 0.6, 0.6, 0.6]))
    l_hat, j_hat = measure_constants(curve)
    assert l_hat == pytest.approx(3 * 0.6)
    assert j_hat == 0.0


def test_power_law_diminishing_constant_below_beta_gamma():
    # the family satisfies the increment bound with constant beta*gamma
    for beta, gamma in [(1.0, 0.5), (0.5, 0.9), (2.0, 0.3)]:
        curve = power_law_curve(PowerLawSpec(1.0, beta, gamma), 50)
        _, j_hat = measure_constants(curve)
        assert j_hat <= beta * gamma + 1e-12


def test_power_law_increment_bound_holds_pointwise():
    spec = PowerLawSpec(1.0, 1.0, 0.5)
    curve = power_law_curve(spec, 60)
    j = spec.beta * spec.gamma
    diffs = np.diff(curve.values)
    for n in range(1, 60):
        assert diffs[n] <= j / n + 1e-12


def test_smoothness_constant_is_tight():
    rng = np.random.default_rng(1)
    for _ in range(30):
        curve = random_monotone_curve(int(rng.integers(0, 2**31)), 15, 4)
        n = curve.n_total
        l_hat, _ = measure_constants(curve)
        diffs = np.diff(curve.values)
        # holds at l_hat for every span
        for start in range(n):
            for width in range(1, n - start + 1):
                gap = curve.values[start + width] - curve.values[start]
                assert gap <= (l_hat / n) * width + 1e-12
        # fails for l_hat - 1e-9 whenever the curve moves at all
        if diffs.max() > 0:
            worst = int(np.argmax(diffs))
            gap = curve.values[worst + 1] - curve.values[worst]
            assert gap > ((l_hat - 1e-9) / n) * 1


def test_instance_constants_take_max():
    a = ValuationCurve(np.array([0.0, 0.2, 0.4]))
    b = ValuationCurve(np.array([0.0, 0.7, 0.7]))
    l_hat, j_hat = measure_instance_constants([a, b])
    assert l_hat == pytest.approx(1.4)
    assert j_hat == pytest.approx(0.2)
