"""Valuation-curve generators for experiments, and measurement of the
smoothness / diminishing-returns constants a given curve satisfies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market import ValuationCurve


@dataclass(frozen=True)
class PowerLawSpec:
    """Parameters of the saturating family ``value(n) = alpha - beta * n^(-gamma)``.

    ``alpha`` is the value ceiling, ``beta`` the initial deficit, and
    ``gamma`` the saturation rate. The generated curve is clamped to [0, 1]
    and forced to 0 at n = 0; it satisfies the diminishing-returns bound with
    constant ``beta * gamma``.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")


def power_law_curve(spec: PowerLawSpec, n_total: int) -> ValuationCurve:
    """Generate the clamped power-law valuation curve on amounts 0..n_total.

    Clamping at 0 for small n preserves the diminishing-returns bound:
    a clamped increment is never larger than the unclamped one.
    """
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    amounts = np.arange(1, n_total + 1, dtype=np.float64)
    raw = spec.alpha - spec.beta * amounts ** (-spec.gamma)
    values = np.concatenate(([0.0], np.clip(raw, 0.0, 1.0)))
    return ValuationCurve(values)


def random_monotone_curve(seed: int, n_total: int, knot_count: int) -> ValuationCurve:
    """A random non-decreasing curve: sorted uniform knots, linearly
    interpolated over 1..n_total, with value 0 at amount 0.

    Deterministic given ``seed``. ``knot_count=1`` yields a constant curve on
    amounts >= 1.
    """
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    if knot_count < 1:
        raise ValueError("knot_count must be >= 1")
    rng = np.random.default_rng(seed)
    knots = np.sort(rng.uniform(0.0, 1.0, size=knot_count))
    positions = np.linspace(1.0, float(n_total), num=knot_count)
    interp = np.interp(np.arange(1, n_total + 1, dtype=np.float64), positions, knots)
    interp = np.maximum.accumulate(interp)
    values = np.concatenate(([0.0], np.clip(interp, 0.0, 1.0)))
    return ValuationCurve(values)


def measure_constants(curve: ValuationCurve) -> tuple[float, float]:
    """Smallest (smoothness, diminishing) constants the curve satisfies.

    The smoothness constant L is the smallest number with
    ``value(n + d) - value(n) <= (L / N) * d`` for all n, d; since increments
    telescope, that is ``N * max single-step increment`` (the step out of 0
    included). The diminishing constant J is the smallest number with
    ``value(n + 1) - value(n) <= J / n`` for all n >= 1.
    """
    diffs = np.diff(curve.values)
    n_total = curve.n_total
    l_hat = float(n_total * diffs.max())
    if n_total >= 2:
        j_hat = float((np.arange(1, n_total) * diffs[1:]).max())
    else:
        j_hat = 0.0
    return l_hat, j_hat


def measure_instance_constants(curves) -> tuple[float, float]:
    """Max of per-curve constants over an iterable of valuation curves."""
    l_hat = 0.0
    j_hat = 0.0
    for c in curves:
        l_c, j_c = measure_constants(c)
        l_hat = max(l_hat, l_c)
        j_hat = max(j_hat, j_c)
    return l_hat, j_hat
