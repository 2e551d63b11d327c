"""Follow-the-perturbed-leader for adversarial buyer sequences.

Each curve gets a one-time exponential perturbation; every round the learner
plays the curve maximizing cumulative reward plus perturbation. The reward
design handles asymmetric feedback: on purchase rounds every curve is
credited the payment the revealed type would have made under it; on
no-purchase rounds every curve is credited the summed payments of all types
that could NOT have afforded the posted curve (the buyer is known to be one
of them). Either way the chosen curve's reward equals its realized payment,
and every curve's reward upper-bounds what the actual buyer would have paid
under it.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels


def default_theta(space_size: int, m: int, horizon: int) -> float:
    """Perturbation rate ``sqrt((1 + log(size)) / (m^2 * T))``."""
    if space_size < 1:
        raise ValueError("space_size must be >= 1")
    if m < 1 or horizon < 1:
        raise ValueError("m and horizon must be >= 1")
    return math.sqrt((1.0 + math.log(space_size)) / (m * m * horizon))


def sample_perturbations(n: int, theta: float, rng: np.random.Generator) -> np.ndarray:
    """Exponential draws with rate ``theta`` via the inverse CDF
    ``x = -log(u)/theta`` with u uniform on (0, 1]."""
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    u = 1.0 - rng.random(n)  # rng.random is [0, 1); this is (0, 1]
    return -np.log(u) / theta


class FtplLearner:
    """Single-owner state machine over a fixed price family.

    Perturbations are drawn once at construction from ``rng`` and are
    immutable afterwards; cumulative rewards are a dense per-curve array
    (memory O(family size), bounded by the enumeration cap). Ties in the
    perturbed argmax break to the lowest curve index.
    """

    def __init__(
        self,
        amounts: np.ndarray,
        payments: np.ndarray,
        theta: float,
        rng: np.random.Generator,
    ):
        if amounts.shape != payments.shape or amounts.ndim != 2:
            raise ValueError("amounts and payments must be equally shaped 2-d tables")
        self.amounts = amounts
        self.payments = payments
        self.n_curves, self.m = amounts.shape
        self.theta = float(theta)
        self.perturbations = sample_perturbations(self.n_curves, theta, rng)
        self.perturbations.setflags(write=False)
        self.cumulative_rewards = np.zeros(self.n_curves)
        self.rounds_done = 0
        self._cached_choice: int | None = None

    def select(self) -> int:
        """Curve index maximizing cumulative reward plus perturbation.

        The argmax only changes when rewards do, so repeated calls between
        updates are served from a cache (the harness asks for the leader
        right after each update and plays it on the next round).
        """
        if self._cached_choice is None:
            idx, _ = _kernels.argmax_of_sum(self.cumulative_rewards, self.perturbations)
            self._cached_choice = idx
        return self._cached_choice

    def update(self, curve_index: int, revealed_type: int | None) -> np.ndarray:
        """Advance one round and return this round's reward vector.

        Rewards are used as-is (no clipping): value-grid levels above 1 can
        push a no-purchase reward above m, but only the argmax matters. The
        returned vector may alias internal tables; treat it as read-only.
        """
        self._cached_choice = None
        if revealed_type is not None:
            if self.amounts[curve_index, revealed_type] <= 0:
                raise ValueError(
                    f"revealed type {revealed_type} could not purchase the posted curve"
                )
            rewards = self.payments[:, revealed_type]
        else:
            non_buyers = self.amounts[curve_index] == 0
            if not non_buyers.any():
                raise ValueError(
                    "no purchase reported, but every type could afford the posted curve"
                )
            rewards = self.payments[:, non_buyers].sum(axis=1)
        self.cumulative_rewards += rewards
        self.rounds_done += 1
        return rewards
