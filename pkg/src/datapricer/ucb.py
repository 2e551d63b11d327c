"""Optimism-based price selection for the stochastic market.

The learner never estimates per-curve revenue directly (the family is far
too large for that); it keeps optimistic estimates of the type distribution
and translates them to revenue scores through the precomputed demand tables.

Feedback is asymmetric: the buyer's type is revealed only on purchase
rounds. What is always observable is the *purchase set* of the posted curve,
i.e. which types could have afforded it, and that set is what the per-type
observation counters track.

Round 1 posts the zero curve (a free giveaway, identified by curve index
``GIVEAWAY``), which puts every type in the purchase set and guarantees at
least one observation per type before any selection happens. Selection is
only defined from round 2 on.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels

GIVEAWAY = -1


class UcbLearner:
    """Single-owner state machine over a fixed price family.

    ``amounts`` / ``payments`` are the demand tables of the family, indexed
    [curve, type]. The learner is fully deterministic: argmax ties break to
    the lowest curve index (enumeration order).
    """

    def __init__(self, horizon: int, amounts: np.ndarray, payments: np.ndarray):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        if amounts.shape != payments.shape or amounts.ndim != 2:
            raise ValueError("amounts and payments must be equally shaped 2-d tables")
        self.horizon = horizon
        self.amounts = amounts
        self.payments = payments
        self.n_curves, self.m = amounts.shape
        self.rounds_done = 0
        self.obs_count = np.zeros(self.m, dtype=np.int64)  # rounds with i affordable
        self.hit_count = np.zeros(self.m, dtype=np.int64)  # revealed purchases by i
        self._log_horizon = math.log(horizon) if horizon > 1 else 0.0

    def optimistic_weights(self) -> np.ndarray:
        """Per-type frequency estimate plus its confidence width.

        The estimate is hits / observations; the bonus is
        ``sqrt(log(T) / observations)`` (natural log). The sum is used as-is,
        deliberately not clipped to [0, 1]: clipping would reorder the
        curve scores in early rounds.
        """
        if np.any(self.obs_count == 0):
            raise RuntimeError("optimistic weights undefined before the giveaway round")
        mean = self.hit_count / self.obs_count
        return mean + np.sqrt(self._log_horizon / self.obs_count)

    def select(self) -> int:
        """Curve index with the highest optimistic revenue score.

        Only valid from round 2 on; round 1 is the giveaway by contract.
        """
        if self.rounds_done < 1:
            raise RuntimeError("select() is undefined on round 1; post the giveaway")
        idx, _ = _kernels.argmax_weighted(self.payments, self.optimistic_weights())
        return idx

    def purchase_mask(self, curve_index: int) -> np.ndarray:
        """Boolean mask of types that would purchase at the given curve."""
        if curve_index == GIVEAWAY:
            return np.ones(self.m, dtype=bool)
        return self.amounts[curve_index] > 0

    def update(self, curve_index: int, revealed_type: int | None):
        """Advance one round.

        ``revealed_type`` is the buyer's type if and only if a purchase
        happened. Every type that could have afforded the posted curve gets
        an observation; the revealed type (necessarily affordable) gets a
        hit. On no-purchase rounds the learner reads nothing else.
        """
        mask = self.purchase_mask(curve_index)
        if revealed_type is not None:
            if not mask[revealed_type]:
                raise ValueError(
                    f"revealed type {revealed_type} could not purchase the posted curve"
                )
            self.hit_count[revealed_type] += 1
        self.obs_count[mask] += 1
        self.rounds_done += 1
