"""Multiple-play super-arm construction and the any-hit overall reward."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PartialSubset, SuperArm


@dataclass(frozen=True)
class RoundOutcome:
    super_arm: SuperArm
    overall_reward: int
    psi: int
    observed: PartialSubset


def build_super_arm(policy, context, k: int, rng: np.random.Generator) -> SuperArm:
    """Select ``k`` distinct arms by ``k`` successive single-play selections.

    Each selection excludes the arms already chosen. The policy is only read,
    never updated, while the super-arm is built.
    """
    if not 1 <= k <= policy.n_arms:
        raise ValueError(f"k must lie in [1, {policy.n_arms}], got {k}")
    chosen: list[int] = []
    for _ in range(k):
        chosen.append(policy.select_next(context, chosen, rng))
    return SuperArm(tuple(chosen))


def overall_reward(super_arm, y) -> int:
    """1 if any recommended arm satisfies the user under the hidden rewards ``y``.

    ``y`` may be an array indexed by arm or a mapping ``arm -> reward``.
    """
    hit = 0
    for arm in super_arm:
        try:
            value = y[arm]
        except (KeyError, IndexError):
            raise KeyError(f"hidden reward vector has no entry for arm {arm}") from None
        if value == 1:
            hit = 1
    return hit
