"""Feedback strategies: how the hidden reward vector turns into policy updates.

Five strategies are available:

``bandit``
    Only the cumulative reward of the super-arm is used. Every recommended arm
    receives it, divided by k in the default ``normalized`` mode.
``semi-bandit``
    Every recommended arm receives its own reward.
``pbsb-re`` / ``pbsb-oe`` / ``pbsb-rd``
    Partial Bandit with Semi-Bandit. The user grants ``psi`` individual
    feedbacks; a subset ``P`` of that size is picked from the super-arm by
    highest estimate (RE), fewest past individual observations (OE) or at
    random (RD). Every recommended arm receives the mean observed reward of
    ``P`` as a bandit-kind update, then each arm of ``P`` additionally receives
    its own reward. With ``psi = 0`` nothing is observed and nothing updated.

Within a round all bandit-kind updates come first (selection order), then the
individual ones (subset order).
"""
from __future__ import annotations

import enum

import numpy as np

from .core import Observation, PartialSubset, argmax_tiebreak


class Strategy(str, enum.Enum):
    BANDIT = "bandit"
    SEMI_BANDIT = "semi-bandit"
    PBSB_RE = "pbsb-re"
    PBSB_OE = "pbsb-oe"
    PBSB_RD = "pbsb-rd"

    @property
    def partial(self) -> bool:
        return self in (Strategy.PBSB_RE, Strategy.PBSB_OE, Strategy.PBSB_RD)

    @classmethod
    def parse(cls, value) -> "Strategy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown strategy {value!r}; expected one of {[s.value for s in cls]}") from None

    def __str__(self):
        return self.value


BANDIT_REWARD_MODES = ("normalized", "raw")


def select_partial_subset(kind, super_arm, policy, context, psi: int, rng: np.random.Generator) -> list[int]:
    """Arms of ``super_arm`` whose individual rewards get observed this round.

    Returns ``min(psi, k)`` distinct arms. RE and OE build the subset greedily,
    one argmax (argmin for OE) at a time with random tie-breaks.
    """
    kind = Strategy.parse(kind)
    if not kind.partial:
        raise ValueError(f"{kind} is not a partial-feedback strategy")
    if psi < 0:
        raise ValueError(f"psi must be >= 0, got {psi}")
    arms = list(super_arm)
    size = min(psi, len(arms))
    if size == 0:
        return []

    if kind is Strategy.PBSB_RD:
        picked = rng.choice(len(arms), size=size, replace=False)
        return [arms[i] for i in picked]

    if kind is Strategy.PBSB_RE:
        all_scores = policy.estimates(context)
        scores = {a: float(all_scores[a]) for a in arms}
    else:
        scores = {a: -float(policy.observation_count(a)) for a in arms}
    chosen: list[int] = []
    for _ in range(size):
        chosen.append(argmax_tiebreak(scores, chosen, rng))
    return chosen


def apply_strategy(
    kind,
    policy,
    super_arm,
    y,
    psi: int = 0,
    rng: np.random.Generator | None = None,
    context=None,
    bandit_reward: str = "normalized",
) -> PartialSubset:
    """Turn the round's hidden rewards into policy updates.

    Returns the individually observed ``(arm, reward)`` pairs; for the classic
    Bandit strategy these are the rewards used internally to form the
    cumulative reward. ``psi`` and ``rng`` only matter for P-BSB.
    """
    kind = Strategy.parse(kind)
    if bandit_reward not in BANDIT_REWARD_MODES:
        raise ValueError(f"bandit_reward must be one of {BANDIT_REWARD_MODES}, got {bandit_reward!r}")
    if psi < 0:
        raise ValueError(f"psi must be >= 0, got {psi}")
    arms = list(super_arm)
    rewards = {a: _reward_of(y, a) for a in arms}
    raw = bandit_reward == "raw"

    if kind is Strategy.SEMI_BANDIT:
        for a in arms:
            policy.update(a, context, rewards[a], individual=True)
        return tuple(Observation(a, rewards[a]) for a in arms)

    if kind is Strategy.BANDIT:
        total = sum(rewards.values())
        value = total if raw else total / len(arms)
        for a in arms:
            policy.update(a, context, value, individual=False, raw=raw)
        return tuple(Observation(a, rewards[a]) for a in arms)

    if rng is None:
        raise ValueError("P-BSB strategies need a random generator")
    subset = select_partial_subset(kind, arms, policy, context, psi, rng)
    if not subset:
        return ()
    total = sum(rewards[a] for a in subset)
    value = total if raw else total / len(subset)
    for a in arms:
        policy.update(a, context, value, individual=False, raw=raw)
    for a in subset:
        policy.update(a, context, rewards[a], individual=True)
    return tuple(Observation(a, rewards[a]) for a in subset)


def _reward_of(y, arm) -> float:
    try:
        value = y[arm]
    except (KeyError, IndexError):
        raise KeyError(f"hidden reward vector has no entry for arm {arm}") from None
    return float(value)
