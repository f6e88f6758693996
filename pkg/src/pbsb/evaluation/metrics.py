"""Per-run metrics: global accuracy, convergence time and regret."""
from __future__ import annotations

import math

import numpy as np

# absorbs rounding in Acc(t) - Acc(T) so that band edges count as inside
_BAND_SLACK = 1e-12


def accuracy_trajectory(rewards) -> np.ndarray:
    """Running accuracy ``Acc(t)`` for ``t = 1..T``."""
    r = np.asarray(rewards, dtype=float).reshape(-1)
    if r.shape[0] == 0:
        raise ValueError("reward stream is empty")
    return np.cumsum(r) / np.arange(1, r.shape[0] + 1)


def global_accuracy(rewards) -> float:
    r = np.asarray(rewards, dtype=float).reshape(-1)
    if r.shape[0] == 0:
        raise ValueError("reward stream is empty")
    return float(r.sum() / r.shape[0])


def convergence_time(trajectory, delta: float = 0.01) -> int:
    """Earliest round from which running accuracy stays within ``delta`` of its final value.

    Returns a 1-based round index; 1 when the whole trajectory is inside the band.
    """
    acc = np.asarray(trajectory, dtype=float).reshape(-1)
    if acc.shape[0] == 0:
        raise ValueError("trajectory is empty")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    outside = np.flatnonzero(np.abs(acc - acc[-1]) > delta + _BAND_SLACK)
    if outside.shape[0] == 0:
        return 1
    return int(outside[-1]) + 2


def cumulative_regret(rewards, oracle_p: float) -> float:
    """``T * oracle_p - sum(rewards)``."""
    if not 0.0 <= oracle_p <= 1.0:
        raise ValueError(f"oracle_p must lie in [0, 1], got {oracle_p}")
    r = np.asarray(rewards, dtype=float).reshape(-1)
    return float(r.shape[0] * oracle_p - r.sum())


def strategy_average(per_policy_values) -> float:
    """Mean over the policy set of one strategy's per-policy results.

    The sum is correctly rounded (``math.fsum``) so the result does not
    depend on the order of the policies.
    """
    values = [float(v) for v in per_policy_values]
    if not values:
        raise ValueError("no values to average")
    return math.fsum(values) / len(values)
