"""Single-play bandit policies used slot by slot to build super-arms.

All policies share one surface:

* ``select_next(context, excluded, rng)`` picks one arm outside ``excluded``;
* ``estimate(arm, context)`` / ``estimates(context)`` give deterministic point
  estimates of the expected reward (used by the RE partial-feedback setting);
* ``update(arm, context, reward, individual=...)`` folds one reward in;
  ``individual=True`` marks a per-arm (semi-bandit kind) observation and is the
  only kind that increments ``observation_count``.

``t`` counts update events applied to the policy, whatever their kind. It is
the clock used by the UCB indices.
"""
from __future__ import annotations

import math

import numpy as np

from .core import argmax_tiebreak

UNSEEN_ESTIMATE = 0.5


class DimensionError(ValueError):
    pass


class Policy:
    """Per-arm statistics shared by every policy."""

    name = "policy"
    contextual = False

    def __init__(self, n_arms: int, d: int = 0):
        if n_arms < 1:
            raise ValueError(f"n_arms must be >= 1, got {n_arms}")
        if d < 0:
            raise ValueError(f"d must be >= 0, got {d}")
        self.n_arms = int(n_arms)
        self.d = int(d)
        self.obs = np.zeros(self.n_arms, dtype=np.int64)
        self.t = 0

    # -- selection -------------------------------------------------------
    def scores(self, context, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def select_next(self, context, excluded, rng: np.random.Generator) -> int:
        return argmax_tiebreak(self.scores(context, rng), excluded, rng)

    # -- estimates -------------------------------------------------------
    def estimates(self, context) -> np.ndarray:
        raise NotImplementedError

    def estimate(self, arm: int, context=None) -> float:
        self._check_arm(arm)
        return float(self.estimates(context)[arm])

    def observation_count(self, arm: int) -> int:
        self._check_arm(arm)
        return int(self.obs[arm])

    # -- learning --------------------------------------------------------
    def update(self, arm: int, context, reward: float, individual: bool = False, raw: bool = False):
        """Apply one reward to ``arm``.

        ``raw=True`` lifts the upper bound of 1 so unnormalized cumulative
        rewards can be fed to policies whose statistics allow it.
        """
        self._check_arm(arm)
        reward = float(reward)
        if not math.isfinite(reward) or reward < 0.0 or (reward > 1.0 and not raw):
            raise ValueError(f"reward must lie in [0, 1], got {reward}")
        self._apply(arm, context, reward)
        self.t += 1
        if individual:
            self.obs[arm] += 1

    def _apply(self, arm, context, reward):
        raise NotImplementedError

    # -- helpers ---------------------------------------------------------
    def _check_arm(self, arm):
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} outside [0, {self.n_arms})")

    def state(self) -> dict:
        """Copy of every statistic, for comparisons and snapshots."""
        out = {"t": self.t}
        for key, value in vars(self).items():
            if isinstance(value, np.ndarray):
                out[key] = value.copy()
        return out

    def __repr__(self):
        return f"{type(self).__name__}(n_arms={self.n_arms}, d={self.d})"


class CountSumPolicy(Policy):
    """Policies whose state is a pull count and reward sum per arm."""

    def __init__(self, n_arms, d=0):
        super().__init__(n_arms, d)
        self.n = np.zeros(self.n_arms, dtype=np.int64)
        self.s = np.zeros(self.n_arms, dtype=float)

    def estimates(self, context=None):
        out = np.full(self.n_arms, UNSEEN_ESTIMATE)
        seen = self.n > 0
        out[seen] = self.s[seen] / self.n[seen]
        return out

    def _apply(self, arm, context, reward):
        self.n[arm] += 1
        self.s[arm] += reward


class EpsilonGreedy(CountSumPolicy):
    """Greedy on empirical means, uniform exploration with probability ``epsilon``.

    The exploration coin is flipped on every call, so within a super-arm each
    slot explores independently.
    """

    name = "epsilon-greedy"

    def __init__(self, n_arms, d=0, epsilon=0.0009):
        super().__init__(n_arms, d)
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        self.epsilon = float(epsilon)

    def scores(self, context, rng):
        return self.estimates(context)

    def select_next(self, context, excluded, rng):
        if rng.random() < self.epsilon:
            return argmax_tiebreak(np.zeros(self.n_arms), excluded, rng)
        return argmax_tiebreak(self.estimates(context), excluded, rng)


class UCB1(CountSumPolicy):
    name = "ucb1"

    def index(self) -> np.ndarray:
        out = np.full(self.n_arms, np.inf)
        seen = self.n > 0
        log_t = math.log(max(self.t, 1))
        out[seen] = self.s[seen] / self.n[seen] + np.sqrt(2.0 * log_t / self.n[seen])
        return out

    def scores(self, context, rng):
        return self.index()


class UCB2(CountSumPolicy):
    """UCB2 index with epochs advanced from pull counts.

    The epoch commitment of the single-play algorithm (replaying one arm for a
    whole epoch) is not enforced: the index is recomputed at every selection.
    """

    name = "ucb2"

    def __init__(self, n_arms, d=0, alpha=0.5):
        super().__init__(n_arms, d)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        self.alpha = float(alpha)
        self.epoch = np.zeros(self.n_arms, dtype=np.int64)
        # tau(epoch) per arm
        self.epoch_length = np.ones(self.n_arms)

    def tau(self, r) -> int:
        return math.ceil((1.0 + self.alpha) ** int(r))

    def index(self) -> np.ndarray:
        out = np.full(self.n_arms, np.inf)
        seen = self.n > 0
        t = max(self.t, 1)
        tau = self.epoch_length[seen]
        log_term = np.maximum(np.log(math.e * t / tau), 0.0)
        out[seen] = self.s[seen] / self.n[seen] + np.sqrt((1.0 + self.alpha) * log_term / (2.0 * tau))
        return out

    def scores(self, context, rng):
        return self.index()

    def _apply(self, arm, context, reward):
        super()._apply(arm, context, reward)
        while self.n[arm] >= self.tau(self.epoch[arm] + 1):
            self.epoch[arm] += 1
        self.epoch_length[arm] = self.tau(self.epoch[arm])


class ThompsonSampling(Policy):
    """Beta-Bernoulli Thompson sampling with a Beta(1, 1) prior.

    A fractional reward r adds r to alpha and 1 - r to beta.
    """

    name = "ts"

    def __init__(self, n_arms, d=0):
        super().__init__(n_arms, d)
        self.alpha = np.ones(self.n_arms)
        self.beta = np.ones(self.n_arms)

    def scores(self, context, rng):
        return rng.beta(self.alpha, self.beta)

    def estimates(self, context=None):
        return self.alpha / (self.alpha + self.beta)

    def update(self, arm, context, reward, individual=False, raw=False):
        if raw and reward > 1.0:
            raise ValueError("Beta posterior is undefined for cumulative rewards above 1")
        super().update(arm, context, reward, individual=individual)

    def _apply(self, arm, context, reward):
        self.alpha[arm] += reward
        self.beta[arm] += 1.0 - reward


class LinearPolicy(Policy):
    """Disjoint ridge-regression model per arm.

    ``A_inv`` is maintained by Sherman-Morrison rank-one updates; ``theta`` is
    refreshed for the updated arm only.
    """

    contextual = True

    def __init__(self, n_arms, d=0, ridge=1.0):
        super().__init__(n_arms, d)
        if ridge <= 0:
            raise ValueError(f"ridge must be > 0, got {ridge}")
        self.ridge = float(ridge)
        eye = np.eye(self.d)
        self.A = np.repeat(self.ridge * eye[None], self.n_arms, axis=0)
        self.A_inv = np.repeat(eye[None] / self.ridge, self.n_arms, axis=0)
        self.b = np.zeros((self.n_arms, self.d))
        self.theta = np.zeros((self.n_arms, self.d))
        self._version = 0
        self._width_cache = None

    def _context(self, context) -> np.ndarray:
        if context is None:
            x = np.zeros(self.d)
        else:
            x = np.asarray(context, dtype=float).reshape(-1)
        if x.shape[0] != self.d:
            raise DimensionError(f"context has dimension {x.shape[0]}, policy expects {self.d}")
        if not np.all(np.isfinite(x)):
            raise ValueError("context entries must be finite")
        return x

    def estimates(self, context=None):
        return self.theta @ self._context(context)

    def widths(self, context) -> np.ndarray:
        """Per-arm ``sqrt(x^T A_a^{-1} x)``, cached until the next update."""
        x = self._context(context)
        key = (self._version, x.tobytes())
        if self._width_cache is not None and self._width_cache[0] == key:
            return self._width_cache[1]
        quad = np.einsum("i,aij,j->a", x, self.A_inv, x)
        w = np.sqrt(np.maximum(quad, 0.0))
        self._width_cache = (key, w)
        return w

    def _apply(self, arm, context, reward):
        x = self._context(context)
        self.A[arm] += np.outer(x, x)
        self.b[arm] += reward * x
        Ainv = self.A_inv[arm]
        u = Ainv @ x
        Ainv -= np.outer(u, u) / (1.0 + x @ u)
        # keep the cached inverse exactly symmetric
        self.A_inv[arm] = 0.5 * (Ainv + Ainv.T)
        self.theta[arm] = self.A_inv[arm] @ self.b[arm]
        self._version += 1
        self._width_cache = None

    def state(self):
        out = super().state()
        out.pop("_width_cache", None)
        return out


class LinUCB(LinearPolicy):
    name = "linucb"

    def __init__(self, n_arms, d=0, alpha_lin=1.0, ridge=1.0):
        super().__init__(n_arms, d, ridge=ridge)
        if alpha_lin < 0:
            raise ValueError(f"alpha_lin must be >= 0, got {alpha_lin}")
        self.alpha_lin = float(alpha_lin)

    def scores(self, context, rng):
        mean = self.estimates(context)
        if self.alpha_lin == 0.0:
            return mean
        return mean + self.alpha_lin * self.widths(context)


class LinTS(LinearPolicy):
    """Linear Thompson sampling with posterior N(theta_a, v^2 A_a^{-1}).

    Only the sampled score ``theta_tilde^T x`` matters for selection; it is
    drawn directly as ``theta^T x + v * sqrt(x^T A^{-1} x) * z`` with
    ``z ~ N(0, 1)``, which has exactly the distribution of the projected
    multivariate sample.
    """

    name = "lints"

    def __init__(self, n_arms, d=0, v=1.0, ridge=1.0):
        super().__init__(n_arms, d, ridge=ridge)
        if v <= 0:
            raise ValueError(f"v must be > 0, got {v}")
        self.v = float(v)

    def scores(self, context, rng):
        mean = self.estimates(context)
        return mean + self.v * self.widths(context) * rng.standard_normal(self.n_arms)


POLICIES = {
    "epsilon-greedy": EpsilonGreedy,
    "ts": ThompsonSampling,
    "ucb1": UCB1,
    "ucb2": UCB2,
    "linucb": LinUCB,
    "lints": LinTS,
}

_ALIASES = {"egreedy": "epsilon-greedy", "e-greedy": "epsilon-greedy", "ucb": "ucb1", "thompson": "ts"}

# hyperparameters each constructor accepts
POLICY_PARAMS = {
    "epsilon-greedy": ("epsilon",),
    "ts": (),
    "ucb1": (),
    "ucb2": ("alpha",),
    "linucb": ("alpha_lin", "ridge"),
    "lints": ("v", "ridge"),
}


def canonical_policy_name(name: str) -> str:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in POLICIES:
        raise ValueError(f"unknown policy {name!r}; expected one of {sorted(POLICIES)}")
    return key


def make_policy(name: str, n_arms: int, d: int = 0, **params) -> Policy:
    """Build a fresh policy; unknown hyperparameters for ``name`` are ignored."""
    key = canonical_policy_name(name)
    accepted = {k: v for k, v in params.items() if k in POLICY_PARAMS[key] and v is not None}
    return POLICIES[key](n_arms, d, **accepted)
