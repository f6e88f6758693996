"""
Single-play policies on Bernoulli arms
======================================

Every combinatorial strategy in ``pbsb`` is driven by a single-play policy
that answers one question per slot: which arm next, given the arms
already chosen?  This script pits the four context-free policies against
each other on ten Bernoulli arms with ``k = 1``.
"""
import numpy as np

from pbsb import SyntheticBernoulliEnv, make_policy
from pbsb.core import ENV_STREAM, PATIENCE_STREAM, POLICY_STREAM, derive_rng
from pbsb.runner import simulate

###############################################################################
# Ten arms with means spread over [0.1, 0.9].  The best arm wins 90% of rounds.
mu = np.linspace(0.1, 0.9, 10)
env = SyntheticBernoulliEnv(mu)
print("oracle success probability:", env.oracle_success_probability(1))

###############################################################################
# Each policy gets the same user stream (same ``ENV_STREAM`` seed), so the
# differences below come from the policies alone.
horizon = 3000
for name in ("epsilon-greedy", "ts", "ucb1", "ucb2"):
    policy = make_policy(name, env.n_arms)
    res = simulate(
        env, policy, "semi-bandit", k=1, horizon=horizon, psi_max=1,
        env_rng=derive_rng(0, 0, ENV_STREAM),
        patience_rng=derive_rng(0, 0, PATIENCE_STREAM),
        policy_rng=derive_rng(0, 0, POLICY_STREAM),
        oracle_p=env.oracle_success_probability(1),
    )
    best = int(np.argmax(policy.estimates(None)))
    print(f"{name:>15}  Acc(T)={res.acc_T:.3f}  regret={res.regret:7.1f}  t_c={res.t_c:5d}  best arm={best}")

###############################################################################
# The running accuracy ``Acc(t)`` of the last run, sampled every 500 rounds.
# Convergence time ``t_c`` is the first round after which this curve stays
# within ``delta = 0.01`` of its final value.
print(np.round(res.accuracy[::500], 3))
