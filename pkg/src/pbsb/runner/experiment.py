"""The multiple-play loop, replications and grid sweeps."""
from __future__ import annotations

import zlib
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..combinatorial import build_super_arm, overall_reward
from ..core import ENV_STREAM, PATIENCE_STREAM, POLICY_STREAM, derive_rng, sample_patience
from ..environments import Environment, SyntheticBernoulliEnv
from ..evaluation import AggregateReport, RunResult, aggregate
from ..feedback import Strategy, apply_strategy
from ..policies import make_policy
from .config import ConfigError, ExperimentConfig, build_environment


class SimulationError(RuntimeError):
    pass


def simulate(
    env: Environment,
    policy,
    strategy,
    *,
    k: int,
    horizon: int,
    psi_max: int,
    env_rng: np.random.Generator,
    patience_rng: np.random.Generator,
    policy_rng: np.random.Generator,
    psi_fixed: int | None = None,
    bandit_reward: str = "normalized",
    delta: float = 0.01,
    oracle_p: float | None = None,
    keep_rounds: bool = False,
    metadata: dict | None = None,
) -> RunResult:
    """Run ``horizon`` rounds of recommend / reward / learn and record the outcome.

    Each round: draw a user, build the super-arm from the frozen policy,
    score it against the hidden rewards, draw the user's patience (P-BSB
    only), then let the strategy update the policy.
    """
    strategy = Strategy.parse(strategy)
    if not 1 <= k <= env.n_arms:
        raise ConfigError(f"k={k} must lie in [1, {env.n_arms}]")
    rewards = np.zeros(horizon, dtype=np.int8)
    n_observed = np.zeros(horizon, dtype=np.int16)
    super_arms = np.zeros((horizon, k), dtype=np.int32) if keep_rounds else None
    psis = np.zeros(horizon, dtype=np.int16) if keep_rounds else None

    for t in range(horizon):
        try:
            x, y = env.draw(env_rng)
            s_t = build_super_arm(policy, x, k, policy_rng)
            rewards[t] = overall_reward(s_t, y)
            psi = 0
            if strategy.partial:
                psi = psi_fixed if psi_fixed is not None else sample_patience(patience_rng, psi_max)
            observed = apply_strategy(
                strategy, policy, s_t, y, psi, policy_rng, context=x, bandit_reward=bandit_reward
            )
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            raise SimulationError(f"round {t + 1}: {exc}") from exc
        n_observed[t] = len(observed)
        if keep_rounds:
            super_arms[t] = s_t.arms
            psis[t] = psi

    return RunResult(
        rewards,
        n_observed,
        k,
        delta=delta,
        oracle_p=oracle_p,
        metadata=dict(metadata or {}),
        super_arms=super_arms,
        psi=psis,
    )


def cell_key(policy: str, strategy: str) -> int:
    """Stable 32-bit key separating the streams of grid cells when CRN is off."""
    return zlib.crc32(f"{policy}/{strategy}".encode())


def run_single(
    config: ExperimentConfig,
    run_index: int,
    env: Environment | None = None,
    policy: str | None = None,
    strategy: str | None = None,
) -> RunResult:
    """One replication; deterministic in ``(config.base_seed, run_index)``."""
    if env is None:
        env = build_environment(config.env)
    policy = policy or config.policy
    strategy = Strategy.parse(strategy or config.strategy)
    config.validate(env.n_arms)

    extra = () if config.common_random_numbers else (cell_key(policy, strategy.value),)
    seed = config.base_seed
    agent = make_policy(policy, env.n_arms, env.d, **config.policy_params)
    oracle_p = None
    if isinstance(env, SyntheticBernoulliEnv):
        oracle_p = env.oracle_success_probability(config.k)
    return simulate(
        env,
        agent,
        strategy,
        k=config.k,
        horizon=config.horizon,
        psi_max=config.effective_psi_max,
        env_rng=derive_rng(seed, run_index, ENV_STREAM, *extra),
        patience_rng=derive_rng(seed, run_index, PATIENCE_STREAM, *extra),
        policy_rng=derive_rng(seed, run_index, POLICY_STREAM, *extra),
        psi_fixed=config.psi_fixed,
        bandit_reward=config.bandit_reward,
        delta=config.delta,
        oracle_p=oracle_p,
        keep_rounds=config.round_log,
        metadata={"policy": agent.name, "strategy": strategy.value, "run": run_index, "seed": seed},
    )


_WORKER_STATE = {}


def _init_worker(config, env):
    _WORKER_STATE["config"] = config
    _WORKER_STATE["env"] = env


def _run_job(job):
    policy, strategy, run_index = job
    return run_single(_WORKER_STATE["config"], run_index, _WORKER_STATE["env"], policy, strategy)


def run_experiment(config: ExperimentConfig, env: Environment | None = None, grid: bool = False) -> AggregateReport:
    """All replications of every (policy, strategy) cell, then aggregation.

    With ``config.workers > 1`` replications run in worker processes; results
    are collected in (cell, run index) order so the report does not depend on
    scheduling.
    """
    if env is None:
        env = build_environment(config.env)
    cells = config.validate(env.n_arms, grid=grid)
    jobs = [(p, s, i) for p, s in cells for i in range(config.runs)]

    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(
            max_workers=config.workers, initializer=_init_worker, initargs=(config, env)
        ) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = []
        for p, s, i in jobs:
            try:
                results.append(run_single(config, i, env, p, s))
            except SimulationError as exc:
                raise SimulationError(f"{p}/{s} run {i}: {exc}") from exc

    grouped = {cell: [] for cell in cells}
    for (p, s, _), res in zip(jobs, results):
        grouped[(p, s)].append(res)
    report = aggregate(grouped, alpha=config.alpha)
    report.config = config.as_flat()
    report.environment = env.metadata()
    if isinstance(env, SyntheticBernoulliEnv):
        report.environment["oracle_success_probability"] = env.oracle_success_probability(config.k)
    return report
