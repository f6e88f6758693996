"""Run results, aggregation over replications and the significance battery."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .metrics import accuracy_trajectory, convergence_time, cumulative_regret, strategy_average
from .stats import kruskal_wallis, wilcoxon_signed_rank


@dataclass
class RunResult:
    """Everything recorded for one replication.

    ``n_observed`` holds, per round, how many individual rewards the strategy
    consumed (k for Bandit and Semi-Bandit, ``|P_t|`` for P-BSB). The round
    log arrays ``super_arms`` (T, k) and ``psi`` are optional.
    """

    rewards: np.ndarray
    n_observed: np.ndarray
    k: int
    delta: float = 0.01
    oracle_p: float | None = None
    metadata: dict = field(default_factory=dict)
    super_arms: np.ndarray | None = None
    psi: np.ndarray | None = None

    def __post_init__(self):
        self.rewards = np.asarray(self.rewards, dtype=np.int8)
        self.accuracy = accuracy_trajectory(self.rewards)
        self.acc_T = float(self.accuracy[-1])
        self.t_c = convergence_time(self.accuracy, self.delta)
        self.regret = None if self.oracle_p is None else cumulative_regret(self.rewards, self.oracle_p)

    @property
    def horizon(self) -> int:
        return int(self.rewards.shape[0])

    @property
    def feedback_ratio(self) -> float:
        """Individually observed rewards over the ``k * T`` a full-feedback user gives."""
        return float(self.n_observed.sum()) / (self.k * self.horizon)

    def summary(self) -> dict:
        return {
            "acc_T": self.acc_T,
            "t_c": self.t_c,
            "regret": self.regret,
            "feedback_ratio": self.feedback_ratio,
            **self.metadata,
        }


def _mean_std(values):
    a = np.asarray(values, dtype=float)
    # sample std; a single run reports 0
    std = float(a.std(ddof=1)) if a.shape[0] > 1 else 0.0
    return {"mean": float(a.mean()), "std": std}


@dataclass
class CellSummary:
    policy: str
    strategy: str
    acc_T: list
    t_c: list
    regret: list | None
    feedback_ratio: list

    def as_dict(self) -> dict:
        out = {
            "policy": self.policy,
            "strategy": self.strategy,
            "runs": len(self.acc_T),
            "acc_T": {**_mean_std(self.acc_T), "values": list(self.acc_T)},
            "t_c": {**_mean_std(self.t_c), "values": list(self.t_c)},
            "feedback_ratio": _mean_std(self.feedback_ratio),
        }
        if self.regret is not None:
            out["regret"] = {**_mean_std(self.regret), "values": list(self.regret)}
        return out


@dataclass
class AggregateReport:
    cells: list
    strategy_averages: dict
    tests: dict
    config: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    # {(policy, strategy): [RunResult, ...]}; not serialized
    runs: dict = field(default_factory=dict, repr=False)

    def cell(self, policy, strategy) -> CellSummary:
        for c in self.cells:
            if c.policy == policy and c.strategy == strategy:
                return c
        raise KeyError((policy, strategy))

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "environment": self.environment,
            "cells": [c.as_dict() for c in self.cells],
            "strategy_averages": self.strategy_averages,
            "tests": self.tests,
        }


def summarize_cell(policy, strategy, results) -> CellSummary:
    regrets = [r.regret for r in results]
    return CellSummary(
        policy=policy,
        strategy=strategy,
        acc_T=[r.acc_T for r in results],
        t_c=[r.t_c for r in results],
        regret=None if any(v is None for v in regrets) else regrets,
        feedback_ratio=[r.feedback_ratio for r in results],
    )


def _kw_entry(groups, labels):
    values = [np.asarray(g, dtype=float) for g in groups]
    flat = np.concatenate(values)
    if len(values) < 2 or flat.shape[0] < 3:
        return None
    res = kruskal_wallis(values)
    return {"groups": list(labels), "H": res.statistic, "p": res.pvalue, "df": res.df}


def _pairwise_wilcoxon(groups, labels):
    out = []
    for (la, a), (lb, b) in itertools.combinations(zip(labels, groups), 2):
        diffs = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        res = wilcoxon_signed_rank(diffs)
        out.append(
            {"a": la, "b": lb, "W": res.statistic, "p": res.pvalue, "n": res.n, "exact": res.exact,
             "degenerate": res.degenerate}
        )
    return out


def significance_battery(cells, alpha=0.05) -> dict:
    """Kruskal-Wallis across strategies (per policy) and across policies (per strategy).

    When a KW test rejects at ``alpha``, pairwise Wilcoxon signed-rank tests
    follow, pairing runs by run index.
    """
    policies = list(dict.fromkeys(c.policy for c in cells))
    strategies = list(dict.fromkeys(c.strategy for c in cells))
    by_key = {(c.policy, c.strategy): c for c in cells}
    tests = {"alpha": alpha, "across_strategies": {}, "across_policies": {}}

    def battery(members, labels):
        entry = {}
        for metric in ("acc_T", "t_c"):
            groups = [getattr(m, metric) for m in members]
            kw = _kw_entry(groups, labels)
            if kw is None:
                continue
            if kw["p"] < alpha and len({len(g) for g in groups}) == 1:
                kw["wilcoxon"] = _pairwise_wilcoxon(groups, labels)
            entry[metric] = kw
        return entry

    for p in policies:
        members = [by_key[(p, s)] for s in strategies if (p, s) in by_key]
        if len(members) >= 2:
            tests["across_strategies"][p] = battery(members, [m.strategy for m in members])
    for s in strategies:
        members = [by_key[(p, s)] for p in policies if (p, s) in by_key]
        if len(members) >= 2:
            tests["across_policies"][s] = battery(members, [m.policy for m in members])
    return tests


def aggregate(grouped_results, alpha=0.05) -> AggregateReport:
    """Build the report from ``{(policy, strategy): [RunResult, ...]}`` in run order."""
    cells = [summarize_cell(p, s, results) for (p, s), results in grouped_results.items()]
    averages = {}
    for s in dict.fromkeys(c.strategy for c in cells):
        members = [c for c in cells if c.strategy == s]
        averages[s] = {
            "policies": [c.policy for c in members],
            "acc_T": strategy_average([np.mean(c.acc_T) for c in members]),
            "t_c": strategy_average([np.mean(c.t_c) for c in members]),
        }
    return AggregateReport(cells, averages, significance_battery(cells, alpha), runs=dict(grouped_results))
