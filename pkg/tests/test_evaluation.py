import itertools
import math

import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from pbsb.core import make_rng
from pbsb.evaluation import (
    RunResult,
    accuracy_trajectory,
    aggregate,
    chi2_sf,
    convergence_time,
    cumulative_regret,
    gammainc_lower,
    gammainc_upper,
    global_accuracy,
    kruskal_wallis,
    midranks,
    strategy_average,
    wilcoxon_signed_rank,
)


def brute_convergence_time(traj, delta):
    T = len(traj)
    for t in range(1, T + 1):
        if all(abs(traj[s - 1] - traj[-1]) <= delta + 1e-12 for s in range(t, T + 1)):
            return t
    raise AssertionError("unreachable")


class TestMetrics:
    @pytest.mark.parametrize("rewards,expected", [([1, 1, 1, 1], 1.0), ([0, 1, 1, 0], 0.5), ([0, 1, 1, 1], 0.75)])
    def test_global_accuracy(self, rewards, expected):
        assert global_accuracy(rewards) == expected

    def test_empty(self):
        with pytest.raises(ValueError):
            global_accuracy([])
        with pytest.raises(ValueError):
            convergence_time([])

    def test_convergence_flat(self):
        assert convergence_time(accuracy_trajectory([1] * 50)) == 1

    def test_convergence_example(self):
        traj = accuracy_trajectory([0, 1, 1, 1])
        np.testing.assert_allclose(traj, [0, 0.5, 2 / 3, 0.75])
        assert convergence_time(traj, 0.01) == 4

    def test_convergence_wide_band(self):
        rng = make_rng(0)
        assert convergence_time(accuracy_trajectory(rng.integers(0, 2, 100)), 1.0) == 1

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=60), st.sampled_from([0.0, 0.01, 0.05, 0.2]))
    def test_convergence_matches_brute_force(self, rewards, delta):
        traj = accuracy_trajectory(rewards)
        t_c = convergence_time(traj, delta)
        assert t_c == brute_convergence_time(list(traj), delta)
        assert 1 <= t_c <= len(rewards)
        if t_c > 1:
            assert abs(traj[t_c - 2] - traj[-1]) > delta

    def test_trajectory_recomputation_bit_exact(self):
        r = make_rng(1).integers(0, 2, 1000)
        res = RunResult(r, np.ones(1000), 3)
        assert np.array_equal(res.accuracy, np.cumsum(r) / np.arange(1, 1001))

    def test_regret(self):
        assert cumulative_regret([1] * 100, 1.0) == 0
        assert cumulative_regret([1] * 60 + [0] * 40, 0.75) == pytest.approx(15.0)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=300), st.floats(0, 1))
    def test_regret_identity(self, rewards, p):
        T = len(rewards)
        assert abs(global_accuracy(rewards) * T + cumulative_regret(rewards, p) - T * p) <= 1e-12 * max(1, T)

    def test_strategy_average_table_values(self):
        assert strategy_average([0.833, 0.825, 0.832, 0.796]) == 0.8215
        assert strategy_average([1461, 928, 1171, 948]) == 1127
        assert strategy_average([0.796, 0.832, 0.825, 0.833]) == 0.8215
        assert strategy_average([0.4]) == 0.4
        with pytest.raises(ValueError):
            strategy_average([])


class TestIncompleteGamma:
    @pytest.mark.parametrize("a", [0.5, 1.0, 1.5, 2.0, 4.5, 10.0, 37.0, 150.0])
    @pytest.mark.parametrize("x", [1e-3, 0.1, 0.9, 2.0, 5.0, 11.0, 30.0, 80.0, 200.0])
    def test_against_scipy(self, a, x):
        q = gammainc_upper(a, x)
        ref_q = scipy.special.gammaincc(a, x)
        ref_p = scipy.special.gammainc(a, x)
        if ref_q > 1e-280:
            assert q == pytest.approx(ref_q, rel=1e-10, abs=1e-300)
        assert gammainc_lower(a, x) == pytest.approx(ref_p, rel=1e-10, abs=1e-15)

    def test_chi2_df2_closed_form(self):
        for h in (0.0, 0.5, 3.0, 7.2, 20.0):
            assert chi2_sf(h, 2) == pytest.approx(math.exp(-h / 2), rel=1e-12)

    @pytest.mark.parametrize("df", [1, 2, 3, 4, 7, 29])
    def test_chi2_against_scipy(self, df):
        for x in (0.01, 0.7, 3.3, 12.0, 45.0):
            assert chi2_sf(x, df) == pytest.approx(scipy.stats.chi2.sf(x, df), rel=1e-10)

    def test_edges(self):
        assert gammainc_upper(2.0, 0.0) == 1.0
        assert chi2_sf(-1.0, 3) == 1.0
        with pytest.raises(ValueError):
            gammainc_upper(0.0, 1.0)


class TestKruskal:
    def test_hand_example(self):
        h, p, df = kruskal_wallis([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
        assert h == pytest.approx(7.2, abs=1e-9)
        assert p == pytest.approx(math.exp(-3.6), abs=1e-9)
        assert df == 2

    def test_constant_groups(self):
        assert tuple(kruskal_wallis([[2, 2], [2, 2], [2]]))[:2] == (0.0, 1.0)

    def test_group_order(self):
        g = [[1.0, 5.0, 2.5], [3.0, 3.0], [0.1, 9.0, 4.4, 4.4]]
        a = kruskal_wallis(g)
        b = kruskal_wallis([g[2], g[0], g[1]])
        assert a.statistic == pytest.approx(b.statistic, abs=1e-12) and a.pvalue == pytest.approx(b.pvalue)

    def test_errors(self):
        with pytest.raises(ValueError):
            kruskal_wallis([[1, 2, 3]])
        with pytest.raises(ValueError):
            kruskal_wallis([[1], []])
        with pytest.raises(ValueError):
            kruskal_wallis([[1], [2]])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.lists(st.integers(0, 6), min_size=1, max_size=8), min_size=2, max_size=5))
    def test_against_scipy_with_ties(self, groups):
        flat = [v for g in groups for v in g]
        if len(flat) < 3 or len(set(flat)) == 1:
            return
        ours = kruskal_wallis(groups)
        ref = scipy.stats.kruskal(*groups)
        assert ours.statistic == pytest.approx(ref.statistic, rel=1e-9, abs=1e-12)
        assert ours.pvalue == pytest.approx(ref.pvalue, rel=1e-8, abs=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.lists(st.integers(-40, 40), min_size=2, max_size=6), min_size=2, max_size=4))
    def test_monotone_transform_invariance(self, groups):
        # grid values keep exp strictly increasing in floating point
        groups = [[v / 8 for v in g] for g in groups]
        if len({v for g in groups for v in g}) == 1:
            return
        a = kruskal_wallis(groups)
        b = kruskal_wallis([[math.exp(v) * 3 + 1 for v in g] for g in groups])
        assert a.statistic == pytest.approx(b.statistic, abs=1e-12)


def brute_wilcoxon_p(diffs):
    d = np.array([v for v in diffs if v != 0], dtype=float)
    ranks, _ = midranks(np.abs(d))
    w_obs = min(ranks[d > 0].sum(), ranks[d < 0].sum())
    hits = 0
    for signs in itertools.product((0, 1), repeat=len(d)):
        w_plus = sum(r for r, s in zip(ranks, signs) if s)
        w = min(w_plus, ranks.sum() - w_plus)
        hits += w <= w_obs + 1e-9
    return hits / 2 ** len(d)


class TestWilcoxon:
    def test_hand_example(self):
        res = wilcoxon_signed_rank([1, 2, 3])
        assert (res.statistic, res.pvalue, res.exact) == (0.0, 0.25, True)

    def test_all_zero(self):
        res = wilcoxon_signed_rank([0, 0, 0])
        assert res.degenerate and res.pvalue == 1.0 and res.statistic == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            wilcoxon_signed_rank([])

    def test_sign_symmetry(self):
        d = [0.3, -1.2, 2.0, 0.5, -0.1, 0.0, 4.0]
        a, b = wilcoxon_signed_rank(d), wilcoxon_signed_rank([-v for v in d])
        assert (a.statistic, a.pvalue) == (b.statistic, b.pvalue)

    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.integers(-4, 4), min_size=1, max_size=11))
    def test_exact_matches_enumeration(self, diffs):
        if not any(diffs):
            return
        assert wilcoxon_signed_rank(diffs).pvalue == pytest.approx(brute_wilcoxon_p(diffs), abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_exact_against_scipy_no_ties(self, seed):
        d = make_rng(seed).normal(0.3, 1, size=15)
        ref = scipy.stats.wilcoxon(d, method="exact")
        ours = wilcoxon_signed_rank(d)
        assert ours.statistic == ref.statistic
        assert ours.pvalue == pytest.approx(ref.pvalue, rel=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_exact_and_normal_agree_at_n20(self, seed):
        from pbsb.evaluation import stats

        d = make_rng(seed).normal(0.2, 1, size=20)
        exact = wilcoxon_signed_rank(d)
        old = stats.EXACT_WILCOXON_MAX_N
        stats.EXACT_WILCOXON_MAX_N = 0
        try:
            approx = wilcoxon_signed_rank(d)
        finally:
            stats.EXACT_WILCOXON_MAX_N = old
        assert exact.exact and not approx.exact
        assert abs(exact.pvalue - approx.pvalue) <= 0.02

    @pytest.mark.parametrize("seed", range(5))
    def test_normal_branch_against_scipy(self, seed):
        d = np.round(make_rng(seed).normal(0.1, 1, size=40), 1)
        ref = scipy.stats.wilcoxon(d, method="approx", correction=True, zero_method="wilcox")
        ours = wilcoxon_signed_rank(d)
        assert not ours.exact
        assert ours.statistic == ref.statistic
        assert ours.pvalue == pytest.approx(ref.pvalue, rel=1e-9)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=30))
    def test_p_in_unit_interval(self, diffs):
        p = wilcoxon_signed_rank(diffs).pvalue
        assert 0 < p <= 1


def _run(acc_rewards, oracle=None):
    r = np.asarray(acc_rewards)
    return RunResult(r, np.full(r.shape[0], 3), 3, oracle_p=oracle)


class TestAggregate:
    def test_single_run_std_zero(self):
        rep = aggregate({("ts", "bandit"): [_run([1, 0, 1, 1])]})
        d = rep.cells[0].as_dict()
        assert d["acc_T"] == {"mean": 0.75, "std": 0.0, "values": [0.75]}

    def test_strategy_average_over_policies(self):
        rng = make_rng(0)
        grouped = {
            (p, "bandit"): [_run(rng.integers(0, 2, 50)) for _ in range(3)] for p in ("a", "b", "c", "d")
        }
        rep = aggregate(grouped)
        means = [np.mean([r.acc_T for r in runs]) for runs in grouped.values()]
        assert rep.strategy_averages["bandit"]["acc_T"] == pytest.approx(sum(means) / 4, abs=1e-15)
        assert "bandit" in rep.tests["across_policies"]

    def test_sample_std(self):
        rep = aggregate({("ts", "bandit"): [_run([1, 1]), _run([0, 1]), _run([0, 0])]})
        assert rep.cells[0].as_dict()["acc_T"]["std"] == pytest.approx(np.std([1, 0.5, 0], ddof=1))

    def test_wilcoxon_follows_significant_kw(self):
        grouped = {
            ("ts", "bandit"): [_run([0] * 9 + [1]) for _ in range(6)],
            ("ts", "semi-bandit"): [_run([1] * 10) for _ in range(6)],
        }
        grouped[("ts", "bandit")][0] = _run([0] * 8 + [1, 1])
        rep = aggregate(grouped)
        acc = rep.tests["across_strategies"]["ts"]["acc_T"]
        assert acc["p"] < 0.05
        assert acc["wilcoxon"][0]["a"] == "bandit" and acc["wilcoxon"][0]["n"] == 6
