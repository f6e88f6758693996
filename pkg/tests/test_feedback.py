import copy

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbsb.core import SuperArm, make_rng, sample_patience
from pbsb.feedback import Strategy, apply_strategy, select_partial_subset
from pbsb.policies import POLICIES, UCB1, UCB2, EpsilonGreedy, ThompsonSampling, make_policy

PARTIAL = [Strategy.PBSB_RE, Strategy.PBSB_OE, Strategy.PBSB_RD]


def _greedy_with_means(means):
    p = EpsilonGreedy(len(means), epsilon=0.0)
    p.n[:] = 100
    p.s[:] = np.asarray(means) * 100
    return p


class TestSelectPartialSubset:
    def test_re_top_estimates(self):
        # a=0, b=1, c=2
        p = _greedy_with_means([0.9, 0.2, 0.5])
        subset = select_partial_subset("pbsb-re", SuperArm((0, 1, 2)), p, None, 2, make_rng(0))
        assert subset == [0, 2]

    def test_oe_least_observed(self):
        p = UCB1(3)
        p.obs[:] = [5, 1, 3]
        assert select_partial_subset("pbsb-oe", (0, 1, 2), p, None, 1, make_rng(0)) == [1]

    def test_rd_saturates(self):
        subset = select_partial_subset("pbsb-rd", (4, 1, 7), UCB1(8), None, 3, make_rng(0))
        assert sorted(subset) == [1, 4, 7]

    def test_psi_above_k_clipped(self):
        assert len(select_partial_subset("pbsb-re", (0, 1), UCB1(3), None, 5, make_rng(0))) == 2

    def test_rd_uniform(self):
        rng = make_rng(3)
        counts = np.zeros(5)
        for _ in range(20_000):
            for a in select_partial_subset("pbsb-rd", range(5), UCB1(5), None, 2, rng):
                counts[a] += 1
        assert np.allclose(counts / 20_000, 0.4, atol=0.015)

    def test_non_partial_rejected(self):
        with pytest.raises(ValueError):
            select_partial_subset("bandit", (0, 1), UCB1(2), None, 1, make_rng(0))

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.integers(0, 4), min_size=6, max_size=6), st.integers(0, 6), st.integers(0, 99))
    def test_subset_ordering(self, obs, psi, seed):
        rng = make_rng(seed)
        p = _greedy_with_means(rng.random(6))
        p.obs[:] = obs
        s = SuperArm(tuple(rng.permutation(6)[:4].tolist()))
        est = p.estimates(None)
        re = select_partial_subset("pbsb-re", s, p, None, psi, rng)
        rest = [a for a in s if a not in re]
        assert len(re) == min(psi, 4)
        assert all(est[a] >= est[b] - 1e-12 for a in re for b in rest)
        oe = select_partial_subset("pbsb-oe", s, p, None, psi, rng)
        rest = [a for a in s if a not in oe]
        assert all(p.obs[a] <= p.obs[b] for a in oe for b in rest)


class TestApplyStrategy:
    @pytest.mark.parametrize("kind", PARTIAL)
    @pytest.mark.parametrize("name", sorted(POLICIES))
    def test_psi_zero_is_silent(self, kind, name):
        p = make_policy(name, 4, 2)
        before = p.state()
        out = apply_strategy(kind, p, SuperArm((0, 2)), np.array([1, 1, 1, 1]), 0, make_rng(0), np.ones(2))
        assert out == ()
        after = p.state()
        assert all(np.array_equal(before[k], after[k]) for k in before)

    def test_twin_reward_trace(self):
        # S = {1,2,3}, P = {1,3}, Y = {1:1, 2:0, 3:0}; mean observed reward 1/2
        p = UCB1(4)
        p.obs[:] = [0, 0, 5, 0]  # steer OE onto arms 1 and 3
        y = {1: 1, 2: 0, 3: 0}
        out = apply_strategy("pbsb-oe", p, SuperArm((1, 2, 3)), y, 2, make_rng(0))
        assert sorted(o.arm for o in out) == [1, 3]
        assert (p.n[1], p.s[1]) == (2, 1.5)
        assert (p.n[2], p.s[2]) == (1, 0.5)
        assert (p.n[3], p.s[3]) == (2, 0.5)
        assert p.obs.tolist() == [0, 1, 5, 1]

    def test_semi_bandit_pass_through(self):
        p = UCB1(3)
        apply_strategy("semi-bandit", p, SuperArm((1, 2)), {1: 1, 2: 0})
        assert (p.n[1], p.s[1], p.obs[1]) == (1, 1, 1)
        assert (p.n[2], p.s[2], p.obs[2]) == (1, 0, 1)

    def test_bandit_normalized(self):
        p = ThompsonSampling(4)
        out = apply_strategy("bandit", p, SuperArm((0, 1, 3)), [1, 1, 0, 0])
        assert len(out) == 3
        np.testing.assert_allclose(p.alpha, [1 + 2 / 3, 1 + 2 / 3, 1, 1 + 2 / 3])
        assert p.obs.tolist() == [0, 0, 0, 0]

    def test_bandit_raw(self):
        p = UCB1(3)
        apply_strategy("bandit", p, SuperArm((0, 1)), [1, 1, 0], bandit_reward="raw")
        assert p.s.tolist() == [2.0, 2.0, 0.0]

    def test_pbsb_raw(self):
        p = UCB1(3)
        apply_strategy("pbsb-rd", p, SuperArm((0, 1, 2)), [1, 1, 0], 3, make_rng(0), bandit_reward="raw")
        assert p.s.tolist() == [3.0, 3.0, 2.0]

    def test_update_order(self):
        calls = []

        class Recorder(UCB1):
            def update(self, arm, context, reward, individual=False, raw=False):
                calls.append((arm, individual))
                super().update(arm, context, reward, individual, raw)

        p = Recorder(5)
        p.obs[:] = [9, 0, 9, 1, 9]
        apply_strategy("pbsb-oe", p, SuperArm((3, 0, 1)), np.zeros(5), 2, make_rng(0))
        assert calls == [(3, False), (0, False), (1, False), (1, True), (3, True)]

    def test_errors(self):
        with pytest.raises(ValueError):
            apply_strategy("pbsb-re", UCB1(2), (0, 1), [0, 1], -1, make_rng(0))
        with pytest.raises(KeyError):
            apply_strategy("semi-bandit", UCB1(3), (0, 2), {0: 1})
        with pytest.raises(ValueError):
            apply_strategy("nope", UCB1(2), (0, 1), [0, 1])

    def test_strategy_names(self):
        assert [s.value for s in Strategy] == ["bandit", "semi-bandit", "pbsb-re", "pbsb-oe", "pbsb-rd"]


class _Recorder:
    """Wraps a policy and logs every update call."""

    def __init__(self, inner):
        self.inner = inner
        self.log = []

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def update(self, arm, context, reward, individual=False, raw=False):
        self.log.append((arm, reward, individual))
        self.inner.update(arm, context, reward, individual, raw)


@pytest.mark.parametrize("kind", PARTIAL)
def test_full_patience_matches_semi_bandit(kind):
    rng = make_rng(21)
    a, b = _Recorder(UCB2(10)), _Recorder(UCB2(10))
    for _ in range(200):
        s = SuperArm(tuple(rng.permutation(10)[:4].tolist()))
        y = (rng.random(10) < 0.4).astype(int)
        apply_strategy(kind, a, s, y, 4, rng)
        apply_strategy("semi-bandit", b, s, y)
    individual_a = sorted((arm, r) for arm, r, ind in a.log if ind)
    individual_b = sorted((arm, r) for arm, r, ind in b.log if ind)
    assert individual_a == individual_b


@pytest.mark.parametrize("kind", PARTIAL)
def test_feedback_economy(kind):
    rng = make_rng(5)
    p = ThompsonSampling(20)
    observed = 0
    T, k = 10_000, 10
    for _ in range(T):
        s = SuperArm(tuple(rng.permutation(20)[:k].tolist()))
        y = (rng.random(20) < 0.5).astype(int)
        observed += len(apply_strategy(kind, p, s, y, sample_patience(rng, 4), rng))
    assert abs(observed / (k * T) - 0.20) <= 0.01


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([s.value for s in Strategy]), st.integers(0, 5), st.integers(0, 10_000))
def test_only_super_arm_updated_and_rewards_bounded(kind, psi, seed):
    rng = make_rng(seed)
    base = _Recorder(ThompsonSampling(8))
    s = SuperArm(tuple(rng.permutation(8)[:5].tolist()))
    y = (rng.random(8) < 0.5).astype(int)
    before = copy.deepcopy(base.inner.state())
    apply_strategy(kind, base, s, y, psi, rng)
    assert all(arm in s for arm, _, _ in base.log)
    assert all(0.0 <= r <= 1.0 for _, r, _ in base.log)
    after = base.inner.state()
    outside = [a for a in range(8) if a not in s]
    assert np.array_equal(before["alpha"][outside], after["alpha"][outside])
