import copy
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbsb.combinatorial import build_super_arm, overall_reward
from pbsb.core import SuperArm, make_rng
from pbsb.policies import POLICIES, UCB1, EpsilonGreedy, make_policy


def test_exhaustive_selection():
    s = build_super_arm(UCB1(3), None, 3, make_rng(0))
    assert sorted(s) == [0, 1, 2]


def test_fresh_ucb_picks_distinct_unpulled():
    p = UCB1(5)
    p.update(0, None, 1.0)
    p.update(1, None, 1.0)
    p.update(2, None, 1.0)
    s = build_super_arm(p, None, 2, make_rng(1))
    assert set(s) == {3, 4}


def test_greedy_top2_in_order():
    p = EpsilonGreedy(4, epsilon=0.0)
    p.n[:] = 10
    p.s[:] = [9, 1, 5, 7]
    assert build_super_arm(p, None, 2, make_rng(0)).arms == (0, 3)


def test_k_too_large():
    with pytest.raises(ValueError):
        build_super_arm(UCB1(3), None, 4, make_rng(0))


@pytest.mark.parametrize("name", sorted(POLICIES))
@pytest.mark.parametrize("seed", range(5))
def test_no_duplicates_and_frozen_state(name, seed):
    rng = make_rng(seed)
    p = make_policy(name, 8, 3)
    for _ in range(30):
        x = rng.normal(size=3)
        p.update(int(rng.integers(8)), x, float(rng.random()), individual=True)
    twin = copy.deepcopy(p)
    before = p.state()
    x = rng.normal(size=3)
    s = build_super_arm(p, x, 5, make_rng(seed + 100))
    assert len(set(s)) == 5
    after = p.state()
    assert before.keys() == after.keys()
    assert all(np.array_equal(before[k], after[k]) for k in before)
    assert build_super_arm(twin, x, 5, make_rng(seed + 100)) == s


class TestOverallReward:
    Y = {1: 0, 2: 0, 3: 1}

    def test_all_miss(self):
        assert overall_reward(SuperArm((1, 2)), self.Y) == 0

    def test_one_hit(self):
        assert overall_reward(SuperArm((1, 3)), self.Y) == 1

    def test_all_hit(self):
        assert overall_reward(SuperArm((1, 2, 3)), {1: 1, 2: 1, 3: 1}) == 1

    def test_missing_arm(self):
        with pytest.raises(KeyError):
            overall_reward(SuperArm((1, 4)), self.Y)

    @pytest.mark.parametrize("m", range(1, 7))
    def test_equals_max_over_all_subsets(self, m):
        for y in itertools.product((0, 1), repeat=m):
            for k in range(1, m + 1):
                for subset in itertools.combinations(range(m), k):
                    assert overall_reward(subset, np.array(y)) == max(y[a] for a in subset)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.data())
def test_build_is_permutation_of_k_arms(m, data):
    k = data.draw(st.integers(1, m))
    name = data.draw(st.sampled_from(sorted(POLICIES)))
    s = build_super_arm(make_policy(name, m, 2), np.ones(2), k, make_rng(data.draw(st.integers(0, 1000))))
    assert len(s) == k and len(set(s)) == k and all(0 <= a < m for a in s)
