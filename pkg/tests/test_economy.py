import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from firmsim.economy import (bonus, bonuses, individual_output,
                             mean_coop_others, profitability, reward)


class TestIndividualOutput:
    def test_balanced(self):
        assert individual_output(4.0, 4.0, 0.5, 1.0, 1.0) == pytest.approx(4.0)

    def test_zero_individual_time(self):
        assert individual_output(0.0, 4.0, 0.5, 1.5, 1.0) == 0.0

    def test_productivity_scales(self):
        assert individual_output(4.0, 4.0, 0.5, 1.5, 1.0) == pytest.approx(6.0)

    def test_zero_conventions(self):
        assert individual_output(3.0, 0.0, 0.0, 1.0, 1.0) == pytest.approx(3.0)
        assert individual_output(0.0, 3.0, 1.0, 1.0, 1.0) == pytest.approx(3.0)

    @given(p=st.floats(0, 8), cbar=st.floats(0, 8), k=st.floats(0, 1),
           scale=st.floats(0.1, 4))
    def test_degree_one_homogeneity(self, p, cbar, k, scale):
        base = individual_output(p, cbar, k, 1.0, 1.0)
        scaled = individual_output(scale * p, scale * cbar, k, 1.0, 1.0)
        assert scaled == pytest.approx(scale * base, rel=1e-9, abs=1e-12)


class TestMeanCoopOthers:
    def test_excludes_self(self):
        c = np.array([1.0, 3.0, 5.0])
        assert np.allclose(mean_coop_others(c), [4.0, 3.0, 2.0])


class TestBonus:
    def test_pure_individual(self):
        assert bonus(2.0, [2.0, 4.0], 0.0) == 2.0

    def test_pure_group(self):
        assert np.allclose(bonuses(np.array([2.0, 4.0]), 1.0), [3.0, 3.0])

    def test_mixed(self):
        assert bonus(2.0, [2.0, 4.0], 0.5) == pytest.approx(2.5)

    @given(st.lists(st.floats(0, 100), min_size=2, max_size=30),
           st.floats(0, 1))
    def test_conservation(self, outputs, lam):
        arr = np.asarray(outputs)
        assert bonuses(arr, lam).sum() == pytest.approx(arr.sum(), rel=1e-9, abs=1e-9)


class TestReward:
    def test_no_rewards(self):
        assert reward(8.0, 0.0, 123.0) == 8.0

    def test_full_intensity(self):
        assert reward(8.0, 1.0, 3.0) == 11.0

    def test_half_intensity(self):
        assert reward(8.0, 0.5, 4.0) == 10.0


class TestProfitability:
    def test_no_output(self):
        assert profitability([0.0, 0.0], [8.0, 8.0]) == 0.0

    def test_ratio(self):
        assert profitability([300.0], [1100.0]) == pytest.approx(0.272727, abs=1e-6)

    def test_single_agent_group(self):
        assert profitability([4.0], [11.0]) == pytest.approx(0.363636, abs=1e-6)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        o = rng.random(20)
        r = rng.random(20) + 1.0
        perm = rng.permutation(20)
        assert profitability(o, r) == pytest.approx(profitability(o[perm], r[perm]))

    def test_zero_rewards_asserts(self):
        with pytest.raises(AssertionError):
            profitability([1.0], [0.0])
