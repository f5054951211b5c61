import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacircles.automaton import best_action, init_uniform, lri_update, select_action
from lacircles.errors import EmptyActionSetError


def run_rigged(seed, n=10, theta=0.1, cycles=500):
    """Environment where action 0 pays 0.9 and every other action at most 0.2."""
    rng = np.random.default_rng(seed)
    payoff = np.concatenate([[0.9], rng.uniform(0.0, 0.2, n - 1)])
    p = init_uniform(n)
    for _ in range(cycles):
        a = select_action(p, rng.random())
        p = lri_update(p, a, payoff[a], theta)
    return best_action(p)


class TestInitUniform:
    def test_four(self):
        np.testing.assert_array_equal(init_uniform(4), [0.25] * 4)

    def test_one(self):
        np.testing.assert_array_equal(init_uniform(1), [1.0])

    def test_sum(self):
        assert abs(init_uniform(3).sum() - 1.0) <= 1e-15

    def test_empty(self):
        with pytest.raises(EmptyActionSetError):
            init_uniform(0)


class TestLRIUpdate:
    def test_inaction(self):
        np.testing.assert_array_equal(lri_update([0.5, 0.5], 0, 0.0, 0.1), [0.5, 0.5])

    def test_full_reward(self):
        np.testing.assert_allclose(lri_update([0.5, 0.5], 0, 1.0, 0.1), [0.55, 0.45], rtol=0, atol=1e-15)

    def test_table_theta(self):
        out = lri_update([0.2, 0.3, 0.5], 2, 0.5, 0.003)
        expected = [0.2 * 0.9985, 0.3 * 0.9985, 0.5 + 0.0015 * 0.5]
        np.testing.assert_allclose(out, expected, rtol=0, atol=1e-15)

    def test_input_not_modified(self):
        p = np.array([0.25, 0.75])
        lri_update(p, 1, 0.7, 0.2)
        np.testing.assert_array_equal(p, [0.25, 0.75])

    def test_index_error(self):
        with pytest.raises(IndexError):
            lri_update([0.5, 0.5], 2, 1.0, 0.1)

    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.2, 1.5])
    def test_theta_range(self, theta):
        with pytest.raises(ValueError):
            lri_update([0.5, 0.5], 0, 1.0, theta)

    def test_batched_matches_scalar(self):
        rng = np.random.default_rng(0)
        p = rng.dirichlet(np.ones(6), size=20)
        chosen = rng.integers(0, 6, 20)
        beta = rng.random(20)
        out = lri_update(p, chosen, beta, 0.05)
        for i in range(20):
            np.testing.assert_array_equal(out[i], lri_update(p[i], int(chosen[i]), beta[i], 0.05))

    @settings(max_examples=300, deadline=None)
    @given(
        st.integers(1, 12).flatmap(
            lambda n: st.tuples(
                st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n),
                st.integers(0, n - 1),
            )
        ),
        st.floats(0.0, 1.0),
        st.floats(1e-4, 0.999),
    )
    def test_properties(self, vec_and_idx, beta, theta):
        raw, r = vec_and_idx
        p = np.array(raw) / np.sum(raw)
        out = lri_update(p, r, beta, theta)
        assert abs(out.sum() - 1.0) <= 1e-12
        assert out[r] >= p[r]
        others = np.arange(len(p)) != r
        assert np.all(out[others] <= p[others])
        assert np.all((out >= 0) & (out <= 1))


class TestSelectAction:
    def test_first_bucket(self):
        assert select_action([0.25] * 4, 0.0) == 0

    def test_cumulative_rule(self):
        assert select_action([0.25] * 4, 0.26) == 1

    def test_last_bucket(self):
        assert select_action([0.1, 0.9], 0.95) == 1

    def test_boundary_is_strict(self):
        # cumulative sum must strictly exceed z
        assert select_action([0.25] * 4, 0.25) == 1
        assert select_action([0.0, 1.0], 0.0) == 1

    def test_frequencies_within_three_sigma(self):
        p = np.array([0.05, 0.15, 0.3, 0.5])
        rng = np.random.default_rng(11)
        draws = 100_000
        counts = np.bincount([select_action(p, z) for z in rng.random(draws)], minlength=4)
        sigma = np.sqrt(draws * p * (1 - p))
        assert np.all(np.abs(counts - draws * p) <= 3 * sigma)


class TestBestAction:
    def test_simple(self):
        assert best_action([0.2, 0.5, 0.3]) == 1

    def test_tie_lowest_index(self):
        assert best_action([0.5, 0.5]) == 0

    def test_after_rewards(self):
        p = init_uniform(5)
        for _ in range(200):
            p = lri_update(p, 3, 1.0, 0.1)
        assert best_action(p) == 3


def test_rigged_environment_convergence():
    hits = sum(run_rigged(seed) == 0 for seed in range(100))
    assert hits >= 95
