import math

import numpy as np
import pytest
from scipy import optimize

from chirpcast.annealing import anneal, anneal_init, coarse_search, initial_frequencies, profile_loglik
from chirpcast.data import simulate
from chirpcast.distributions import VonMisesParams
from chirpcast.model import ChirpParams, mean_vector


def grid_argmax(f, lo, hi, n=20001):
    """Dense grid followed by bounded polishing around the best cell."""
    g = np.linspace(lo, hi, n)
    i = int(np.argmax([f(x) for x in g]))
    h = g[1] - g[0]
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(g[i] - h, g[i] + h), method="bounded",
                                   options={"xatol": 1e-10})
    return res.x


def test_zero_steps_returns_start():
    y = mean_vector(ChirpParams(1.0, 0.0, 1.0, 0.1), 20)
    rng = np.random.default_rng(0)
    start = np.random.default_rng(0).uniform(0, math.pi)
    assert anneal_init(y, "alpha", 0, rng) == start


def test_best_so_far_is_monotone():
    y = simulate(2.0, 1.25, 1.75, 1.05, math.sqrt(0.5), 40, np.random.default_rng(1))
    res = anneal(lambda a: profile_loglik(y, a, 1.05), 0.5, 200, np.random.default_rng(2))
    assert res.history.size == 201
    assert np.all(np.diff(res.history) >= 0)
    assert res.value == res.history[-1]
    assert 0 < res.x < math.pi


def test_proposals_stay_inside_interval():
    seen = []

    def f(x):
        seen.append(x)
        return -abs(x - 3.1)

    anneal(f, 3.0, 300, np.random.default_rng(3), step=1.0)
    assert all(0 < x < math.pi for x in seen)


@pytest.mark.parametrize("seed", range(5))
def test_noise_free_alpha_matches_grid_oracle(seed):
    alpha, beta, T = 2.0, 0.01, 50
    y = mean_vector(ChirpParams(2.0, 0.6, alpha, beta), T)
    oracle = grid_argmax(lambda a: profile_loglik(y, a, beta), 1e-3, math.pi - 1e-3)
    assert oracle == pytest.approx(alpha, abs=1e-6)
    found = anneal_init(y, "alpha", 500, np.random.default_rng(seed), other=beta)
    assert abs(found - oracle) < 0.05


def test_unknown_target():
    with pytest.raises(ValueError):
        anneal_init(np.ones(5), "theta", 10, np.random.default_rng(0))


def test_profile_loglik_peaks_at_truth_noise_free():
    y = mean_vector(ChirpParams(2.0, 0.6, 1.75, 1.05), 60)
    assert profile_loglik(y, 1.75, 1.05) > profile_loglik(y, 1.75 + 1e-3, 1.05)
    assert profile_loglik(y, 1.75, 1.05) > profile_loglik(y, 1.75, 1.05 + 1e-5)


def test_profile_loglik_alias_symmetry():
    y = simulate(2.0, 1.25, 1.75, 1.05, 0.7, 80, np.random.default_rng(4))
    assert profile_loglik(y, 1.75, 1.05) == pytest.approx(profile_loglik(y, math.pi - 1.75, math.pi - 1.05), rel=1e-9)


def test_coarse_search_lands_in_lobe_and_prior_picks_alias():
    T = 100
    y = simulate(2.0, 1.25, 1.75, 1.05, math.sqrt(0.5), T, np.random.default_rng(5))
    near = dict(alpha_prior=VonMisesParams(1.81, 3.0), beta_prior=VonMisesParams(1.0, 3.0))
    a, b = coarse_search(y, **near)
    assert abs(a - 1.75) < 2 * math.pi / T and abs(b - 1.05) < 1.0 / T**2
    far = dict(alpha_prior=VonMisesParams(math.pi - 1.81, 3.0), beta_prior=VonMisesParams(math.pi - 1.0, 3.0))
    a, b = coarse_search(y, **far)
    assert abs(a - (math.pi - 1.75)) < 2 * math.pi / T and abs(b - (math.pi - 1.05)) < 1.0 / T**2


def test_initial_frequencies_refines():
    T = 100
    y = simulate(2.93, 1.91, 2.5, 0.1, math.sqrt(0.5), T, np.random.default_rng(6))
    a, b = initial_frequencies(y, np.random.default_rng(7), alpha_prior=VonMisesParams(2.41, 3.0),
                               beta_prior=VonMisesParams(0.18, 3.0))
    assert abs(a - 2.5) < 0.02 and abs(b - 0.1) < 2e-4


def test_coarse_search_needs_two_points():
    with pytest.raises(ValueError):
        coarse_search(np.ones(1))
