import math
import warnings

import numpy as np
import pytest

from bipmaps.errors import PhaseError
from bipmaps.rng import RngStream
from bipmaps.samplers import limit_ball, sample_map_n
from bipmaps.walks import (BallTooSmall, degree_bound_law, dkw_epsilon, dominance_test, exact_return_prob,
                           fit_spectral_dimension, last_increment_law, root_degree, run_srw,
                           sample_degree_bound, survival_slope)
from bipmaps.weights import FaceWeights, laws_for, power_law_with_kappa

COND = power_law_with_kappa(0.5, 5.0)


def test_walk_return_probabilities_match_exact():
    ball = sample_map_n(laws_for(FaceWeights.uniform_tree()), 6, RngStream(3, 0))
    ws = run_srw(ball, 6, 40000, RngStream(3, 1))
    for t in (2, 4, 6):
        p = float(exact_return_prob(ball, t))
        assert abs(ws.p_hat[t // 2] - p) < 4 * math.sqrt(p * (1 - p) / 40000) + 1e-12


def test_walkers_never_leave_the_certified_ball():
    ball = limit_ball(laws_for(COND), 2, RngStream(4, 0)).ball
    with pytest.raises(BallTooSmall):
        run_srw(ball, 400, 200, RngStream(4, 1))


def test_fit_recovers_a_pure_power_law():
    n = np.arange(1, 5000, dtype=float)
    p = np.concatenate([[1.0], n ** (-2 / 3)])
    fit = fit_spectral_dimension(p)
    assert fit.ds_estimate == pytest.approx(4 / 3, abs=2e-3)


def test_fit_drops_empty_bins_with_warning():
    p = np.zeros(5000)
    p[0] = 1
    p[1:3000] = np.arange(1, 3000) ** -1.0
    with pytest.warns(UserWarning):
        fit_spectral_dimension(p)


def test_last_increment_law_sums_to_one():
    for r in (1, 2, 5, 40):
        law = last_increment_law(r)
        assert sum(law.values()) == pytest.approx(1.0)


def test_degree_bound_law_moments():
    dbl = degree_bound_law(laws_for(power_law_with_kappa(0.8, 4.0)))
    x = sample_degree_bound(dbl, RngStream(1, 1), 100000)
    assert x.mean() == pytest.approx(dbl.mean, rel=0.05)
    assert x.min() >= 4


def test_degree_bound_needs_condensation():
    with pytest.raises(PhaseError):
        degree_bound_law(laws_for(FaceWeights("factorial", c=1)))


@pytest.mark.parametrize("seed", range(12))
def test_fast_root_degree_matches_the_ball(seed):
    L = laws_for(COND)
    d = root_degree(L, RngStream(seed, 0))
    ball = limit_ball(L, 1, RngStream(seed, 0)).ball
    assert d == ball.degree(ball.root_vertex)


def test_dkw_and_slope_helpers(oracle):
    assert dkw_epsilon(10**5, 0.01) == pytest.approx(oracle["dkw_eps_1e5_alpha001"])
    x = np.random.default_rng(0).geometric(0.3, 20000)
    assert survival_slope(x) < 0


def test_dominance_counts_unresolved_as_infinite():
    dbl = degree_bound_law(laws_for(COND))
    x = np.full(1000, 4)
    assert dominance_test(x, dbl)["passed"]
    x[:50] = -1
    assert dominance_test(x, dbl)["unresolved"] == 50
