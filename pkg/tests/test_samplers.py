from fractions import Fraction

import numpy as np
import pytest

from bipmaps.errors import CapacityError
from bipmaps.rng import RngStream
from bipmaps.samplers import (LimitMobile, lr_exact, lr_product, limit_ball, sample_decoration_size,
                              sample_limit_mobile, sample_LR, sample_uiptree_ball, sample_Yn, yn_exact)
from bipmaps.weights import FaceWeights, laws_for, power_law_with_kappa

COND = power_law_with_kappa(0.5, 5.0)


def test_streams_are_reproducible():
    a = RngStream(3, 4).derive(2).gen.random(5)
    b = RngStream(3, 4).derive(2).gen.random(5)
    c = RngStream(3, 4).derive(3).gen.random(5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


@pytest.mark.parametrize("seed", range(6))
def test_filtered_ball_equals_unfiltered(seed):
    L = laws_for(COND)
    a = limit_ball(L, 3, RngStream(seed, 0), filtered=True).ball
    b = limit_ball(L, 3, RngStream(seed, 0), filtered=False).ball
    assert a.canonical_code() == b.canonical_code()


def test_uiptree_two_constructions_have_the_same_law():
    # the infinite-star construction hits the capacity cap now and then
    st = RngStream(11, 1)
    a = []
    for k in range(400):
        try:
            a.append(sample_uiptree_ball(1, st.derive(0).derive(k), method="map").n_vertices)
        except CapacityError:
            pass
    b = [sample_uiptree_ball(1, st.derive(1).derive(k), method="tree").n_vertices for k in range(400)]
    assert len(a) >= 395
    sd = np.sqrt(np.var(a) / len(a) + np.var(b) / len(b))
    assert abs(np.mean(a) - np.mean(b)) < 4 * sd


def test_limit_mobile_truncation_is_a_valid_mobile():
    tr = sample_limit_mobile(laws_for(COND), RngStream(2, 0), window=(20, 20))
    assert tr.infinite_vertex is not None
    assert tr.spine_length % 2 == 1
    assert len(tr.increments[1]) == 20 and np.all(tr.increments[1] >= -1)


def test_spine_is_infinite_for_uniform_weights():
    lm = LimitMobile(laws_for(FaceWeights.uniform_tree()), RngStream(0, 0))
    assert lm.phase == "spine" and lm.spine_length is None


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_yn_exact_values(n, oracle):
    ex = yn_exact(n)
    assert ex["p0"] == Fraction(oracle["yn_p0"][str(n)])
    y = sample_Yn(n, RngStream(n, 2), 20000)
    assert abs((y == 0).mean() - float(ex["p0"])) < 4 * np.sqrt(float(ex["p0"]) / 20000)


@pytest.mark.parametrize("R", [1, 2, 7, 10, 15])
def test_lr_closed_form_equals_product_form(R):
    tot = Fraction(0)
    for k in range(R // 2 + 1):
        assert lr_exact(R, k) == lr_product(R, k)
        tot += lr_exact(R, k)
    assert tot == 1


def test_lr_sampler_support():
    x = sample_LR(10, RngStream(1, 1), 5000)
    assert x.min() >= 0 and x.max() <= 5


def test_ordinary_decoration_mean():
    L = laws_for(COND)
    st = RngStream(9, 0)
    sizes = [sample_decoration_size(L, False, st.derive(k)) for k in range(4000)]
    assert all(s >= 1 for s in sizes)
    assert np.median(sizes) < 10
