import math

import numpy as np
import pytest

from bipmaps.errors import PhaseError
from bipmaps.resistance import (ResistorNetwork, certified_star_structure, decoration_statistics, effective_resistance,
                                j_lambda, parallel_resistance, project_network, random_network, series_resistance,
                                shorting_check, volume_profile)
from bipmaps.rng import RngStream
from bipmaps.weights import FaceWeights, laws_for, power_law_with_kappa

COND = power_law_with_kappa(0.5, 5.0)


def test_series_and_parallel():
    for n in range(1, 6):
        net = ResistorNetwork.unit(n + 1, [(i, i + 1) for i in range(n)], [0], [n])
        for m in ("dense", "cg", "tree"):
            assert effective_resistance(net, m) == pytest.approx(n, abs=1e-12)
    assert effective_resistance(ResistorNetwork.unit(2, [(0, 1), (0, 1)], [0], [1])) == pytest.approx(0.5)
    assert series_resistance([1, 2, 3]) == 6 and parallel_resistance([2, 2]) == 1


def test_theta_graph_against_formula():
    # three parallel paths of lengths 1, 2 and 3
    edges = [(0, 1), (0, 2), (2, 1), (0, 3), (3, 4), (4, 1)]
    net = ResistorNetwork.unit(5, edges, [0], [1])
    assert effective_resistance(net) == pytest.approx(1 / (1 + 1 / 2 + 1 / 3), abs=1e-12)


def test_infinite_edges_are_contracted():
    net = ResistorNetwork(3, [0, 1], [1, 2], [math.inf, 1.0], [0], [2])
    assert effective_resistance(net) == pytest.approx(1.0)
    assert effective_resistance(ResistorNetwork(2, [0], [1], [math.inf], [0], [1])) == 0.0


def test_disconnected_is_infinite():
    net = ResistorNetwork.unit(4, [(0, 1), (2, 3)], [0], [3])
    assert effective_resistance(net) == math.inf


def test_dense_and_cg_agree():
    for s in range(10):
        net = random_network(50, 60, RngStream(s, 0)).with_terminals([0], [49])
        a, b = effective_resistance(net, "dense"), effective_resistance(net, "cg")
        assert abs(a - b) <= 1e-9 * a


def test_rayleigh_monotonicity_fuzz():
    gen = np.random.default_rng(5)
    for s in range(1000):
        net = random_network(8, 6, RngStream(s, 1)).with_terminals([0], [7])
        k = int(gen.integers(len(net.u)))
        assert effective_resistance(net.without_edge(k)) >= effective_resistance(net) - 1e-12


@pytest.fixture(scope="module")
def star():
    return certified_star_structure(laws_for(COND), 8, RngStream(1, 0))


def test_dsharp_basics(star):
    dec = np.flatnonzero(~star.is_star)
    assert star.dsharp(int(dec[0]), int(dec[0])) == 0
    same = [v for v in dec if star.star_of[v] == star.star_of[dec[0]]]
    if len(same) > 1:
        assert star.dsharp(int(same[0]), int(same[1])) == 2
    sv = star.star_vertex
    ds = star.star_pm.distances_from(0)
    for k in range(1, min(len(sv), 30)):
        assert star.dsharp(int(sv[0]), int(sv[k])) == ds[k]


def test_dsharp_triangle_inequality(star):
    gen = np.random.default_rng(1)
    V = np.flatnonzero(star.ball_mask(8))
    for _ in range(10000):
        a, b, c = (int(x) for x in gen.choice(V, 3))
        assert star.dsharp(a, c) <= star.dsharp(a, b) + star.dsharp(b, c)


def test_projection_conserves_length(star):
    pn = project_network(star, 8)
    assert pn.conserved
    e = star.ball_edges(8)
    _, _, length = star.project_edges(e)
    assert pn.length_sq_total == int((length**2).sum())


def test_single_edge_routing():
    ss = certified_star_structure(laws_for(COND), 6, RngStream(2, 0))
    e = ss.ball_edges(6)
    c, count, length = ss.project_edges(e)
    k = int(np.argmax(length))
    c1, n1, l1 = ss.project_edges(e[k:k + 1])
    L = int(l1[0])
    assert int((n1 > 0).sum()) == L and np.all(c1[n1 > 0] == L)
    flat = np.flatnonzero(length == 0)
    if len(flat):
        c0, _, _ = ss.project_edges(e[flat[:1]])
        assert c0.sum() == 0


def test_shorting_inequality(star):
    assert shorting_check(star, 8)["holds"]


def test_uiptree_star_map_is_the_map():
    ss = certified_star_structure(laws_for(FaceWeights("factorial", c=1)), 8, RngStream(3, 0))
    assert ss.pm.n_vertices == ss.star_pm.n_vertices and bool(np.all(ss.is_star))


def test_spine_phase_rejected():
    with pytest.raises(PhaseError):
        certified_star_structure(laws_for(FaceWeights.uniform_tree()), 4, RngStream(0, 0))


def test_volume_profile_monotone(star):
    vp = volume_profile(star, range(1, 9))
    assert all(np.diff(vp.omega) >= 0) and all(np.diff(vp.star_ball) >= 0)
    assert vp.omega[0] >= 1


def test_decoration_statistics_invariants(star):
    d = decoration_statistics(star)
    assert np.all(d.delta_l >= 0) and np.all(d.size >= 1)
    ip = [d.i_plus[R] for R in sorted(d.i_plus)]
    im = [d.i_minus[R] for R in sorted(d.i_minus)]
    assert ip == sorted(ip) and im == sorted(im)
    for R, m in d.m.items():
        assert m <= -R
    with pytest.raises(Exception):
        decoration_statistics(star, 10**6)


def test_j_lambda_monotone_in_lambda(star):
    a = j_lambda(star, 6, 2.0)
    b = j_lambda(star, 6, 50.0)
    for f in ("vol_lower", "vol_upper", "res_lower"):
        assert getattr(b, f) >= getattr(a, f)
