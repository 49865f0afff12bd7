import numpy as np
import pytest

from bipmaps.bdg import PlanarMap, map_checks, map_distance, phi_build, successors_linear
from bipmaps.errors import CertificationError
from bipmaps.rng import RngStream
from bipmaps.samplers import sample_map_n, sample_mobile_n
from bipmaps.weights import FaceWeights, laws_for, power_law_with_kappa


def test_successors_linear():
    lab = np.array([0, 1, 0, -1, 2, 1, 0])
    assert successors_linear(lab).tolist() == [3, 2, 3, -1, 5, 6, -1]


@pytest.mark.parametrize("fw", [FaceWeights.uniform_tree(), FaceWeights.bimodal(), power_law_with_kappa(0.5, 5.0)])
def test_large_mobiles_give_valid_maps(fw):
    L = laws_for(fw)
    for s in range(3):
        m = sample_mobile_n(L, 300, RngStream(s, 9))
        rep = map_checks(phi_build(m), m)
        assert rep.ok, rep.violations


def test_bimodal_maps_are_quadrangulations():
    pm = sample_map_n(laws_for(FaceWeights.bimodal()), 200, RngStream(5, 0))
    assert np.all(pm.face_degrees() == 4)
    assert pm.n_vertices - pm.n_edges + pm.n_faces == 2


def test_record_round_trip_preserves_the_rooted_map():
    pm = sample_map_n(laws_for(FaceWeights.uniform_tree()), 80, RngStream(6, 0))
    q = PlanarMap.from_record(pm.to_record())
    assert q.canonical_code() == pm.canonical_code()


def test_ball_requires_complete_vertices():
    pm = sample_map_n(laws_for(FaceWeights.uniform_tree()), 80, RngStream(7, 0))
    pm.complete[:] = False
    with pytest.raises(CertificationError):
        pm.ball(2)


def test_map_distance_of_a_map_to_itself():
    pm = sample_map_n(laws_for(FaceWeights.uniform_tree()), 50, RngStream(8, 0))
    other = sample_map_n(laws_for(FaceWeights.uniform_tree()), 50, RngStream(9, 0))
    d = map_distance(pm, other, 6)
    assert float(map_distance(pm, pm, 60)) == 0.0
    assert 0 < float(d) <= 1


def test_dot_export_lists_every_edge():
    pm = sample_map_n(laws_for(FaceWeights.uniform_tree()), 20, RngStream(10, 0))
    dot = pm.to_dot()
    assert dot.count(" -- ") == pm.n_edges
