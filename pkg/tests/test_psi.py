import pytest

from bipmaps.oracle import enumerate_trees
from bipmaps.psi import psi_forward, psi_inverse
from bipmaps.rng import RngStream
from bipmaps.samplers import sample_sgt_n
from bipmaps.trees import BLACK
from bipmaps.weights import FaceWeights, laws_for, power_law_with_kappa


def test_bijective_for_small_sizes():
    for n in range(1, 7):
        trees = enumerate_trees(n)
        images = {psi_forward(t)[0].key() for t in trees}
        assert images == {t.key() for t in trees}


@pytest.mark.parametrize("fw", [FaceWeights.uniform_tree(), power_law_with_kappa(0.5, 5.0)])
def test_round_trip_on_large_trees(fw):
    L = laws_for(fw)
    for s in range(5):
        t = sample_sgt_n(L, 400, RngStream(s, 5))
        img, tr = psi_forward(t)
        assert psi_inverse(img).key() == t.key()
        deg = img.degree()
        for v in range(t.n_vertices):
            if t.outdeg[v] > 0:
                assert img.colour[tr.vertex_map[v]] == BLACK
                assert deg[tr.vertex_map[v]] == t.outdeg[v]
            else:
                assert deg[tr.vertex_map[v]] == tr.eta[v]
