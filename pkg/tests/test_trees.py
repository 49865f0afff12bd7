import numpy as np
import pytest

from bipmaps.oracle import enumerate_trees, lukasiewicz_words
from bipmaps.rng import RngStream
from bipmaps.samplers import sample_sgt_n
from bipmaps.trees import BLACK, WHITE, PlaneTree, catalan
from bipmaps.weights import FaceWeights, laws_for


def test_lukasiewicz_counts(oracle):
    for n in range(1, 8):
        assert sum(1 for _ in lukasiewicz_words(n)) == oracle["catalan"][str(n)] == catalan(n)


def test_keys_distinguish_trees():
    trees = enumerate_trees(5)
    assert len({t.key() for t in trees}) == len(trees)


def test_colours_alternate_by_depth():
    t = PlaneTree.from_outdegrees([2, 1, 0, 0])
    assert t.colour[0] == WHITE
    assert np.all(t.colour[t.depth % 2 == 1] == BLACK)


def test_json_round_trip():
    t = sample_sgt_n(laws_for(FaceWeights.uniform_tree()), 60, RngStream(1, 0))
    assert t.n_edges == 60
    u = PlaneTree.from_json(t.to_json())
    assert u.key() == t.key()


def test_subtree_sizes_add_up():
    t = sample_sgt_n(laws_for(FaceWeights.uniform_tree()), 100, RngStream(2, 0))
    assert t.subtree_size[0] == t.n_vertices
    assert int(t.degree().sum()) == 2 * t.n_edges


@pytest.mark.parametrize("seed", range(3))
def test_sampled_tree_size_is_exact(seed):
    t = sample_sgt_n(laws_for(FaceWeights.bimodal()), 40, RngStream(seed, 3))
    assert t.n_edges == 40
    # only outdegrees 0 and 2 carry weight
    assert set(np.unique(t.outdeg).tolist()) <= {0, 2}
