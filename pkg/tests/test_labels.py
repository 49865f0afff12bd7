import numpy as np
import pytest

from bipmaps.labels import (all_labelings, bridge_count, count_labelings, enumerate_bridges, random_labels,
                            sample_bridges)
from bipmaps.oracle import enumerate_trees
from bipmaps.rng import RngStream


@pytest.mark.parametrize("r", range(1, 9))
def test_bridge_enumeration(r, oracle):
    br = enumerate_bridges(r)
    assert len(br) == len(set(br)) == oracle["bridge_counts"][str(r)] == bridge_count(r)
    assert all(sum(b) == 0 and min(b) >= -1 for b in br)


@pytest.mark.parametrize("method", ["rejection", "exact"])
def test_sampled_bridges_are_bridges(method):
    b = sample_bridges(7, 2000, RngStream(3, 0), method)
    assert b.shape == (2000, 7)
    assert np.all(b.sum(axis=1) == 0) and b.min() >= -1


def test_sampled_bridges_uniform():
    r = 3
    b = sample_bridges(r, 60000, RngStream(4, 0), "exact")
    keys, counts = np.unique(b, axis=0, return_counts=True)
    assert len(keys) == bridge_count(r)
    expected = 60000 / bridge_count(r)
    assert np.all(np.abs(counts - expected) < 5 * np.sqrt(expected))


def test_labelings_match_product_formula():
    for t in enumerate_trees(4):
        ms = list(all_labelings(t))
        assert len(ms) == count_labelings(t)
        assert all(not m.check() for m in ms)


def test_random_labels_obey_rule():
    from bipmaps.labels import Mobile
    t = enumerate_trees(6)[37]
    for s in range(20):
        m = Mobile(t, random_labels(t, RngStream(s, 1)))
        assert not m.check()
