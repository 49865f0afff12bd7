from fractions import Fraction

import pytest

from bipmaps.errors import CapacityError, StructuralError
from bipmaps.oracle import (ExactDistribution, brute_force_label_count, enumerate_alternating_trees,
                            enumerate_rooted_maps, exact_mu_n, exact_nu_pushforward, enumerate_trees)
from bipmaps.labels import count_labelings
from bipmaps.weights import FaceWeights, derive_tree_weights


def test_exact_distribution_checks_mass():
    ExactDistribution({"a": Fraction(1, 2), "b": Fraction(1, 2)})
    with pytest.raises(StructuralError):
        ExactDistribution({"a": Fraction(1, 3)})


def test_caps():
    with pytest.raises(CapacityError):
        enumerate_rooted_maps(5)
    with pytest.raises(CapacityError):
        enumerate_trees(8)


def test_rooted_map_counts(oracle):
    for n in range(1, 4):
        assert len(enumerate_rooted_maps(n)) == oracle["rooted_bipartite_maps"][str(n)]


def test_uniform_map_law_is_uniform_at_n2():
    d = exact_mu_n(FaceWeights.uniform_tree(), 2)
    assert len(set(d.probs.values())) >= 1 and sum(d.probs.values()) == 1


def test_pushforward_identity():
    for n in range(1, 5):
        a, b = exact_nu_pushforward(derive_tree_weights(FaceWeights.uniform_tree()), n)
        assert a == b


def test_brute_force_label_count_small():
    for t in enumerate_alternating_trees(3, 3):
        assert brute_force_label_count(t) == count_labelings(t)
