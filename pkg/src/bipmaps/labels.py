"""Bridges, label propagation and mobiles.

A *bridge* of length ``r`` is a zero-sum sequence of integers >= -1; there are
C(2r-1, r-1) of them.  Around a black vertex of degree ``r`` the clockwise label
increments (parent first, then the children left to right, back to the
parent) form such a bridge.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import CapacityError, StructuralError
from .trees import BLACK, WHITE, PlaneTree, _ragged_arange
from .weights import INFINITE

BRIDGE_ENUM_CAP = 12


def bridge_count(r: int) -> int:
    return comb(2 * r - 1, r - 1)


def compositions_count(m: int, s: int) -> int:
    """Number of length-``m`` sequences of integers >= -1 with sum ``s``."""
    if m == 0:
        return 1 if s == 0 else 0
    if s + m < 0:
        return 0
    return comb(s + 2 * m - 1, m - 1)


def enumerate_bridges(r: int, cap: int = BRIDGE_ENUM_CAP) -> list:
    """All bridges of length ``r`` in lexicographic order."""
    if r < 1:
        raise ValueError("bridge length must be >= 1")
    if r > cap:
        raise CapacityError(f"bridge enumeration beyond cap {cap} (r={r})")
    out = []

    def rec(prefix, remaining, total):
        if remaining == 1:
            if -total >= -1:
                out.append(tuple(prefix + [-total]))
            return
        # the remaining steps must bring the sum back to zero, each being >= -1
        for x in range(-1, remaining - total):
            rec(prefix + [x], remaining - 1, total + x)

    rec([], r, 0)
    return out


def sample_increments(rng, size=None):
    """I.i.d. increments with P(X = k) = 2^(-k-2), k >= -1."""
    gen = rng.gen if hasattr(rng, "gen") else rng
    x = gen.geometric(0.5, size) - 2
    return int(x) if size is None else x.astype(np.int64)


def sample_increment_iid(rng) -> int:
    return sample_increments(rng)


def sample_bridges(r: int, count: int, rng, method: str = "rejection") -> np.ndarray:
    """``count`` independent uniform bridges of length ``r`` as a (count, r) array.

    ``rejection`` draws i.i.d. increments and keeps zero-sum rows.  ``exact``
    picks the positions of ``r - 1`` bars among ``2r - 1`` slots uniformly
    (stars and bars), which is an exact uniform draw from the same set.
    """
    gen = rng.gen if hasattr(rng, "gen") else rng
    if count == 0:
        return np.zeros((0, r), dtype=np.int64)
    if r == 1:
        return np.zeros((count, 1), dtype=np.int64)
    if method == "exact":
        keys = gen.random((count, 2 * r - 1))
        bars = np.sort(np.argsort(keys, axis=1)[:, : r - 1], axis=1)
        edges = np.concatenate([np.full((count, 1), -1), bars, np.full((count, 1), 2 * r - 1)], axis=1)
        return (np.diff(edges, axis=1) - 1 - 1).astype(np.int64)
    if method != "rejection":
        raise ValueError(f"unknown bridge method {method!r}")
    out = np.empty((count, r), dtype=np.int64)
    filled = 0
    accept = bridge_count(r) / 4.0**r if r < 500 else 1 / (2 * np.sqrt(np.pi * r))
    while filled < count:
        need = count - filled
        batch = int(min(max(need / accept * 1.2 + 8, 16), 2_000_000 // r + 16))
        x = gen.geometric(0.5, (batch, r)) - 2
        ok = x.sum(axis=1) == 0
        got = x[ok][:need]
        out[filled:filled + len(got)] = got
        filled += len(got)
    return out


def sample_bridge_uniform(r: int, rng, method: str = "rejection") -> tuple:
    return tuple(int(v) for v in sample_bridges(r, 1, rng, method)[0])


@dataclass
class Mobile:
    """A plane tree with labels on white vertices and a root-edge sign.

    ``labels`` is indexed by vertex handle; entries at black vertices are 0
    and carry no meaning.
    """

    tree: PlaneTree
    labels: np.ndarray
    epsilon: int = 1
    root_label: int = 0

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.epsilon not in (-1, 1):
            raise StructuralError("epsilon must be +1 or -1")

    @property
    def white(self) -> np.ndarray:
        return np.flatnonzero(self.tree.colour == WHITE)

    @property
    def black(self) -> np.ndarray:
        return np.flatnonzero(self.tree.colour == BLACK)

    def bridges(self) -> dict:
        """Clockwise increments around every finite-degree black vertex with all neighbours stored."""
        t, lab = self.tree, self.labels
        out = {}
        for u in self.black.tolist():
            if t.outdeg[u] == INFINITE or t.frontier[u]:
                continue
            nb = [int(t.parent[u])] + t.children(u).tolist() + [int(t.parent[u])]
            out[u] = tuple(int(lab[b] - lab[a]) for a, b in zip(nb[:-1], nb[1:]))
        return out

    def check(self) -> list:
        """Violations of the bridge rule (empty when the mobile is valid)."""
        bad = []
        for u, br in self.bridges().items():
            if sum(br) != 0 or min(br) < -1:
                bad.append((u, br))
        return bad

    def key(self) -> tuple:
        order = self.tree.preorder()
        return (self.tree.key(), tuple(int(self.labels[v]) for v in order), self.epsilon)

    def __eq__(self, other):
        return isinstance(other, Mobile) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_record(self) -> dict:
        order = self.tree.preorder()
        return {"tree": self.tree.to_records(),
                "labels": [int(self.labels[v]) for v in order],
                "epsilon": int(self.epsilon)}

    @classmethod
    def from_record(cls, rec) -> "Mobile":
        t = PlaneTree.from_records(rec["tree"])
        order = t.preorder()
        lab = np.zeros(t.n_vertices, dtype=np.int64)
        lab[order] = rec["labels"]
        return cls(t, lab, int(rec["epsilon"]))

    def to_json(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))


def _sibling_rank(t: PlaneTree) -> np.ndarray:
    cnt = np.diff(t.child_ptr)
    rank = np.zeros(t.n_vertices, dtype=np.int64)
    rank[t.child_idx] = np.arange(len(t.child_idx)) - np.repeat(t.child_ptr[:-1], cnt)
    return rank


def labels_from_increments(t: PlaneTree, child_incr: np.ndarray, root_label: int = 0) -> np.ndarray:
    """Propagate labels given, for each white non-root vertex ``w``, the
    increment from its previous neighbour around its black parent.

    ``child_incr[w]`` is ``x_j`` when ``w`` is the ``j``-th child; the label of
    ``w`` is the grandparent label plus the running sum over earlier siblings.
    """
    lab = np.zeros(t.n_vertices, dtype=np.int64)
    lab[0] = root_label
    gens = t.generations
    for d in range(2, len(gens), 2):
        g = gens[d]
        par = t.parent[g]
        inc = child_incr[g]
        cs = np.cumsum(inc)
        first = np.ones(len(g), dtype=bool)
        first[1:] = par[1:] != par[:-1]
        start = np.maximum.accumulate(np.where(first, np.arange(len(g)), 0))
        run = cs - cs[start] + inc[start]
        lab[g] = lab[t.parent[par]] + run
    return lab


def assign_labels(t: PlaneTree, bridges: dict, root_label: int = 0, epsilon: int = 1) -> Mobile:
    """Labels from one bridge per black vertex (keyed by handle)."""
    colour = t.colour
    child_incr = np.zeros(t.n_vertices, dtype=np.int64)
    for u in np.flatnonzero(colour == BLACK).tolist():
        ch = t.children(u)
        br = bridges.get(u)
        if br is None:
            raise StructuralError(f"no bridge for black vertex {u}")
        if len(br) != len(ch) + 1:
            raise StructuralError(f"black vertex {u} has degree {len(ch) + 1}, bridge length {len(br)}")
        if sum(br) != 0 or min(br) < -1:
            raise StructuralError(f"{br} is not a bridge")
        child_incr[ch] = br[:-1]
    return Mobile(t, labels_from_increments(t, child_incr, root_label), epsilon, root_label)


def random_labels(t: PlaneTree, rng, root_label: int = 0, method: str = "rejection") -> np.ndarray:
    """Uniform labelling of a finite alternating tree (one uniform bridge per black vertex)."""
    colour = t.colour
    blacks = np.flatnonzero(colour == BLACK)
    deg = t.outdeg[blacks] + 1
    child_incr = np.zeros(t.n_vertices, dtype=np.int64)
    for r in np.unique(deg).tolist():
        us = blacks[deg == r]
        if r == 1:
            continue
        br = sample_bridges(r, len(us), rng, method)
        ch = t.child_idx[_ragged_arange(t.child_ptr[us], np.full(len(us), r - 1))]
        child_incr[ch] = br[:, : r - 1].reshape(-1)
    return labels_from_increments(t, child_incr, root_label)


def count_labelings(t: PlaneTree) -> int:
    """Product over black vertices of C(2 deg - 1, deg - 1)."""
    colour = t.colour
    total = 1
    for u in np.flatnonzero(colour == BLACK).tolist():
        total *= bridge_count(int(t.outdeg[u]) + 1)
    return total


@dataclass
class MobileFragment:
    """Truncation of a mobile; it need not satisfy the mobile rules."""

    tree: PlaneTree
    labels: dict
    possibly_invalid: bool = True


def mobile_truncate(m: Mobile, R: int) -> MobileFragment:
    keep = m.tree.inclusion_radius() <= R
    sub = m.tree.subtree(keep)
    old = np.flatnonzero(keep)
    white = sub.colour == WHITE
    labels = {int(i): int(m.labels[o]) for i, o in enumerate(old) if white[i]}
    return MobileFragment(sub, labels)


def all_labelings(t: PlaneTree, root_label: int = 0, epsilons=(1,)):
    """Every mobile on ``t`` (product of bridge sets), in a fixed order."""
    import itertools

    blacks = np.flatnonzero(t.colour == BLACK).tolist()
    sets = [enumerate_bridges(int(t.outdeg[u]) + 1) for u in blacks]
    for combo in itertools.product(*sets):
        for eps in epsilons:
            yield assign_labels(t, dict(zip(blacks, combo)), root_label, eps)
