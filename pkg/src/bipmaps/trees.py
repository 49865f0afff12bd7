"""Plane trees with signed child indices, contours, truncation and the local metric.

Trees live in a flat arena: vertex ``0`` is the root, ``parent`` holds handles,
children of each vertex are stored left to right in CSR form.  Each vertex
carries a *signed index*: the children of a vertex of outdegree ``c`` are
indexed by the integers in ``(floor(-c/2), floor(c/2)]`` and appear left to
right as ``0, 1, 2, ..., -2, -1``.

Truncated pieces of infinite trees are ordinary arenas whose vertices carry a
``frontier`` flag (children not all stored) and, for the unique vertex of
infinite degree, outdegree ``INFINITE``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import StructuralError
from .weights import INFINITE

WHITE, BLACK = 0, 1


def signed_index(position, outdeg):
    """Signed index of the child at 0-based ``position`` among ``outdeg`` children."""
    position = np.asarray(position)
    outdeg = np.asarray(outdeg)
    return np.where(position <= outdeg // 2, position, position - outdeg)


def index_position(idx, outdeg):
    """Inverse of :func:`signed_index`."""
    idx = np.asarray(idx)
    return np.where(idx >= 0, idx, idx + outdeg)


def index_radius(idx):
    """Smallest R such that ``idx`` lies in (floor(-R/2), floor(R/2)]."""
    idx = np.asarray(idx, dtype=np.int64)
    return np.where(idx > 0, 2 * idx, np.where(idx < 0, 1 - 2 * idx, 0))


def _ragged_arange(starts, counts):
    """Concatenation of ranges start..start+count-1, vectorised."""
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offs = np.repeat(np.asarray(starts, dtype=np.int64) - np.cumsum(counts) + counts, counts)
    return offs + np.arange(total, dtype=np.int64)


class PlaneTree:
    """Ordered rooted tree stored as arrays."""

    def __init__(self, parent, child_ptr, child_idx, signed=None, outdeg=None, frontier=None):
        self.parent = np.asarray(parent, dtype=np.int64)
        self.child_ptr = np.asarray(child_ptr, dtype=np.int64)
        self.child_idx = np.asarray(child_idx, dtype=np.int64)
        V = len(self.parent)
        if V == 0 or self.parent[0] != -1:
            raise StructuralError("vertex 0 must be the root")
        stored = np.diff(self.child_ptr)
        self.outdeg = stored.copy() if outdeg is None else np.asarray(outdeg, dtype=np.int64)
        if signed is None:
            sg = np.zeros(V, dtype=np.int64)
            if V > 1:
                pos = np.arange(len(self.child_idx)) - np.repeat(self.child_ptr[:-1], stored)
                par_out = np.repeat(self.outdeg, stored)
                sg[self.child_idx] = signed_index(pos, par_out)
            self.signed = sg
        else:
            self.signed = np.asarray(signed, dtype=np.int64)
        self.frontier = np.zeros(V, dtype=bool) if frontier is None else np.asarray(frontier, dtype=bool)
        self._layout = None

    # construction -----------------------------------------------------
    @classmethod
    def from_outdegrees(cls, degrees) -> "PlaneTree":
        """Build a finite tree from its preorder outdegree (Lukasiewicz) sequence."""
        degrees = [int(d) for d in degrees]
        V = len(degrees)
        if V == 0 or sum(degrees) != V - 1:
            raise StructuralError("not a valid preorder outdegree sequence")
        parent = [-1] * V
        stack = []  # (vertex, remaining children)
        for v, d in enumerate(degrees):
            if v > 0:
                if not stack:
                    raise StructuralError("not a valid preorder outdegree sequence")
                u, rem = stack[-1]
                parent[v] = u
                if rem == 1:
                    stack.pop()
                else:
                    stack[-1] = (u, rem - 1)
            if d > 0:
                stack.append((v, d))
        if stack:
            raise StructuralError("not a valid preorder outdegree sequence")
        # children appear in preorder, which is left-to-right
        return cls.from_parents(np.array(parent), np.arange(V))

    @classmethod
    def from_parents(cls, parent, rank, signed=None, outdeg=None, frontier=None) -> "PlaneTree":
        """Build from parent handles and a sibling-order key (smaller = further left)."""
        parent = np.asarray(parent, dtype=np.int64)
        V = len(parent)
        nonroot = np.flatnonzero(parent >= 0)
        order = nonroot[np.lexsort((np.asarray(rank)[nonroot], parent[nonroot]))]
        counts = np.bincount(parent[nonroot], minlength=V)
        ptr = np.zeros(V + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return cls(parent, ptr, order, signed=signed, outdeg=outdeg, frontier=frontier)

    @classmethod
    def single_vertex(cls) -> "PlaneTree":
        return cls([-1], [0, 0], [])

    # basic queries ------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.parent)

    @property
    def n_edges(self) -> int:
        return len(self.parent) - 1

    def children(self, v: int) -> np.ndarray:
        return self.child_idx[self.child_ptr[v]:self.child_ptr[v + 1]]

    def n_stored_children(self) -> np.ndarray:
        return np.diff(self.child_ptr)

    def degree(self, v=None):
        """Outdegree plus one, except at the root."""
        d = self.outdeg + (np.arange(self.n_vertices) > 0)
        d = np.where(self.outdeg == INFINITE, INFINITE, d)
        return d if v is None else int(d[v])

    @property
    def is_finite(self) -> bool:
        return not self.frontier.any() and not (self.outdeg == INFINITE).any()

    # layout: depth, preorder, subtree size --------------------------------
    def _compute_layout(self):
        V = self.n_vertices
        depth = np.zeros(V, dtype=np.int64)
        gens = [np.array([0], dtype=np.int64)]
        cnt = np.diff(self.child_ptr)
        while True:
            g = gens[-1]
            nxt = self.child_idx[_ragged_arange(self.child_ptr[g], cnt[g])]
            if len(nxt) == 0:
                break
            depth[nxt] = len(gens)
            gens.append(nxt)
        if sum(len(g) for g in gens) != V:
            raise StructuralError("arena is not a single tree rooted at 0")
        size = np.ones(V, dtype=np.int64)
        for g in reversed(gens[1:]):
            np.add.at(size, self.parent[g], size[g])
        pre = np.zeros(V, dtype=np.int64)
        for g in gens[1:]:
            par = self.parent[g]
            s = size[g]
            cs = np.cumsum(s)
            first = np.ones(len(g), dtype=bool)
            first[1:] = par[1:] != par[:-1]
            grp_start = np.maximum.accumulate(np.where(first, np.arange(len(g)), 0))
            before = cs - s - (cs[grp_start] - s[grp_start])
            pre[g] = pre[par] + 1 + before
        self._layout = (depth, size, pre, gens)

    @property
    def depth(self) -> np.ndarray:
        if self._layout is None:
            self._compute_layout()
        return self._layout[0]

    @property
    def subtree_size(self) -> np.ndarray:
        if self._layout is None:
            self._compute_layout()
        return self._layout[1]

    @property
    def preorder_index(self) -> np.ndarray:
        if self._layout is None:
            self._compute_layout()
        return self._layout[2]

    @property
    def generations(self) -> list:
        if self._layout is None:
            self._compute_layout()
        return self._layout[3]

    def preorder(self) -> np.ndarray:
        order = np.empty(self.n_vertices, dtype=np.int64)
        order[self.preorder_index] = np.arange(self.n_vertices)
        return order

    @property
    def colour(self) -> np.ndarray:
        """WHITE on even generations, BLACK on odd ones."""
        return (self.depth % 2).astype(np.int8)

    def first_visit_time(self) -> np.ndarray:
        """Index of the first occurrence of each vertex in the left contour."""
        return 2 * self.preorder_index - self.depth

    def corner_times(self):
        """All corners of the stored tree: (time, vertex, corner number).

        The corner number is 0 for the arrival at a vertex and ``k`` for the
        return from its ``k``-th child.  Times index the left contour
        ``c_0 = root, c_1, ..., c_{2n-1}``.
        """
        V = self.n_vertices
        t = self.first_visit_time()
        size = self.subtree_size
        nonroot = np.arange(1, V)
        cnt = np.diff(self.child_ptr)
        # rank (1-based) of each child among its siblings
        rank = np.empty(V, dtype=np.int64)
        rank[0] = 0
        rank[self.child_idx] = np.arange(len(self.child_idx)) - np.repeat(self.child_ptr[:-1], cnt) + 1
        ret_t = t[nonroot] + 2 * size[nonroot] - 1
        ret_v = self.parent[nonroot]
        ret_k = rank[nonroot]
        keep = ret_t < 2 * (V - 1)
        times = np.concatenate([t, ret_t[keep]])
        verts = np.concatenate([np.arange(V), ret_v[keep]])
        corner = np.concatenate([np.zeros(V, dtype=np.int64), ret_k[keep]])
        order = np.argsort(times, kind="stable")
        return times[order], verts[order], corner[order]

    # contours -----------------------------------------------------------
    def contour(self, kind: str = "left") -> "ContourSequence":
        if not self.is_finite:
            raise StructuralError("full contours are defined for finite trees; use a mobile window")
        if self.n_edges == 0:
            return ContourSequence(np.array([0]), np.array([0]), kind)
        _, verts, corner = self.corner_times()
        if kind in ("left", "two_sided"):
            return ContourSequence(verts, corner, kind)
        if kind == "right":
            # c^R_i = c^L_{2n - i}
            idx = (-np.arange(len(verts))) % len(verts)
            return ContourSequence(verts[idx], corner[idx], kind)
        if kind == "white_only":
            return ContourSequence(verts[0::2], corner[0::2], kind)
        raise ValueError(f"unknown contour kind {kind!r}")

    # truncation -----------------------------------------------------------
    def inclusion_radius(self) -> np.ndarray:
        """For each vertex, the least R with the vertex in the R-truncation."""
        need = np.zeros(self.n_vertices, dtype=np.int64)
        r = index_radius(self.signed)
        for d, g in enumerate(self.generations[1:], start=1):
            need[g] = np.maximum(np.maximum(need[self.parent[g]], r[g]), d)
        return need

    def truncate(self, R: int) -> "PlaneTree":
        if R < 0:
            raise ValueError("R must be non-negative")
        keep = self.inclusion_radius() <= R
        return self.subtree(keep)

    def subtree(self, keep) -> "PlaneTree":
        """Induced tree on a root-containing, parent-closed vertex mask."""
        keep = np.asarray(keep, dtype=bool)
        if not keep[0]:
            raise StructuralError("subtree must contain the root")
        if not np.all(keep[self.parent[1:][keep[1:]]]):
            raise StructuralError("vertex mask is not closed under parents")
        old = np.flatnonzero(keep)
        new_of = -np.ones(self.n_vertices, dtype=np.int64)
        new_of[old] = np.arange(len(old))
        par = np.where(self.parent[old] >= 0, new_of[np.maximum(self.parent[old], 0)], -1)
        kept_children = np.bincount(np.maximum(par[1:], 0), minlength=len(old)) if len(old) > 1 else np.zeros(len(old), dtype=np.int64)
        # keep the original left-to-right order among surviving siblings
        rank = np.empty(self.n_vertices, dtype=np.int64)
        rank[self.child_idx] = np.arange(len(self.child_idx))
        rank[0] = 0
        frontier = self.frontier[old] | (kept_children < np.diff(self.child_ptr)[old])
        outdeg = np.where(self.outdeg[old] == INFINITE, INFINITE, kept_children)
        return PlaneTree.from_parents(par, rank[old], signed=self.signed[old], outdeg=outdeg,
                                      frontier=frontier)

    # identity -------------------------------------------------------------
    def addresses(self) -> list:
        """Address (tuple of signed indices) of every vertex, by handle."""
        addr = [()] * self.n_vertices
        for g in self.generations[1:]:
            for v in g.tolist():
                addr[v] = addr[int(self.parent[v])] + (int(self.signed[v]),)
        return addr

    def address_set(self) -> frozenset:
        return frozenset(self.addresses())

    def key(self) -> tuple:
        """Hashable canonical form: preorder (outdegree, child signed indices)."""
        out = []
        for v in self.preorder().tolist():
            ch = self.children(v)
            out.append((int(self.outdeg[v]), tuple(int(x) for x in self.signed[ch])))
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, PlaneTree) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def outdegree_sequence(self) -> list:
        return [int(x) for x in self.outdeg[self.preorder()]]

    def __repr__(self):
        if self.n_vertices <= 12 and self.is_finite:
            return f"PlaneTree({self.outdegree_sequence()})"
        return f"PlaneTree(vertices={self.n_vertices})"

    # serialization ----------------------------------------------------------
    def to_records(self) -> list:
        recs = []
        for v in self.preorder().tolist():
            d = int(self.outdeg[v])
            ch = self.children(v)
            recs.append(["inf" if d == INFINITE else d, [int(x) for x in self.signed[ch]]])
        return recs

    @classmethod
    def from_records(cls, recs) -> "PlaneTree":
        V = len(recs)
        parent = np.full(V, -1, dtype=np.int64)
        signed = np.zeros(V, dtype=np.int64)
        outdeg = np.zeros(V, dtype=np.int64)
        stack = []
        for v, (d, idxs) in enumerate(recs):
            if v > 0:
                if not stack:
                    raise StructuralError("malformed tree records")
                u, pending = stack[-1]
                parent[v] = u
                signed[v] = pending.pop(0)
                if not pending:
                    stack.pop()
            outdeg[v] = INFINITE if d == "inf" else int(d)
            if idxs:
                stack.append((v, list(idxs)))
        if stack:
            raise StructuralError("malformed tree records")
        stored = np.bincount(parent[1:], minlength=V) if V > 1 else np.zeros(1, dtype=np.int64)
        frontier = (outdeg == INFINITE) | (stored != outdeg)
        return cls.from_parents(parent, np.arange(V), signed=signed, outdeg=outdeg, frontier=frontier)

    def to_json(self) -> str:
        return json.dumps(self.to_records(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "PlaneTree":
        return cls.from_records(json.loads(text))


@dataclass
class ContourSequence:
    vertices: np.ndarray
    corners: np.ndarray
    kind: str

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, i):
        """Periodic access ``c_i`` for every integer ``i`` (finite trees)."""
        return int(self.vertices[i % len(self.vertices)])

    def entries(self):
        return list(zip(self.vertices.tolist(), self.corners.tolist()))


class Identical:
    """Tagged result of :func:`tree_distance` for equal trees."""

    def __repr__(self):
        return "Identical"

    def __eq__(self, other):
        return isinstance(other, Identical) or other == 0

    def __hash__(self):
        return 0

    def __float__(self):
        return 0.0


IDENTICAL = Identical()


def _need_map(t: PlaneTree) -> dict:
    need = t.inclusion_radius()
    return dict(zip(t.addresses(), need.tolist()))


def tree_distance(t1: PlaneTree, t2: PlaneTree):
    """``(1 + sup{R : t1^[R] = t2^[R]})^(-1)`` as an exact Fraction.

    The truncations first differ at the least inclusion radius among addresses
    present in only one tree; identical trees return :data:`IDENTICAL`.
    """
    a, b = _need_map(t1), _need_map(t2)
    diff = [a[x] for x in a.keys() - b.keys()] + [b[x] for x in b.keys() - a.keys()]
    if not diff:
        return IDENTICAL
    return Fraction(1, min(diff))


def catalan(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)


def write_ndjson(path, objs):
    with open(path, "w") as fh:
        for o in objs:
            fh.write(json.dumps(o, separators=(",", ":"), sort_keys=True) + "\n")


def read_ndjson(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
