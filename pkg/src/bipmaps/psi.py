"""Bijection between plane trees and unlabelled mobiles.

Leaves of a tree ``T`` become white vertices, internal vertices black.  For a
leaf ``v`` follow the contour clockwise from ``v`` while it keeps moving to an
ancestor; the ancestors met, read from the top down, form the block
``b_1(v), ..., b_eta(v)`` and ``v`` is joined to each of them.  The new root
is the first leaf of the right contour.  A black vertex keeps as many
neighbours as it had children, so its degree in the image equals its
outdegree in ``T``.

Order conventions (verified bijective by exhaustive enumeration):

* a non-root white ``v`` has parent ``b_1(v)`` and children ``b_2..b_eta``; the
  root white has children ``b_1..b_eta``;
* a black ``b`` with children ``x_1..x_m`` in ``T`` is joined to the rightmost
  leaf below each ``x_t``; the one below ``x_m`` is its parent and the others
  are its children in the order ``t = 1..m-1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError
from .trees import BLACK, WHITE, PlaneTree


@dataclass
class PsiTrace:
    """Bookkeeping of one forward application.

    ``blocks[v]`` lists ``b_1(v), ..., b_eta(v)`` (handles of the input tree)
    for each leaf ``v``; ``vertex_map`` sends input handles to output handles.
    """

    eta: dict
    blocks: dict
    vertex_map: np.ndarray

    def to_json(self) -> str:
        return json.dumps({"eta": {str(k): v for k, v in self.eta.items()},
                           "blocks": {str(k): v for k, v in self.blocks.items()},
                           "vertex_map": self.vertex_map.tolist()})


def _rightmost_leaf(t: PlaneTree, x: int) -> int:
    while t.child_ptr[x + 1] > t.child_ptr[x]:
        x = int(t.child_idx[t.child_ptr[x + 1] - 1])
    return x


def psi_forward(t: PlaneTree):
    """Return ``(image, trace)`` for a finite tree with at least one edge."""
    if t.n_edges < 1:
        raise StructuralError("a single vertex has no leaf/internal structure")
    parent = t.parent
    ptr, cidx = t.child_ptr, t.child_idx
    V = t.n_vertices
    is_last = np.zeros(V, dtype=bool)
    nz = np.flatnonzero(np.diff(ptr) > 0)
    is_last[cidx[ptr[nz + 1] - 1]] = True
    leaves = np.flatnonzero(np.diff(ptr) == 0)

    blocks, eta = {}, {}
    for v in leaves.tolist():
        chain = [int(parent[v])]
        x = v
        while is_last[x] and parent[chain[-1]] >= 0:
            x = chain[-1]
            chain.append(int(parent[x]))
        chain.reverse()
        blocks[v] = chain
        eta[v] = len(chain)

    new_root = _rightmost_leaf(t, 0)
    new_parent = np.full(V, -1, dtype=np.int64)
    rank = np.zeros(V, dtype=np.int64)
    for v, blk in blocks.items():
        if v == new_root:
            kids = blk
        else:
            new_parent[v] = blk[0]
            kids = blk[1:]
        for k, b in enumerate(kids):
            new_parent[b] = v
            rank[b] = k
    # rank of white children of black vertices: position of the T-child they hang below
    internal = np.flatnonzero(np.diff(ptr) > 0)
    for b in internal.tolist():
        ch = cidx[ptr[b]:ptr[b + 1]].tolist()
        for k, x in enumerate(ch[:-1]):
            w = _rightmost_leaf(t, x)
            if new_parent[w] != b:
                raise StructuralError("inconsistent block structure")
            rank[w] = k

    order = np.concatenate([[new_root], np.setdiff1d(np.arange(V), [new_root])])
    vmap = np.empty(V, dtype=np.int64)
    vmap[order] = np.arange(V)
    par = np.where(new_parent[order] >= 0, vmap[np.maximum(new_parent[order], 0)], -1)
    image = PlaneTree.from_parents(par, rank[order])
    if image.n_vertices != V or np.any(image.colour[vmap[leaves]] != WHITE):
        raise StructuralError("image is not an alternating tree")
    return image, PsiTrace(eta, blocks, vmap)


def psi_inverse(u: PlaneTree) -> PlaneTree:
    """Inverse of :func:`psi_forward` on alternating trees with a white root."""
    if u.n_edges < 1:
        raise StructuralError("need at least one edge")
    colour = u.colour
    V = u.n_vertices
    seq = {}
    for v in np.flatnonzero(colour == WHITE).tolist():
        kids = u.children(v).tolist()
        s = kids if v == 0 else [int(u.parent[v])] + kids
        if not s:
            raise StructuralError(f"white vertex {v} has no neighbour")
        seq[v] = s
    tparent = np.full(V, -2, dtype=np.int64)
    for v, s in seq.items():
        tparent[v] = s[-1]
        for a, b in zip(s[:-1], s[1:]):
            if tparent[b] != -2:
                raise StructuralError("black vertex assigned two parents")
            tparent[b] = a
    troot = seq[0][0]
    tparent[troot] = -1
    if np.any(tparent == -2):
        raise StructuralError("input is not in the image of the forward map")

    def child_toward(b, w):
        s = seq[w]
        k = s.index(b)
        return s[k + 1] if k + 1 < len(s) else w

    rank = np.zeros(V, dtype=np.int64)
    for b in np.flatnonzero(colour == BLACK).tolist():
        kids = [child_toward(b, w) for w in u.children(b).tolist()]
        kids.append(child_toward(b, int(u.parent[b])))
        for k, x in enumerate(kids):
            if tparent[x] != b:
                raise StructuralError("input is not in the image of the forward map")
            rank[x] = k
    order = np.concatenate([[troot], np.setdiff1d(np.arange(V), [troot])])
    vmap = np.empty(V, dtype=np.int64)
    vmap[order] = np.arange(V)
    par = np.where(tparent[order] >= 0, vmap[np.maximum(tparent[order], 0)], -1)
    out = PlaneTree.from_parents(par, rank[order])
    _ = out.depth  # validates connectivity
    return out


def psi_forward_truncated(t: PlaneTree, R: int, R_prime: int) -> PlaneTree:
    """``Psi(t^[R'])^[R]``; for ``R'`` large enough (certified by the caller)
    this is the ``R``-truncation of the image of the full tree."""
    piece = t.truncate(R_prime)
    finite = PlaneTree.from_parents(piece.parent, _sibling_key(piece))
    image, _ = psi_forward(finite)
    return image.truncate(R)


def _sibling_key(t: PlaneTree) -> np.ndarray:
    key = np.zeros(t.n_vertices, dtype=np.int64)
    key[t.child_idx] = np.arange(len(t.child_idx))
    return key
