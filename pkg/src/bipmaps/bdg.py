"""Planar maps as rotation systems, and the corner-to-successor construction
turning a labelled mobile into a rooted, pointed bipartite map.

Half-edges ``2k`` and ``2k+1`` form edge ``k``.  ``origin[h]`` is the vertex a
half-edge leaves from and ``rot_next[h]`` the next half-edge counterclockwise
around that vertex.  Faces are the orbits of ``h -> rot_next[twin(h)]``.

Construction of the map.  The outer face of the embedded mobile is a disc
whose boundary is the white contour.  Every white corner becomes a point on
that boundary and every arc is a chord, so the rotation at a corner lists the
chord endpoints in increasing cyclic distance along the contour.  The extra
vertex sits just after a minimal-label corner, where no chord separates it
from any minimal corner.  Walking counterclockwise around a white vertex
meets its corners in reverse contour order, and the corner sectors are
concatenated that way.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CertificationError, StructuralError
from .labels import Mobile
from .trees import BLACK, IDENTICAL, WHITE

INFINITY = float("inf")


def twin(h):
    return np.bitwise_xor(h, 1)


class PlanarMap:
    """Rotation system with a root half-edge and an optional marked vertex.

    ``rot_order`` lists every half-edge grouped by origin, each group in
    counterclockwise order; it is the only embedding input.
    """

    def __init__(self, n_vertices, origin, rot_order, root=0, point=None, labels=None,
                 vertex_ids=None, complete=None, meta=None):
        self.n_vertices = int(n_vertices)
        self.origin = np.asarray(origin, dtype=np.int64)
        self.rot_order = np.asarray(rot_order, dtype=np.int64)
        H = len(self.origin)
        if H % 2:
            raise StructuralError("odd number of half-edges")
        if len(self.rot_order) != H or (H and np.any(np.bincount(self.rot_order, minlength=H) != 1)):
            raise StructuralError("rotation order is not a permutation of the half-edges")
        og = self.origin[self.rot_order]
        if H and np.any(np.diff(og) < 0):
            raise StructuralError("rotation order must be grouped by vertex in increasing order")
        self.root = int(root)
        self.point = None if point is None else int(point)
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)
        self.vertex_ids = vertex_ids
        self.complete = np.ones(self.n_vertices, dtype=bool) if complete is None else np.asarray(complete, dtype=bool)
        self.meta = meta or {}
        deg = np.bincount(self.origin, minlength=self.n_vertices)
        self.vertex_ptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.cumsum(deg, out=self.vertex_ptr[1:])
        rot_next = np.empty(H, dtype=np.int64)
        if H:
            pos = np.arange(H)
            start = self.vertex_ptr[og]
            nxt = pos + 1
            wrap = nxt == self.vertex_ptr[og + 1]
            nxt[wrap] = start[wrap]
            rot_next[self.rot_order] = self.rot_order[nxt]
        self.rot_next = rot_next
        self._dist_cache = {}

    # basic structure ---------------------------------------------------
    @property
    def n_half_edges(self) -> int:
        return len(self.origin)

    @property
    def n_edges(self) -> int:
        return len(self.origin) // 2

    def degree(self, v=None):
        d = np.diff(self.vertex_ptr)
        return d if v is None else int(d[v])

    def rotation(self, v: int) -> np.ndarray:
        return self.rot_order[self.vertex_ptr[v]:self.vertex_ptr[v + 1]]

    @property
    def root_vertex(self) -> int:
        """Tail ``e-`` of the root edge."""
        return int(self.origin[self.root]) if self.n_half_edges else 0

    def target(self, h):
        return self.origin[twin(h)]

    def face_ids(self):
        """Face label of every half-edge (orbits of rot_next o twin)."""
        H = self.n_half_edges
        perm = self.rot_next[twin(np.arange(H))]
        return _cycle_ids(perm)

    def face_degrees(self) -> np.ndarray:
        fid, nf = self.face_ids()
        return np.bincount(fid, minlength=nf)

    @property
    def n_faces(self) -> int:
        return self.face_ids()[1]

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def is_bipartite(self) -> bool:
        d = self.distances_from(self.root_vertex)
        src, dst = self.origin[0::2], self.origin[1::2]
        ok = (d[src] >= 0) & (d[dst] >= 0)
        return bool(np.all((d[src][ok] - d[dst][ok]) % 2 == 1))

    def adjacency(self):
        """CSR neighbour lists (with multiplicity) following rotation order."""
        return self.vertex_ptr, self.target(self.rot_order)

    def distances_from(self, v: int) -> np.ndarray:
        """Graph distances by BFS (-1 for unreachable)."""
        if v in self._dist_cache:
            return self._dist_cache[v]
        ptr, nb = self.adjacency()
        dist = np.full(self.n_vertices, -1, dtype=np.int64)
        dist[v] = 0
        frontier = np.array([v], dtype=np.int64)
        d = 0
        while len(frontier):
            cnt = ptr[frontier + 1] - ptr[frontier]
            idx = _ragged(ptr[frontier], cnt)
            cand = np.unique(nb[idx])
            cand = cand[dist[cand] < 0]
            d += 1
            dist[cand] = d
            frontier = cand
        self._dist_cache[v] = dist
        return dist

    def check_rotation_system(self):
        H = self.n_half_edges
        if H == 0:
            return
        tw = twin(np.arange(H))
        if np.any(tw == np.arange(H)) or np.any(twin(tw) != np.arange(H)):
            raise StructuralError("twin is not a fixed-point-free involution")
        fid, _ = self.face_ids()
        if len(fid) != H:
            raise StructuralError("faces do not partition the half-edges")

    # sub-maps ----------------------------------------------------------
    def submap(self, keep_edge, keep_vertex=None, root=None):
        """Map induced by a set of edges (and the vertices they touch)."""
        keep_edge = np.asarray(keep_edge, dtype=bool)
        keep_h = np.repeat(keep_edge, 2)
        if keep_vertex is None:
            keep_vertex = np.zeros(self.n_vertices, dtype=bool)
        keep_vertex = keep_vertex.copy()
        keep_vertex[self.origin[keep_h]] = True
        keep_vertex[self.root_vertex] = True
        vnew = -np.ones(self.n_vertices, dtype=np.int64)
        vnew[keep_vertex] = np.arange(int(keep_vertex.sum()))
        hnew = -np.ones(self.n_half_edges, dtype=np.int64)
        kept = np.flatnonzero(keep_h)
        hnew[kept] = np.arange(len(kept))
        order = self.rot_order[keep_h[self.rot_order]]
        r = self.root if root is None else root
        new_root = int(hnew[r]) if keep_h[r] else 0
        point = None
        if self.point is not None and keep_vertex[self.point]:
            point = int(vnew[self.point])
        ids = None
        if self.vertex_ids is not None:
            ids = np.asarray(self.vertex_ids)[keep_vertex]
        labels = None if self.labels is None else self.labels[keep_vertex]
        pm = PlanarMap(int(keep_vertex.sum()), vnew[self.origin[kept]], hnew[order], new_root, point,
                       labels, ids, self.complete[keep_vertex], dict(self.meta))
        pm.meta["root_vertex_alone"] = not keep_h[r]
        return pm

    def ball(self, r: int) -> "PlanarMap":
        """Vertices within distance ``r`` of ``e-`` and the edges with an
        endpoint at distance < ``r``.  Requires those inner vertices complete."""
        d = self.distances_from(self.root_vertex)
        inner = (d >= 0) & (d < r)
        if not np.all(self.complete[inner]):
            bad = np.flatnonzero(inner & ~self.complete)
            raise CertificationError(
                f"ball of radius {r} needs {len(bad)} incomplete vertices (nearest at distance {int(d[bad].min())})",
                suggestion="extend the truncation window")
        src, dst = self.origin[0::2], self.origin[1::2]
        ke = ((d[src] >= 0) & (d[src] < r)) | ((d[dst] >= 0) & (d[dst] < r))
        kv = (d >= 0) & (d <= r)
        out = self.submap(ke, kv)
        out.meta["ball_radius"] = int(r)
        return out

    # identity ------------------------------------------------------------
    def canonical_code(self) -> tuple:
        """Complete invariant of the rooted (and pointed) map.

        Half-edges are renumbered in breadth-first order from the root using
        the rotation and twin operations; the code lists the renumbered
        rotation successor and twin of every half-edge.
        """
        H = self.n_half_edges
        if H == 0:
            return ("vertex", self.point is not None)
        label = -np.ones(H, dtype=np.int64)
        order = []
        label[self.root] = 0
        order.append(self.root)
        q = deque([self.root])
        rn = self.rot_next
        while q:
            h = q.popleft()
            for g in (int(rn[h]), h ^ 1):
                if label[g] < 0:
                    label[g] = len(order)
                    order.append(g)
                    q.append(g)
        if len(order) != H:
            raise StructuralError("map is not connected")
        o = np.array(order)
        code = tuple(zip(label[rn[o]].tolist(), label[o ^ 1].tolist()))
        pt = -1
        if self.point is not None:
            pt = int(label[self.origin == self.point].min())
        return (code, pt)

    def __eq__(self, other):
        return isinstance(other, PlanarMap) and self.canonical_code() == other.canonical_code()

    def __hash__(self):
        return hash(self.canonical_code())

    # export --------------------------------------------------------------
    def to_record(self) -> dict:
        rec = {
            "n_vertices": self.n_vertices,
            "rotation": {str(v): self.rotation(v).tolist() for v in range(self.n_vertices)},
            "edges": [[int(self.origin[2 * k]), int(self.origin[2 * k + 1])] for k in range(self.n_edges)],
            "root_half_edge": self.root,
            "root_edge": [self.root_vertex, int(self.origin[self.root ^ 1])] if self.n_half_edges else None,
            "point": self.point,
        }
        if self.labels is not None:
            rec["labels"] = self.labels.tolist()
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))

    @classmethod
    def from_record(cls, rec) -> "PlanarMap":
        V = rec["n_vertices"]
        H = 2 * len(rec["edges"])
        origin = np.empty(H, dtype=np.int64)
        for k, (a, b) in enumerate(rec["edges"]):
            origin[2 * k], origin[2 * k + 1] = a, b
        order = np.concatenate([np.asarray(rec["rotation"][str(v)], dtype=np.int64) for v in range(V)]) if H else []
        return cls(V, origin, order, rec["root_half_edge"], rec.get("point"), rec.get("labels"))

    def to_dot(self, name: str = "map") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.n_vertices):
            attrs = []
            if self.labels is not None:
                attrs.append(f'label="{v}:{int(self.labels[v])}"')
            if v == self.point:
                attrs.append("shape=box")
            if v == self.root_vertex:
                attrs.append("style=filled")
            lines.append(f"  {v}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
        for k in range(self.n_edges):
            a, b = int(self.origin[2 * k]), int(self.origin[2 * k + 1])
            extra = " [penwidth=3]" if k == self.root // 2 else ""
            lines.append(f"  {a} -- {b}{extra};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"PlanarMap(V={self.n_vertices}, E={self.n_edges})"


def _ragged(starts, counts):
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offs = np.repeat(np.asarray(starts, dtype=np.int64) - np.cumsum(counts) + counts, counts)
    return offs + np.arange(total, dtype=np.int64)


def _cycle_ids(perm):
    """Cycle label of each element of a permutation, and the number of cycles."""
    n = len(perm)
    ids = -np.ones(n, dtype=np.int64)
    c = 0
    for s in range(n):
        if ids[s] >= 0:
            continue
        h = s
        while ids[h] < 0:
            ids[h] = c
            h = perm[h]
        c += 1
    return ids, c


def from_rotation(n_vertices, origin, rot_next, root=0, point=None, labels=None) -> PlanarMap:
    """Build a map from per-half-edge rotation successors."""
    origin = np.asarray(origin, dtype=np.int64)
    rot_next = np.asarray(rot_next, dtype=np.int64)
    order = []
    for v in range(n_vertices):
        hs = np.flatnonzero(origin == v)
        if len(hs) == 0:
            continue
        h0 = int(hs.min())
        h = h0
        cyc = []
        while True:
            cyc.append(h)
            h = int(rot_next[h])
            if h == h0:
                break
        if len(cyc) != len(hs):
            raise StructuralError(f"rotation at vertex {v} is not a single cycle")
        order.extend(cyc)
    return PlanarMap(n_vertices, origin, order, root, point, labels)


# ----------------------------------------------------------------------------
# successors and the construction


def white_corners(m: Mobile):
    """Vertices and labels of the white contour ``c_0, c_2, c_4, ...``."""
    t = m.tree
    if t.n_edges == 0:
        return np.array([0]), m.labels[[0]]
    _, verts, _ = t.corner_times()
    wc = verts[0::2]
    return wc, m.labels[wc]


def successors_linear(lab: np.ndarray, allow_wrap: bool = False) -> np.ndarray:
    """For each position, the first later position whose label is one less
    (``-1`` when there is none)."""
    lab = np.asarray(lab, dtype=np.int64)
    N = len(lab)
    if N == 0:
        return np.zeros(0, dtype=np.int64)
    base = lab.min()
    key = (lab - base) * (N + 1) + np.arange(N)
    order = np.argsort(key)
    sk = key[order]
    want = (lab - 1 - base) * (N + 1) + np.arange(N) + 1
    j = np.searchsorted(sk, want)
    out = -np.ones(N, dtype=np.int64)
    ok = j < N
    jj = np.minimum(j, N - 1)
    ok &= (sk[jj] // (N + 1)) == (lab - 1 - base)
    ok &= lab - 1 >= base
    out[ok] = order[jj[ok]]
    return out


def successor(m: Mobile, i: int):
    """Successor of white-contour index ``i`` in a finite mobile (periodic
    contour); returns an index ``> i`` or :data:`INFINITY`."""
    _, lab = white_corners(m)
    n = len(lab)
    li = lab[i % n]
    if li == lab.min():
        return INFINITY
    k = i % n
    rolled = np.concatenate([lab[k + 1:], lab[:k + 1]])
    j = int(np.flatnonzero(rolled == li - 1)[0])
    return i + 1 + j


def phi_build(m: Mobile) -> PlanarMap:
    """Rooted pointed bipartite map of a finite mobile and its root sign."""
    bad = m.check()
    if bad:
        raise StructuralError(f"labels violate the bridge rule at {bad[:3]}")
    t = m.tree
    n = t.n_edges
    if n == 0:
        raise StructuralError("a mobile without edges has no map")
    wc, lab = white_corners(m)
    k0 = int(np.argmin(lab))
    pos_of = (np.arange(n) - k0) % n          # original index -> linear position
    idx_of = (np.arange(n) + k0) % n          # linear position -> original index
    L = lab[idx_of]
    cv = wc[idx_of]                           # vertex at each linear position
    Lx = np.concatenate([L, L[:1]])
    succ = successors_linear(Lx)[:n]          # values in (p, n] or -1
    to_rho = succ < 0

    whites = np.flatnonzero(t.colour == WHITE)
    vid = -np.ones(t.n_vertices, dtype=np.int64)
    vid[whites] = np.arange(len(whites))
    rho = len(whites)
    V = rho + 1

    p = np.arange(n)
    tgt_point = np.where(to_rho, -1, succ % n)
    origin = np.empty(2 * n, dtype=np.int64)
    origin[0::2] = vid[cv]
    origin[1::2] = np.where(to_rho, rho, vid[cv[np.maximum(tgt_point, 0)]])
    # sort keys: (vertex, corner position, doubled offset)
    corner = np.empty(2 * n, dtype=np.int64)
    off = np.empty(2 * n, dtype=np.int64)
    corner[0::2] = p
    off[0::2] = np.where(to_rho, (1 - 2 * p) % (2 * n), 2 * (succ - p))
    corner[1::2] = np.where(to_rho, 0, tgt_point)
    off[1::2] = np.where(to_rho, 2 * p, (2 * (p - tgt_point)) % (2 * n))
    # counterclockwise around a vertex the corners come in reverse contour order
    order = np.lexsort((off, -corner, origin))
    labels = np.concatenate([m.labels[whites], [int(L.min()) - 1]])
    r = 2 * int(pos_of[0]) + (1 if m.epsilon == 1 else 0)
    ids = np.concatenate([whites, [-1]])
    pm = PlanarMap(V, origin, order, r, rho, labels, ids)
    pm.meta["corner_vertex"] = vid[cv]
    return pm


def phi_build_window(corner_vertex, corner_label, root_pos, epsilon, n_vertices, vertex_labels,
                     vertex_ids=None, corners_of_vertex_complete=None):
    """Partial map from a contiguous window of the white contour of an
    infinite mobile.

    ``corner_vertex[p]`` are map vertex ids for window positions ``p``; the
    window is a contiguous piece of the bi-infinite contour.  Arcs whose
    successor lies outside the window are dropped.  A vertex is marked
    complete when every corner of it lies in the window (as stated by
    ``corners_of_vertex_complete``), every corner found its successor, and no
    corner can receive arcs from outside the window.
    """
    cv = np.asarray(corner_vertex, dtype=np.int64)
    L = np.asarray(corner_label, dtype=np.int64)
    N = len(cv)
    succ = successors_linear(L)
    has = succ >= 0
    p = np.arange(N)
    # backward certificate: some earlier window corner has label <= own label
    prefmin = np.minimum.accumulate(L)
    back_ok = np.zeros(N, dtype=bool)
    back_ok[1:] = prefmin[:-1] <= L[1:]
    corner_ok = has & back_ok
    complete = np.ones(n_vertices, dtype=bool)
    np.logical_and.at(complete, cv, corner_ok)
    if corners_of_vertex_complete is not None:
        complete &= np.asarray(corners_of_vertex_complete, dtype=bool)

    src = p[has]
    dst = succ[has]
    E = len(src)
    origin = np.empty(2 * E, dtype=np.int64)
    origin[0::2] = cv[src]
    origin[1::2] = cv[dst]
    corner = np.empty(2 * E, dtype=np.int64)
    off = np.empty(2 * E, dtype=np.int64)
    big = 4 * N + 4
    corner[0::2] = src
    off[0::2] = dst - src
    corner[1::2] = dst
    off[1::2] = big + (src - dst)
    order = np.lexsort((off, -corner, origin))
    root_arc = np.flatnonzero(src == root_pos)
    if len(root_arc) == 0:
        raise CertificationError("the root corner has no successor inside the window",
                                 suggestion="extend the truncation window")
    r = 2 * int(root_arc[0]) + (1 if epsilon == 1 else 0)
    pm = PlanarMap(n_vertices, origin, order, r, None, vertex_labels, vertex_ids, complete)
    pm.meta["window"] = N
    return pm


# ----------------------------------------------------------------------------
# checks


@dataclass
class MapCheckReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def map_checks(pm: PlanarMap, mobile: Mobile | None = None) -> MapCheckReport:
    """Structural and metric checks of a finite pointed map with labels."""
    v = []
    try:
        pm.check_rotation_system()
    except StructuralError as exc:
        v.append(("rotation", str(exc)))
    chi = pm.euler_characteristic()
    if chi != 2:
        v.append(("euler", chi))
    fd = pm.face_degrees()
    if np.any(fd % 2):
        v.append(("odd_face", fd.tolist()))
    if pm.point is not None and pm.labels is not None:
        d = pm.distances_from(pm.point)
        others = np.arange(pm.n_vertices) != pm.point
        lab = pm.labels[others]
        expect = lab - lab.min() + 1
        bad = np.flatnonzero(d[others] != expect)
        if len(bad):
            v.append(("distance", [(int(np.flatnonzero(others)[b]), int(d[others][b]), int(expect[b])) for b in bad[:5]]))
    if mobile is not None:
        t = mobile.tree
        blacks = np.flatnonzero(t.colour == BLACK)
        if pm.n_edges != t.n_edges:
            v.append(("edges", pm.n_edges, t.n_edges))
        if pm.n_faces != len(blacks):
            v.append(("faces", pm.n_faces, len(blacks)))
        bd = np.sort(2 * t.degree()[blacks])
        if len(bd) == len(fd) and np.any(np.sort(fd) != bd):
            v.append(("face_degrees", np.sort(fd).tolist(), bd.tolist()))
        if pm.n_vertices != t.n_vertices - len(blacks) + 1:
            v.append(("vertices", pm.n_vertices))
        # root incidence: the root edge joins the root corner and its successor
        wc, _ = white_corners(mobile)
        root_white = int(wc[0])
        ends = {int(pm.origin[pm.root]), int(pm.origin[pm.root ^ 1])}
        root_vid = int(np.flatnonzero(np.asarray(pm.vertex_ids) == root_white)[0])
        if root_vid not in ends:
            v.append(("root_incidence", sorted(ends), root_vid))
        tail_is_root = int(pm.origin[pm.root]) == root_vid
        if tail_is_root != (mobile.epsilon == -1):
            v.append(("root_direction", mobile.epsilon))
    if not pm.is_bipartite():
        v.append(("bipartite", False))
    return MapCheckReport(not v, v)


def map_ball(pm: PlanarMap, r: int) -> PlanarMap:
    return pm.ball(r)


def map_distance(pm1: PlanarMap, pm2: PlanarMap, up_to_R: int):
    """``(1 + sup{r : B_r(pm1) = B_r(pm2)})^(-1)`` examined up to ``up_to_R``.

    Returns :data:`IDENTICAL` when both maps are finite, equal, and fit in the
    examined radius.
    """
    last = 0
    for r in range(1, up_to_R + 1):
        if pm1.ball(r).canonical_code() != pm2.ball(r).canonical_code():
            return Fraction(1, 1 + last)
        last = r
    d1 = pm1.distances_from(pm1.root_vertex)
    d2 = pm2.distances_from(pm2.root_vertex)
    if d1.max() < up_to_R and d2.max() < up_to_R and pm1.complete.all() and pm2.complete.all():
        return IDENTICAL
    return Fraction(1, 1 + last)
