"""Electrical networks, the star map and volume/resistance diagnostics.

The star map is the map built from the vertex of infinite degree and its
children only; it is a tree.  Every vertex ``v`` of the full map belongs to
the decoration of one child, written ``v*``.  The metric

    d#(u, v) = d*(u*, v*) + [u != u*] + [v != v*]

makes the map look like that tree with every decoration hung one step away
from its root.  Projecting each map edge onto the star path between its
endpoints' projections gives a tree network whose effective resistances
bound those of the map from below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.sparse.linalg import cg

from .bdg import PlanarMap
from .errors import CapacityError, CertificationError, PhaseError, ToleranceError
from .rng import as_stream
from .samplers import LimitMobile
from .trees import WHITE
from .weights import OffspringLaws

DENSE_MAX = 500
CG_RTOL = 1e-12


# ----------------------------------------------------------------------------
# networks


@dataclass
class ResistorNetwork:
    """Undirected network on ``0..n-1``; conductances may be ``inf``."""

    n: int
    u: np.ndarray
    v: np.ndarray
    c: np.ndarray
    A: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    B: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.int64)
        self.v = np.asarray(self.v, dtype=np.int64)
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.unique(np.asarray(self.A, dtype=np.int64))
        self.B = np.unique(np.asarray(self.B, dtype=np.int64))
        if np.any(self.c <= 0) or np.any(np.isnan(self.c)):
            raise ValueError("conductances must be positive")

    @classmethod
    def unit(cls, n, edges, A=(), B=()) -> "ResistorNetwork":
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        return cls(n, e[:, 0], e[:, 1], np.ones(len(e)), np.asarray(A), np.asarray(B))

    @classmethod
    def from_map(cls, pm: PlanarMap, A=(), B=()) -> "ResistorNetwork":
        src, dst = pm.origin[0::2], pm.origin[1::2]
        return cls(pm.n_vertices, src, dst, np.ones(len(src)), np.asarray(A), np.asarray(B))

    def with_terminals(self, A, B) -> "ResistorNetwork":
        return ResistorNetwork(self.n, self.u, self.v, self.c, np.asarray(A), np.asarray(B))

    def without_edge(self, k: int) -> "ResistorNetwork":
        keep = np.ones(len(self.u), dtype=bool)
        keep[k] = False
        return ResistorNetwork(self.n, self.u[keep], self.v[keep], self.c[keep], self.A, self.B)

    def contracted(self):
        """Identify the endpoints of infinite edges, then all of ``A`` and all
        of ``B``.  Returns ``(n', u', v', c', a, b)`` with loops removed, or
        raises when ``A`` and ``B`` become identified."""
        if len(self.A) == 0 or len(self.B) == 0:
            raise ValueError("both terminal sets must be non-empty")
        if np.intersect1d(self.A, self.B).size:
            raise ValueError("terminal sets must be disjoint")
        inf = np.isinf(self.c)
        eu = np.concatenate([self.u[inf], np.repeat(self.A[0], len(self.A) - 1),
                             np.repeat(self.B[0], len(self.B) - 1)])
        ev = np.concatenate([self.v[inf], self.A[1:], self.B[1:]])
        g = sp.coo_matrix((np.ones(len(eu)), (eu, ev)), shape=(self.n, self.n))
        _, comp = connected_components(g, directed=False)
        a, b = comp[self.A[0]], comp[self.B[0]]
        if a == b:
            return None
        fin = ~inf
        cu, cv, cc = comp[self.u[fin]], comp[self.v[fin]], self.c[fin]
        keep = cu != cv
        _, relabel = np.unique(comp, return_inverse=True)
        m = int(relabel.max()) + 1
        lookup = np.zeros(int(comp.max()) + 1, dtype=np.int64)
        lookup[comp] = relabel
        return m, lookup[cu[keep]], lookup[cv[keep]], cc[keep], int(lookup[a]), int(lookup[b])


def _laplacian(m, u, v, c):
    rows = np.concatenate([u, v, u, v])
    cols = np.concatenate([v, u, u, v])
    vals = np.concatenate([-c, -c, c, c])
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))


def effective_resistance(net: ResistorNetwork, method: str = "auto") -> float:
    """Effective resistance between ``A`` and ``B``; ``inf`` when they are
    not connected (0 when an infinite-conductance path joins them).

    ``dense`` solves the grounded Laplacian exactly, ``cg`` uses conjugate
    gradients with a Jacobi preconditioner, ``tree`` eliminates series and
    parallel pieces on a tree network; ``auto`` picks dense below
    :data:`DENSE_MAX` vertices and ``cg`` otherwise.
    """
    red = net.contracted()
    if red is None:
        return 0.0
    m, u, v, c, a, b = red
    if method == "tree":
        return _tree_resistance(m, u, v, c, a, b)
    # restrict to the component of a
    g = sp.coo_matrix((np.ones(len(u)), (u, v)), shape=(m, m))
    _, comp = connected_components(g, directed=False)
    if comp[a] != comp[b]:
        return math.inf
    keep = comp == comp[a]
    idx = -np.ones(m, dtype=np.int64)
    idx[keep] = np.arange(int(keep.sum()))
    ek = keep[u]
    u, v, c = idx[u[ek]], idx[v[ek]], c[ek]
    a, b, m = int(idx[a]), int(idx[b]), int(keep.sum())
    L = _laplacian(m, u, v, c)
    free = np.ones(m, dtype=bool)
    free[b] = False
    Lr = L[free][:, free]
    rhs = np.zeros(m - 1)
    ai = a if a < b else a - 1
    rhs[ai] = 1.0
    if method == "auto":
        method = "dense" if m <= DENSE_MAX else "cg"
    if method == "dense":
        x = np.linalg.solve(Lr.toarray(), rhs)
    elif method == "cg":
        d = Lr.diagonal()
        pre = sp.diags(1.0 / d)
        x, info = cg(Lr.tocsr(), rhs, rtol=CG_RTOL, atol=0.0, maxiter=20 * m + 1000, M=pre)
        if info != 0:
            raise ToleranceError(f"conjugate gradients did not converge (info={info})")
        res = np.linalg.norm(Lr @ x - rhs)
        if res > 1e-8:
            raise ToleranceError(f"residual {res:.2e} after conjugate gradients")
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(x[ai])


def _tree_resistance(m, u, v, c, a, b) -> float:
    """Series/parallel elimination on a network whose simple graph is a tree
    (parallel edges are merged first)."""
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    key = lo * m + hi
    uk, inv = np.unique(key, return_inverse=True)
    cc = np.bincount(inv, weights=c)
    lo, hi = uk // m, uk % m
    if len(uk) != m - 1 or connected_components(
            sp.coo_matrix((np.ones(len(lo)), (lo, hi)), shape=(m, m)), directed=False)[0] != 1:
        raise PhaseError("series/parallel elimination needs a tree")
    g = sp.coo_matrix((cc, (lo, hi)), shape=(m, m)).tocsr()
    g = g + g.T
    order, pred = breadth_first_order(g, a, directed=False)
    # conductance from each subtree root down to b (0 if b is not below)
    cond = np.zeros(m)
    has_b = np.zeros(m, dtype=bool)
    has_b[b] = True
    cond[b] = math.inf
    gc = g.tocsr()
    for x in order[::-1]:
        p = pred[x]
        if p < 0 or not has_b[x]:
            continue
        ce = gc[x, p]
        sub = cond[x]
        series = ce if math.isinf(sub) else 1.0 / (1.0 / ce + 1.0 / sub)
        cond[p] += series
        has_b[p] = True
    if not has_b[a] or cond[a] == 0:
        return math.inf
    return 1.0 / cond[a]


def series_resistance(resistances) -> float:
    return float(sum(resistances))


def parallel_resistance(resistances) -> float:
    return 1.0 / float(sum(1.0 / r for r in resistances))


def random_network(n: int, extra_edges: int, rng) -> ResistorNetwork:
    """A connected network: a random spanning tree plus extra random edges,
    conductances uniform on ``[0.5, 2]``."""
    gen = as_stream(rng).gen
    parent = np.array([gen.integers(0, i) for i in range(1, n)], dtype=np.int64)
    u = np.concatenate([np.arange(1, n), gen.integers(0, n, extra_edges)])
    v = np.concatenate([parent, gen.integers(0, n, extra_edges)])
    keep = u != v
    c = gen.uniform(0.5, 2.0, int(keep.sum()))
    return ResistorNetwork(n, u[keep], v[keep], c)


# ----------------------------------------------------------------------------
# the star structure of an infinite-map sample


@dataclass
class DecorationStats:
    """Decoration data indexed by position in the star map.

    ``size`` counts all vertices of a decoration, ``delta_l`` is the largest
    label displacement from its root.  ``i_plus[R]``/``i_minus[R]`` are the
    first indices ``i >= 0`` with ``l(s_i) = -R`` and ``l(s_-i) <= -R``
    (labels relative to ``s_0``), and ``m[R]`` the minimum label over the
    decorations with ``-i_minus(R-1) < i <= i_plus(R)``.
    """

    index: np.ndarray
    size: np.ndarray
    delta_l: np.ndarray
    i_plus: dict
    i_minus: dict
    m: dict

    def N(self, x: int) -> int:
        return self.i_plus[x] + self.i_minus[x - 1] - 1


@dataclass
class StarStructure:
    """A window of the infinite map with its star map and projections.

    ``star_of[v]`` is the star-map vertex of ``v*``; ``star_vertex[k]`` is
    the map vertex of star vertex ``k``; ``rho``/``rho_star`` are the root
    of the star map as a map vertex and as a star vertex.
    """

    pm: PlanarMap
    star_pm: PlanarMap
    star_of: np.ndarray
    star_vertex: np.ndarray
    star_index: np.ndarray
    rho: int
    rho_star: int
    decorations: DecorationStats
    mobile: LimitMobile | None = None
    window_chunks: tuple = ()

    def __post_init__(self):
        self.is_star = np.zeros(self.pm.n_vertices, dtype=bool)
        self.is_star[self.star_vertex] = True
        self.dstar = self.star_pm.distances_from(self.rho_star)
        self._parent = None

    # metric -------------------------------------------------------------
    def dstar_between(self, a: int, b: int) -> int:
        d = int(self.star_pm.distances_from(a)[b])
        if d < 0:
            raise CertificationError("star vertices not joined inside the window")
        return d

    def dsharp(self, u: int, v: int) -> int:
        if u == v:
            return 0
        a, b = int(self.star_of[u]), int(self.star_of[v])
        d = self.dstar_between(a, b) if a != b else 0
        return d + int(not self.is_star[u]) + int(not self.is_star[v])

    def dsharp_from_root(self) -> np.ndarray:
        """``d#(rho, v)`` for every map vertex (-1 when not connected)."""
        ds = self.dstar[self.star_of]
        out = ds + (~self.is_star).astype(np.int64)
        out[ds < 0] = -1
        return out

    # certification --------------------------------------------------------
    def certify(self, R: int) -> None:
        """Check that everything about ``B(R; d#)`` is determined by the window."""
        cs = self.star_pm.complete
        ds = self.dstar
        if not np.all(cs[(ds >= 0) & (ds <= R - 1)]):
            raise CertificationError(f"star ball of radius {R} not certified", suggestion="extend the window")
        dsh = self.dsharp_from_root()
        inside = (dsh >= 0) & (dsh < R)
        if not np.all(self.pm.complete[inside]):
            raise CertificationError(f"d#-ball of radius {R} has incomplete vertices",
                                     suggestion="extend the window")
        e = self.ball_edges(R)
        sa, sb = self.star_of[self.pm.origin[2 * e]], self.star_of[self.pm.origin[2 * e + 1]]
        if np.any(self.dstar[sa] < 0) or np.any(self.dstar[sb] < 0):
            raise CertificationError("an edge of the ball projects outside the star window",
                                     suggestion="extend the window")

    def ball_mask(self, R: int) -> np.ndarray:
        dsh = self.dsharp_from_root()
        return (dsh >= 0) & (dsh < R)

    def ball_edges(self, R: int) -> np.ndarray:
        inside = self.ball_mask(R)
        src, dst = self.pm.origin[0::2], self.pm.origin[1::2]
        return np.flatnonzero(inside[src] | inside[dst])

    # projection -----------------------------------------------------------
    def star_tree(self):
        """BFS parent and depth of the star vertices seen from ``rho``."""
        if self._parent is None:
            ptr, nb = self.star_pm.adjacency()
            n = self.star_pm.n_vertices
            rows = np.repeat(np.arange(n), np.diff(ptr))
            g = sp.coo_matrix((np.ones(len(nb)), (rows, nb)), shape=(n, n)).tocsr()
            order, pred = breadth_first_order(g, self.rho_star, directed=False)
            pred = np.where(pred < 0, -1, pred)
            pred[self.rho_star] = -1
            self._order, self._parent = order, pred
        return self._order, self._parent

    def project_edges(self, edges: np.ndarray):
        """Route each map edge along the star path between the projections of
        its endpoints.  Returns ``(c, count, length)``: ``c[x]`` is the sum of
        the lengths of the edges crossing the star edge from ``x`` to its
        parent, ``count[x]`` their number, ``length`` the path lengths."""
        order, parent = self.star_tree()
        depth = self.dstar
        a = self.star_of[self.pm.origin[2 * edges]]
        b = self.star_of[self.pm.origin[2 * edges + 1]]
        if np.any(depth[a] < 0) or np.any(depth[b] < 0):
            raise CertificationError("edge endpoints project outside the star tree")
        x, y = a.copy(), b.copy()
        while True:
            diff = x != y
            if not diff.any():
                break
            dx, dy = depth[x], depth[y]
            mx = diff & (dx >= dy)
            my = diff & (dy >= dx)
            x[mx] = parent[x[mx]]
            y[my] = parent[y[my]]
        lca = x
        length = depth[a] + depth[b] - 2 * depth[lca]
        n = self.star_pm.n_vertices

        def spread(w):
            acc = np.zeros(n, dtype=np.int64)
            np.add.at(acc, a, w)
            np.add.at(acc, b, w)
            np.add.at(acc, lca, -2 * w)
            for node in order[::-1]:
                p = parent[node]
                if p >= 0:
                    acc[p] += acc[node]
            acc[self.rho_star] = 0
            return acc

        return spread(length), spread(np.ones_like(length)), length

    def shorted_network(self, R: int) -> tuple:
        """``(M-network, M#-network)`` on the map vertices for resistance from
        ``rho`` to the complement of ``B(R; d#)``; the M# network carries the
        projected conductances and contracts every decoration."""
        self.certify(R)
        inside = self.ball_mask(R)
        e = self.ball_edges(R)
        src, dst = self.pm.origin[2 * e], self.pm.origin[2 * e + 1]
        outside = np.flatnonzero(~inside)
        n = self.pm.n_vertices
        net_m = ResistorNetwork(n, src, dst, np.ones(len(e)), [self.rho], outside)
        acc, _, _ = self.project_edges(e)
        _, parent = self.star_tree()
        kids = np.flatnonzero((acc > 0) & (parent >= 0))
        su = self.star_vertex[kids]
        sv = self.star_vertex[parent[kids]]
        dec = np.flatnonzero(~self.is_star & (self.star_of >= 0))
        du, dv = dec, self.star_vertex[self.star_of[dec]]
        u = np.concatenate([su, du])
        v = np.concatenate([sv, dv])
        c = np.concatenate([acc[kids].astype(float), np.full(len(du), np.inf)])
        net_s = ResistorNetwork(n, u, v, c, [self.rho], outside)
        return net_m, net_s

    # volumes --------------------------------------------------------------
    def omega(self, R: int) -> int:
        self.certify(R)
        return int(self.pm.degree()[self.ball_mask(R)].sum())

    def star_ball_size(self, R: int) -> int:
        return int(((self.dstar >= 0) & (self.dstar < R)).sum())


def _decoration_stats(lm: LimitMobile, win, star_index: np.ndarray) -> DecorationStats:
    n = len(star_index)
    size = np.zeros(n, dtype=np.int64)
    dl = np.zeros(n, dtype=np.int64)
    dmin = np.zeros(n, dtype=np.int64)
    (t, lab), _, s = lm.stem_tree()
    whites = np.flatnonzero(t.colour == WHITE)
    zero = int(np.searchsorted(star_index, 0))
    s0 = int(t.parent[s])
    size[zero] = t.n_vertices - 1
    dl[zero] = int(np.abs(lab[whites] - lab[s0]).max())
    dmin[zero] = int(lab[whites].min())
    for side in (1, -1):
        for ch in lm.chunks[side]:
            if ch.block_min is None:
                raise PhaseError("decoration statistics need an unfiltered window")
            ks = side * (ch.start + np.arange(ch.size))
            j = np.searchsorted(star_index, ks)
            ok = (j < n) & (star_index[np.minimum(j, n - 1)] == ks)
            j = j[ok]
            size[j] = ch.block_size[ok]
            dl[j] = np.maximum(ch.block_max - ch.walk, ch.walk - ch.block_min)[ok]
            dmin[j] = ch.block_min[ok]
    lab_s = win.star_window[1] - lm.s0_label
    dmin = dmin - lm.s0_label
    left = lab_s[zero:]             # s_0, s_1, s_2, ...
    right = lab_s[:zero + 1][::-1]  # s_0, s_-1, s_-2, ...
    ip, im, mm = {}, {}, {}
    for R in range(0, int(-left.min()) + 1):
        ip[R] = int(np.flatnonzero(left == -R)[0])
    run = np.minimum.accumulate(right)
    for R in range(0, int(-right.min()) + 1):
        im[R] = int(np.searchsorted(-run, R))
    for R in range(1, len(ip)):
        if R - 1 in im:
            lo, hi = zero - im[R - 1] + 1, zero + ip[R]
            mm[R] = int(dmin[max(lo, 0):hi + 1].min())
    return DecorationStats(star_index, size, dl, ip, im, mm)


def build_star_map(lm: LimitMobile, n_left: int, n_right: int) -> StarStructure:
    """Star structure of the unfiltered window with the given chunk counts."""
    if lm.phase == "spine":
        raise PhaseError("no vertex of infinite degree: the star map needs the condensation phase")
    if lm.keep_max is not None:
        raise PhaseError("the star structure needs an unfiltered mobile")
    win = lm.window(n_left, n_right)
    pm = win.to_map()
    star_pm = win.star_map()
    idx = win.star_window[0]
    star_of = np.searchsorted(idx, win.star)
    rho_star = star_pm.root_vertex
    rho = int(win.star_vertex[rho_star])
    dec = _decoration_stats(lm, win, idx)
    return StarStructure(pm, star_pm, star_of, win.star_vertex, idx, rho, rho_star, dec, lm,
                         (n_left, n_right))


def certified_star_structure(laws: OffspringLaws, R: int, rng, max_chunks: int = 16,
                             start: int = 1) -> StarStructure:
    """Grow an unfiltered window until ``B(R; d#)`` is certified."""
    lm = LimitMobile(laws, rng)
    n = start
    while True:
        try:
            ss = build_star_map(lm, n, n)
            ss.certify(R)
            return ss
        except CertificationError:
            if n >= max_chunks:
                raise CapacityError(f"d#-ball of radius {R} not certified within {n} chunks per side",
                                    state={"chunks": n})
            n += 1


def dsharp(ss: StarStructure, u: int, v: int) -> int:
    return ss.dsharp(u, v)


def decoration_statistics(ss: StarStructure, R: int | None = None) -> DecorationStats:
    """Decoration statistics of the window; with ``R`` given, raise unless the
    window determines ``i_plus(R)``, ``i_minus(R)`` and ``m(R)``."""
    d = ss.decorations
    if R is not None and (R not in d.i_plus or R not in d.i_minus or R not in d.m):
        raise CertificationError(f"window too small to resolve level {R}", suggestion="extend the window")
    return d


@dataclass
class ProjectedNetwork:
    network: ResistorNetwork
    conductance_total: int
    crossing_total: int
    length_total: int
    length_sq_total: int

    @property
    def conserved(self) -> bool:
        """Each edge of length ``L`` adds ``L`` to ``L`` star edges."""
        return self.conductance_total == self.length_sq_total and self.crossing_total == self.length_total


def project_network(ss: StarStructure, R: int) -> ProjectedNetwork:
    """The star network with projected conductances for the edges touching
    ``B(R; d#)``, decorations contracted onto their roots."""
    _, net_s = ss.shorted_network(R)
    e = ss.ball_edges(R)
    c, count, length = ss.project_edges(e)
    return ProjectedNetwork(net_s, int(c.sum()), int(count.sum()), int(length.sum()),
                            int((length * length).sum()))


def shorting_check(ss: StarStructure, R: int) -> dict:
    """Resistance from the root to the complement of ``B(R; d#)`` in the map
    and in the projected network (which must not exceed it)."""
    net_m, net_s = ss.shorted_network(R)
    rm = effective_resistance(net_m)
    rs = effective_resistance(net_s)
    return {"R": R, "reff_map": rm, "reff_projected": rs, "holds": bool(rs <= rm * (1 + 1e-9) + 1e-12)}


# ----------------------------------------------------------------------------
# diagnostics


@dataclass
class VolumeProfile:
    radii: list
    omega: list
    star_ball: list

    def to_dict(self) -> dict:
        return {"R": self.radii, "omega": self.omega, "star_ball": self.star_ball}


def volume_profile(ss: StarStructure, radii) -> VolumeProfile:
    radii = sorted(int(r) for r in radii)
    return VolumeProfile(radii, [ss.omega(r) for r in radii], [ss.star_ball_size(r) for r in radii])


@dataclass
class JLambdaReport:
    R: int
    lam: float
    omega: int
    reff_out: float
    worst_ratio: float | None
    vol_lower: bool
    vol_upper: bool
    res_lower: bool
    res_upper: bool | None
    note: str = ("resistance to the complement uses every edge leaving the ball; point resistances are "
                 "upper bounds from the finite window")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def j_lambda(ss: StarStructure, R: int, lam: float, max_solves: int = 50) -> JLambdaReport:
    """Evaluate the four volume/resistance conditions at ``(R, lam)``.

    The point condition is checked for every vertex ``y`` of the ball: first
    with the bound ``R_eff <= d``, then, where that is not enough, with an
    effective resistance computed on the window (an upper bound).
    """
    om = ss.omega(R)
    net_m, _ = ss.shorted_network(R)
    r_out = effective_resistance(net_m)
    inside = np.flatnonzero(ss.ball_mask(R))
    dsh = ss.dsharp_from_root()
    dist = ss.pm.distances_from(ss.rho)
    ys = inside[inside != ss.rho]
    ratio = dist[ys] / np.maximum(dsh[ys], 1)
    bad = ys[ratio > lam]
    worst = float(ratio.max()) if len(ys) else 0.0
    res_upper: bool | None = not len(bad)
    if len(bad):
        if len(bad) > max_solves:
            res_upper = None
        else:
            full = ResistorNetwork.from_map(ss.pm)
            vals = [effective_resistance(full.with_terminals([ss.rho], [y])) / max(dsh[y], 1) for y in bad]
            worst = float(max(vals))
            res_upper = worst <= lam
    return JLambdaReport(R, lam, om, r_out, worst, om >= R * R / lam, om <= lam * R * R, r_out >= R / lam,
                         res_upper)


def geosup_pairs(ss: StarStructure, R: int, pairs: int, rng) -> dict:
    """Check ``d(v,w) <= d*(v*,w*) + 20 max Delta_l + 8`` on random pairs of
    ``B(R; d#)``.  The maximum runs over decorations with indices between
    the smaller star index and the meeting point of the two successor
    chains in the star map.  Distances are taken in the window map, which
    can only overestimate them."""
    gen = as_stream(rng).gen
    ss.certify(R)
    inside = np.flatnonzero(ss.ball_mask(R))
    idx = ss.star_index
    lab = ss.star_pm.labels
    from .bdg import successors_linear

    succ = successors_linear(lab)
    dl = ss.decorations.delta_l
    checked = violations = skipped = 0
    worst = -math.inf
    for _ in range(pairs):
        v, w = (int(x) for x in gen.choice(inside, 2))
        a, b = int(ss.star_of[v]), int(ss.star_of[w])
        meet = _chain_meet(a, b, lab, succ)
        if meet is None:
            skipped += 1
            continue
        lo = min(a, b)
        hi = max(meet, lo)
        bound = ss.dstar_between(a, b) + 20 * int(dl[lo:hi + 1].max()) + 8
        d = int(ss.pm.distances_from(v)[w])
        if d < 0:
            skipped += 1
            continue
        checked += 1
        worst = max(worst, d - bound)
        if d > bound:
            violations += 1
    return {"checked": checked, "violations": violations, "skipped": skipped, "max_slack_used": worst}


def _chain_meet(a: int, b: int, lab: np.ndarray, succ: np.ndarray):
    x, y = a, b
    while x != y:
        if lab[x] >= lab[y]:
            nx = succ[x]
            if nx < 0:
                return None
            if lab[x] == lab[y]:
                ny = succ[y]
                if ny < 0:
                    return None
                x, y = nx, ny
                continue
            x = nx
        else:
            ny = succ[y]
            if ny < 0:
                return None
            y = ny
    return x
