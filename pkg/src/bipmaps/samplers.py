"""Random generation of trees, mobiles and maps.

Finite objects are drawn exactly from their size-conditioned laws.  Infinite
limit objects are drawn as finite truncations that grow on demand; each piece
of randomness is keyed to its own stream, so a larger truncation extends a
smaller one drawn with the same seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln

from .bdg import PlanarMap, phi_build, phi_build_window
from .errors import CapacityError, CertificationError, EmptySupportError, PhaseError, ToleranceError
from .labels import Mobile, random_labels, sample_bridges
from .psi import psi_forward
from .rng import RngStream, as_stream
from .trees import BLACK, WHITE, PlaneTree, _ragged_arange
from .weights import INFINITE, OffspringLaws, TreeWeights

EXACT_DP_MAX = 12
DIRECT_CONV_MAX = 20000
OUTGROWTH_CAP = 10**7
CHUNK0 = 64
MAX_BLOCKS = 1 << 28
RIGHT_KEY = 1 << 40


# ----------------------------------------------------------------------------
# finite simply generated trees


def _log_weights(tw: TreeWeights, n: int) -> np.ndarray:
    fw = tw.fw
    k = np.arange(n + 1)
    out = np.full(n + 1, -np.inf)
    out[0] = 0.0
    pos = k[1:]
    if fw.family == "explicit":
        for i, qi in fw.params["q"].items():
            if i <= n and qi != 0:
                out[i] = math.log(float(tw.w(i)))
    elif fw.family == "power_law":
        out[1:] = math.log(float(fw.params["c"])) - float(fw.params["beta"]) * np.log(pos)
    elif fw.family == "geometric":
        out[1:] = math.log(float(fw.params["a"])) + pos * math.log(float(fw.params["b"]))
    else:
        out[1:] = math.log(float(fw.params["c"])) + gammaln(pos + 1.0)
    return out


def _float_base(tw: TreeWeights, n: int) -> np.ndarray:
    lw = _log_weights(tw, n)
    k = np.arange(1, n + 1)
    finite = np.isfinite(lw[1:])
    # exponential tilting leaves the size-conditioned law unchanged
    theta = -float(np.max(lw[1:][finite] / k[finite])) if finite.any() else 0.0
    return np.exp(lw + theta * np.arange(n + 1))


def _mul(a, b, n, exact):
    if exact:
        c = [Fraction(0)] * (n + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(n + 1 - i):
                    if b[j]:
                        c[i + j] += x * b[j]
        return c
    if n <= DIRECT_CONV_MAX:
        c = np.convolve(a, b)[: n + 1]
    else:
        c = np.clip(fftconvolve(a, b)[: n + 1], 0.0, None)
    m = c.max()
    return c / m if m > 0 else c


def _power_rows(base, V, n, exact):
    """Coefficients of ``base^m`` (up to degree ``n``) for every length ``m``
    met when halving ``V`` repeatedly.  Float rows are rescaled to max 1."""
    need, stack = set(), [V]
    while stack:
        m = stack.pop()
        if m in need:
            continue
        need.add(m)
        if m > 1:
            stack += [m // 2, m - m // 2]
    rows = {1: base}
    for m in sorted(need):
        if m > 1:
            rows[m] = _mul(rows[m // 2], rows[m - m // 2], n, exact)
    return rows


def _pick(weights, gen, exact) -> int:
    if exact:
        total = sum(weights)
        u = gen.random() * float(total)
        acc = Fraction(0)
        for i, w in enumerate(weights):
            acc += w
            if float(acc) > u:
                return i
        return max(i for i, w in enumerate(weights) if w)
    cw = np.cumsum(weights)
    return int(np.searchsorted(cw, gen.random() * cw[-1], side="right"))


def sample_degree_sequence(tw: TreeWeights, n: int, rng, exact=None) -> np.ndarray:
    """I.i.d. weights ``w`` on ``n + 1`` slots conditioned on total ``n``.

    The total is split in halves recursively using the partition functions of
    the two halves, so only ``O(log n)`` rows of the convolution table are
    needed.  Rational arithmetic is used up to ``EXACT_DP_MAX`` edges.
    """
    gen = as_stream(rng).gen
    V = n + 1
    exact = n <= EXACT_DP_MAX if exact is None else exact
    base = tw.exact_weights(n) if exact else _float_base(tw, n)
    rows = _power_rows(base, V, n, exact)
    if not rows[V][n]:
        if exact or tw.fw.family == "explicit":
            raise EmptySupportError(f"no tree with {n} edges has positive weight")
        raise ToleranceError(f"partition function underflows at n={n}")
    out = np.zeros(V, dtype=np.int64)
    stack = [(0, V, n)]
    while stack:
        start, m, s = stack.pop()
        if s == 0:
            continue
        if m == 1:
            out[start] = s
            continue
        m1 = m // 2
        r1, r2 = rows[m1], rows[m - m1]
        if exact:
            w = [r1[a] * r2[s - a] for a in range(s + 1)]
        else:
            w = r1[: s + 1] * r2[s::-1]
        a = _pick(w, gen, exact)
        stack.append((start, m1, a))
        stack.append((start + m1, m - m1, s - a))
    return out


def cycle_lemma(seq) -> np.ndarray:
    """The unique cyclic rotation of ``seq`` (sum ``len - 1``) that is a
    preorder outdegree sequence."""
    x = np.asarray(seq, dtype=np.int64)
    walk = np.cumsum(x - 1)
    k = int(np.argmin(walk)) + 1
    return np.concatenate([x[k:], x[:k]])


def sample_sgt_n(laws: OffspringLaws, n: int, rng, tw: TreeWeights | None = None) -> PlaneTree:
    """A plane tree with ``n`` edges drawn with probability proportional to
    the product of ``w_outdeg`` over its vertices."""
    if n < 0:
        raise ValueError("n must be non-negative")
    tw = laws.tw if tw is None else tw
    if n == 0:
        return PlaneTree.single_vertex()
    seq = sample_degree_sequence(tw, n, rng)
    return PlaneTree.from_outdegrees(cycle_lemma(seq))


def sample_mobile_n(laws: OffspringLaws, n: int, rng) -> Mobile:
    """Image tree of a weighted tree, uniform bridges, uniform sign."""
    st = as_stream(rng)
    t = sample_sgt_n(laws, n, st)
    image, _ = psi_forward(t)
    lab = random_labels(image, st)
    eps = 1 if st.gen.random() < 0.5 else -1
    return Mobile(image, lab, eps)


def sample_map_n(laws: OffspringLaws, n: int, rng) -> PlanarMap:
    return phi_build(sample_mobile_n(laws, n, rng))


# ----------------------------------------------------------------------------
# two-type Galton-Watson outgrowths


@dataclass
class Forest:
    """Outgrowths in generation order; children of a vertex are contiguous
    and left to right.  ``rel`` is the label of a white vertex minus the label
    of its grandparent (0 for roots and black vertices)."""

    parent: np.ndarray
    colour: np.ndarray
    outdeg: np.ndarray
    rel: np.ndarray
    n_roots: int
    gen_ptr: np.ndarray

    @property
    def size(self) -> int:
        return len(self.parent)

    def depth(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.gen_ptr) - 1), np.diff(self.gen_ptr))

    def labels(self, base=0) -> np.ndarray:
        """White labels.  ``base`` is the label of each white root, or for
        black roots the label of the white vertex the root hangs from."""
        lab = np.zeros(self.size, dtype=np.int64)
        base = np.broadcast_to(np.asarray(base, dtype=np.int64), (self.n_roots,))
        gp = self.gen_ptr
        if self.colour[0] == WHITE:
            lab[: self.n_roots] = base
            g0 = 2
        else:
            if len(gp) > 2:
                sl = slice(gp[1], gp[2])
                lab[sl] = base[self.parent[sl]] + self.rel[sl]
            g0 = 3
        for g in range(g0, len(gp) - 1, 2):
            sl = slice(gp[g], gp[g + 1])
            lab[sl] = lab[self.parent[self.parent[sl]]] + self.rel[sl]
        return lab


def _bridge_prefixes(k: np.ndarray, gen) -> np.ndarray:
    """For black vertices with ``k`` white children each, the label offsets of
    the children relative to the parent (prefix sums of uniform bridges)."""
    out = np.zeros(int(k.sum()), dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(k)[:-1]])
    for r in np.unique(k[k > 0]).tolist():
        sel = np.flatnonzero(k == r)
        br = sample_bridges(r + 1, len(sel), gen, "exact" if r > 2000 else "rejection")
        pre = np.cumsum(br[:, :r], axis=1)
        out[_ragged_arange(starts[sel], np.full(len(sel), r))] = pre.reshape(-1)
    return out


def grow_forest(laws: OffspringLaws, n_roots: int, root_colour: int, rng, cap: int = OUTGROWTH_CAP) -> Forest:
    """Independent two-type Galton-Watson trees (white: geometric, black:
    shifted offspring law), grown generation by generation."""
    gen = rng.gen if hasattr(rng, "gen") else rng
    if n_roots == 0:
        z = np.zeros(0, dtype=np.int64)
        return Forest(z, z.astype(np.int8), z, z, 0, np.zeros(1, dtype=np.int64))
    parents = [np.full(n_roots, -1, dtype=np.int64)]
    colours = [np.full(n_roots, root_colour, dtype=np.int8)]
    rels = [np.zeros(n_roots, dtype=np.int64)]
    outdeg = []
    cur = np.arange(n_roots, dtype=np.int64)
    col = root_colour
    total = n_roots
    while len(cur):
        if col == WHITE:
            k = laws.xi_white.sample(gen, len(cur))
        else:
            k = laws.xi_black.sample(gen, len(cur))
        k = np.asarray(k, dtype=np.int64)
        outdeg.append(k)
        m = int(k.sum())
        if total + m > cap:
            raise CapacityError(f"outgrowth exceeded {cap} vertices", state={"vertices": total + m})
        kids = np.arange(total, total + m, dtype=np.int64)
        parents.append(np.repeat(cur, k))
        colours.append(np.full(m, 1 - col, dtype=np.int8))
        rels.append(_bridge_prefixes(k, gen) if col == BLACK else np.zeros(m, dtype=np.int64))
        total += m
        cur = kids
        col = 1 - col
    sizes = [len(p) for p in parents]
    return Forest(np.concatenate(parents), np.concatenate(colours), np.concatenate(outdeg),
                  np.concatenate(rels), n_roots, np.concatenate([[0], np.cumsum(sizes)]))


# ----------------------------------------------------------------------------
# assembling truncations of the infinite mobile


class _Arena:
    """Growable vertex store used to assemble truncated limit trees."""

    def __init__(self):
        self.parts = []
        self.n = 0

    def add(self, parent, pos, outdeg, label, frontier=False):
        parent = np.atleast_1d(np.asarray(parent, dtype=np.int64))
        m = len(parent)
        self.parts.append((parent, np.broadcast_to(np.asarray(pos, dtype=np.int64), (m,)).copy(),
                           np.broadcast_to(np.asarray(outdeg, dtype=np.int64), (m,)).copy(),
                           np.broadcast_to(np.asarray(label, dtype=np.int64), (m,)).copy(),
                           np.broadcast_to(np.asarray(frontier, dtype=bool), (m,)).copy()))
        start = self.n
        self.n += m
        return start

    def add_forest(self, forest: Forest, root_parent, root_pos, base):
        """Attach a forest; roots hang from ``root_parent`` at ``root_pos``."""
        if forest.size == 0:
            return self.n
        start = self.n
        par = forest.parent + start
        nonroot = forest.parent >= 0
        pos = np.zeros(forest.size, dtype=np.int64)
        idx = np.flatnonzero(nonroot)
        if len(idx):
            p = forest.parent[idx]
            first = np.ones(len(idx), dtype=bool)
            first[1:] = p[1:] != p[:-1]
            grp = np.maximum.accumulate(np.where(first, np.arange(len(idx)), 0))
            pos[idx] = np.arange(len(idx)) - grp
        r = forest.n_roots
        par[:r] = root_parent
        pos[:r] = root_pos
        return self.add(par, pos, forest.outdeg, forest.labels(base))

    def columns(self):
        cols = [np.concatenate([p[i] for p in self.parts]) for i in range(5)]
        return cols

    def tree(self):
        parent, pos, outdeg, label, frontier = self.columns()
        signed = pos.copy()
        nonroot = parent >= 0
        pout = outdeg[np.maximum(parent, 0)]
        fin = nonroot & (pout != INFINITE)
        signed[fin] = np.where(pos[fin] <= pout[fin] // 2, pos[fin], pos[fin] - pout[fin])
        rank = np.where(pos >= 0, pos, RIGHT_KEY + pos)
        stored = np.bincount(parent[nonroot], minlength=len(parent))
        frontier = frontier | ((outdeg != INFINITE) & (stored != outdeg)) | (outdeg == INFINITE)
        t = PlaneTree.from_parents(parent, rank, signed=signed, outdeg=outdeg, frontier=frontier)
        return t, label


@dataclass
class SpineLevel:
    """One generation of the spine: a special white vertex and its special
    black child, with everything hanging from them."""

    white_children: int
    special_white_child: int
    black_degree: int  # INFINITE for the vertex s
    special_black_child: int
    bridge_prefix: np.ndarray
    black_forest: Forest | None
    white_forest: Forest | None


def _spine_level(laws: OffspringLaws, st: RngStream) -> SpineLevel:
    gen = st.gen
    c = int(laws.xi_white_hat.sample(gen))
    j = int(gen.integers(c))
    bf = grow_forest(laws, c - 1, BLACK, st.derive(1))
    d = int(laws.xi_black_hat.sample(gen))
    if d == INFINITE:
        return SpineLevel(c, j, INFINITE, -1, np.zeros(0, dtype=np.int64), bf, None)
    i = int(gen.integers(d))
    pre = _bridge_prefixes(np.array([d]), gen)
    wf = grow_forest(laws, d - 1, WHITE, st.derive(2))
    return SpineLevel(c, j, d, i, pre, bf, wf)


def _phase(laws: OffspringLaws) -> str:
    if laws.degenerate:
        return "kappa0"
    return "condensation" if laws.kappa < 1 else "spine"


@dataclass
class Chunk:
    """A run of consecutive children of ``s`` on one side, with decorations.

    Corner arrays list the white corners of the kept blocks in contour order,
    with absolute labels; ``c_vertex`` numbers the kept white vertices of the
    chunk from 0.  ``s_offset``/``s_label`` give the kept children (offsets
    from ``start``) and their labels.  The full walk and forest are stored
    only when nothing is filtered.
    """

    side: int
    index: int
    start: int
    size: int
    walk_min: int
    walk_last: int
    s_offset: np.ndarray
    s_label: np.ndarray
    c_label: np.ndarray
    c_vertex: np.ndarray
    c_block: np.ndarray
    n_white: int
    kept_blocks: np.ndarray
    walk: np.ndarray | None = None
    block_min: np.ndarray | None = None
    block_max: np.ndarray | None = None
    block_size: np.ndarray | None = None
    forest: Forest | None = None


CHUNK_MAX = 1 << 18


def chunk_bounds(c: int):
    """First child index and size of chunk ``c`` on either side."""
    cm = CHUNK_MAX.bit_length() - CHUNK0.bit_length()
    if c <= cm:
        return CHUNK0 * ((1 << c) - 1) + 1, CHUNK0 << c
    first = CHUNK0 * ((1 << (cm + 1)) - 1) + 1
    return first + (c - cm - 1) * CHUNK_MAX, CHUNK_MAX


def _make_chunk(laws, st: RngStream, side: int, c: int, base: int, cap: int, keep_max=None) -> Chunk:
    start, B = chunk_bounds(c)
    steps = st.derive(0).gen.geometric(0.5, B).astype(np.int64) - 2
    walk = base + (np.cumsum(steps) if side > 0 else -np.cumsum(steps))
    forest = grow_forest(laws, B, WHITE, st.derive(1), cap)
    lab = forest.labels(walk)
    V = forest.size
    whites = forest.colour == WHITE
    block = np.zeros(V, dtype=np.int64)
    block[:B] = np.arange(B)
    gp = forest.gen_ptr
    for g in range(1, len(gp) - 1):
        sl = slice(gp[g], gp[g + 1])
        block[sl] = block[forest.parent[sl]]
    bmin = np.full(B, np.iinfo(np.int64).max)
    np.minimum.at(bmin, block[whites], lab[whites])
    keep_block = np.ones(B, dtype=bool) if keep_max is None else bmin <= keep_max
    # contour of the kept blocks: a virtual root above the block roots
    keep_v = keep_block[block]
    old = np.flatnonzero(keep_v)
    new_of = -np.ones(V, dtype=np.int64)
    new_of[old] = np.arange(len(old)) + 1
    fpar = forest.parent[old]
    parent = np.concatenate([[-1], np.where(fpar >= 0, new_of[np.maximum(fpar, 0)], 0)])
    rank = np.concatenate([[0], np.where(fpar >= 0, old, side * block[old])])
    tree = PlaneTree.from_parents(parent, rank)
    _, verts, _ = tree.corner_times()
    verts = old[verts[verts > 0] - 1]
    verts = verts[whites[verts]]
    wid = np.cumsum(whites & keep_v) - 1
    s_off = np.arange(B) if keep_max is None else np.flatnonzero(walk <= keep_max)
    ch = Chunk(side, c, start, B, int(walk.min()), int(walk[-1]), s_off, walk[s_off],
               lab[verts], wid[verts], block[verts], int((whites & keep_v).sum()), np.flatnonzero(keep_block))
    if keep_max is None:
        ch.walk = walk
        bmax = np.full(B, np.iinfo(np.int64).min)
        np.maximum.at(bmax, block[whites], lab[whites])
        ch.block_min, ch.block_max = bmin, bmax
        ch.block_size = np.bincount(block, minlength=B)
        ch.forest = forest
    return ch


class LimitMobile:
    """A truncation of the infinite mobile, grown on demand.

    Randomness layout, with ``st`` the sample's stream: ``st.derive(0)`` for
    the sign, ``st.derive(1).derive(k)`` for spine generation ``k``, and
    ``st.derive(2 or 3).derive(c)`` for chunk ``c`` of the left or right
    children of ``s``.  Chunk ``c`` holds children ``CHUNK0*(2^c-1)+1`` to
    ``CHUNK0*(2^(c+1)-1)`` of its side.
    """

    def __init__(self, laws: OffspringLaws, rng, cap: int = OUTGROWTH_CAP, max_depth: int = 1 << 16,
                 keep_max: int | None = None, max_blocks: int = MAX_BLOCKS):
        self.laws = laws
        self.st = as_stream(rng)
        self.cap = cap
        self.keep_max = keep_max
        self.max_blocks = max_blocks
        self.phase = _phase(laws)
        self.epsilon = 1 if self.st.derive(0).gen.random() < 0.5 else -1
        self.chunks = {1: [], -1: []}
        self.levels: list[SpineLevel] = []
        self.max_depth = max_depth
        if self.phase == "condensation":
            while True:
                self._grow_spine()
                if self.levels[-1].black_degree == INFINITE:
                    break
                if len(self.levels) >= max_depth:
                    raise CapacityError("spine longer than the depth cap", state={"depth": len(self.levels)})
        self._stem = None
        self._stem_cont = None

    # spine ----------------------------------------------------------------
    def _grow_spine(self):
        k = len(self.levels)
        self.levels.append(_spine_level(self.laws, self.st.derive(1).derive(k)))

    def grow_spine_to(self, depth: int):
        if self.phase != "spine":
            raise PhaseError("only an infinite spine can be grown to a depth")
        while len(self.levels) < depth:
            self._grow_spine()

    @property
    def spine_length(self):
        """Number of spine edges ending at ``s`` (odd), or None when the spine
        is infinite."""
        if self.phase == "kappa0":
            return 1
        if self.phase == "spine":
            return None
        return 2 * len(self.levels) - 1

    # children of s -----------------------------------------------------------
    @property
    def s0_label(self) -> int:
        if self.phase == "kappa0":
            return 0
        ar, _, s = self.stem_tree()
        return int(ar[1][ar[0].parent[s]])

    def chunk(self, side: int, c: int) -> Chunk:
        if self.phase == "spine":
            raise PhaseError("no vertex of infinite degree when the spine is infinite")
        lst = self.chunks[side]
        while len(lst) <= c:
            k = len(lst)
            start, size = chunk_bounds(k)
            if start + size - 1 > self.max_blocks:
                raise CapacityError(f"more than {self.max_blocks} children of s requested on one side",
                                    state={"side": side, "chunks": k})
            base = lst[-1].walk_last if lst else self.s0_label
            lst.append(_make_chunk(self.laws, self.st.derive(2 if side > 0 else 3).derive(k), side, k,
                                   int(base), self.cap, self.keep_max))
        return lst[c]

    def s_labels(self, side: int, n: int) -> np.ndarray:
        """Absolute labels of ``s_{side*1}, ..., s_{side*n}`` (unfiltered only)."""
        if self.keep_max is not None:
            raise PhaseError("child labels are not all stored when blocks are filtered")
        out, got, c = [], 0, 0
        while got < n:
            ch = self.chunk(side, c)
            out.append(ch.walk)
            got += ch.size
            c += 1
        return np.concatenate(out)[:n] if out else np.zeros(0, dtype=np.int64)

    def n_generated(self, side: int) -> int:
        return sum(ch.size for ch in self.chunks[side])

    # the part containing the root ---------------------------------------------
    def stem(self, depth: int | None = None):
        """Arena holding the spine and its outgrowths; for an infinite vertex
        ``s`` it is stored as a leaf.  Returns ``(arena, spine, s_or_frontier)``."""
        ar = _Arena()
        if self.phase == "kappa0":
            ar.add(-1, 0, 1, 0)
            s = ar.add(0, 0, INFINITE, 0)
            return ar, [0, s], s
        levels = self.levels if depth is None else self.levels[:depth]
        w = ar.add(-1, 0, levels[0].white_children, 0)
        wl = 0
        spine = [w]
        last = None
        for li, lev in enumerate(levels):
            b = ar.add(w, lev.special_white_child, lev.black_degree, 0)
            spine.append(b)
            others = [p for p in range(lev.white_children) if p != lev.special_white_child]
            ar.add_forest(lev.black_forest, w, np.array(others, dtype=np.int64), wl)
            last = b
            if lev.black_degree == INFINITE:
                break
            labs = wl + lev.bridge_prefix
            others = [p for p in range(lev.black_degree) if p != lev.special_black_child]
            ar.add_forest(lev.white_forest, b, np.array(others, dtype=np.int64), labs[others])
            if li == len(levels) - 1 and self.phase == "spine":
                break
            i = lev.special_black_child
            nxt = self.levels[li + 1]
            wl = int(labs[i])
            w = ar.add(b, i, nxt.white_children, wl)
            spine.append(w)
        return ar, spine, last

    def stem_tree(self):
        """``((tree, labels), spine, s)`` for the condensation and degenerate
        phases (cached)."""
        if self._stem is None:
            ar, spine, s = self.stem()
            self._stem = (ar.tree(), np.array(spine, dtype=np.int64), s)
        return self._stem

    # windows of the white contour -----------------------------------------
    def _stem_contour(self):
        if self._stem_cont is None:
            (t, lab), spine, s = self.stem_tree()
            times, verts, _ = t.corner_times()
            white = t.colour[verts] == WHITE
            ts = t.first_visit_time()[s]
            wt, wv = times[white], verts[white]
            whites = np.flatnonzero(t.colour == WHITE)
            vid = -np.ones(t.n_vertices, dtype=np.int64)
            vid[whites] = np.arange(len(whites))
            self._stem_cont = (lab, vid, whites, wv[wt < ts], wv[wt > ts])
        return self._stem_cont

    def window(self, n_left: int, n_right: int) -> "ContourWindow":
        """White-contour window made of the stem and ``n_left``/``n_right``
        chunks of children of ``s`` (condensation and degenerate phases)."""
        if self.phase == "spine":
            raise PhaseError("use spine_window for an infinite spine")
        lab, vid, whites, left0, right0 = self._stem_contour()
        n0 = len(whites)
        lab_parts, vid_parts = [], []
        star = [np.zeros(n0, dtype=np.int64)]
        vlab = [lab[whites]]
        offset = n0
        left_parts = []
        sv = {1: [], -1: []}
        for side, count in ((1, n_left), (-1, n_right)):
            for c in range(count):
                ch = self.chunk(side, c)
                sv[side].append(offset + np.searchsorted(ch.kept_blocks, ch.s_offset))
                st_idx = np.zeros(ch.n_white, dtype=np.int64)
                st_idx[ch.c_vertex] = side * (ch.start + ch.c_block)
                vl = np.zeros(ch.n_white, dtype=np.int64)
                vl[ch.c_vertex] = ch.c_label
                star.append(st_idx)
                vlab.append(vl)
                part = (ch.c_label, ch.c_vertex + offset)
                offset += ch.n_white
                if side > 0:
                    left_parts.append(part)
                else:
                    lab_parts.insert(0, part[0])
                    vid_parts.insert(0, part[1])
        lab_parts += [lab[right0], lab[left0]]
        vid_parts += [vid[right0], vid[left0]]
        root_pos = sum(len(x) for x in lab_parts[:-1])
        for lp, vp in left_parts:
            lab_parts.append(lp)
            vid_parts.append(vp)
        star_idx = np.concatenate(star)
        z = np.zeros(0, dtype=np.int64)
        (t, _), _, s = self.stem_tree()
        s0 = vid[t.parent[s]]
        star_vertex = np.concatenate([np.concatenate([z] + sv[-1])[::-1], [s0], np.concatenate([z] + sv[1])])
        return ContourWindow(np.concatenate(vid_parts), np.concatenate(lab_parts), root_pos, self.epsilon,
                             offset, np.concatenate(vlab), star_idx, self._star_window(n_left, n_right),
                             star_vertex=star_vertex)

    def _star_window(self, n_left, n_right):
        """Contour of the mobile keeping only ``s`` and its children."""
        z = np.zeros(0, dtype=np.int64)
        li, ll, ri, rl = [z], [z], [z], [z]
        for side, count, ia, la in ((1, n_left, li, ll), (-1, n_right, ri, rl)):
            for c in range(count):
                ch = self.chunk(side, c)
                ia.append(side * (ch.start + ch.s_offset))
                la.append(ch.s_label)
        idx = np.concatenate([np.concatenate(ri)[::-1], [0], np.concatenate(li)])
        labels = np.concatenate([np.concatenate(rl)[::-1], [self.s0_label], np.concatenate(ll)])
        return idx, labels

    def spine_window(self, depth: int) -> "ContourWindow":
        """Window of an infinite spine truncated after ``depth`` generations."""
        if self.phase != "spine":
            raise PhaseError("spine windows need an infinite spine")
        self.grow_spine_to(depth)
        ar, spine, f = self.stem(depth)
        t, lab = ar.tree()
        times, verts, _ = t.corner_times()
        white = t.colour[verts] == WHITE
        gap_pos = self.levels[depth - 1].special_black_child
        kids = t.children(f)
        before = kids[t.signed[kids] < gap_pos] if gap_pos >= 0 else kids[:0]
        pos_of = np.where(t.signed[kids] >= 0, t.signed[kids], t.signed[kids] + t.outdeg[f])
        before = kids[pos_of < gap_pos]
        gap_t = t.first_visit_time()[f] + 1 + 2 * int(t.subtree_size[before].sum())
        wt, wv = times[white], verts[white]
        whites = np.flatnonzero(t.colour == WHITE)
        vid = -np.ones(t.n_vertices, dtype=np.int64)
        vid[whites] = np.arange(len(whites))
        G = int((wt < gap_t).sum())
        order = np.concatenate([wv[G:], wv[:G]])
        return ContourWindow(vid[order], lab[order], len(wv) - G, self.epsilon, len(whites), lab[whites],
                             np.zeros(len(whites), dtype=np.int64), None, tree=t, tree_labels=lab,
                             handles=whites)

    # explicit truncations ---------------------------------------------------
    def truncation(self, n_left: int = 0, n_right: int = 0, depth: int | None = None,
                   labelled: bool = True) -> "InfiniteMobileTruncation":
        """The stem together with the children ``s_1..s_{n_left}`` and
        ``s_{-1}..s_{-n_right}`` of ``s`` and their outgrowths.  For an
        infinite spine, ``depth`` spine generations are kept instead."""
        if self.keep_max is not None:
            raise PhaseError("truncations need an unfiltered mobile")
        if self.phase == "spine":
            self.grow_spine_to(depth or 1)
            ar, spine, last = self.stem(depth or 1)
            s = None
            n_left = n_right = 0
        else:
            ar, spine, s = self.stem()
        incr, mins = {}, {}
        for side, count in ((1, n_left), (-1, n_right)):
            if count == 0 or s is None:
                incr[side] = np.zeros(0, dtype=np.int64)
                mins[side] = None
                continue
            walks, c, got = [], 0, 0
            while got < count:
                ch = self.chunk(side, c)
                take = min(count - got, ch.size)
                sub = _forest_prefix(ch.forest, take)
                ar.add_forest(sub, s, side * (ch.start + np.arange(take)), ch.walk[:take])
                walks.append(ch.walk[:take])
                got += take
                c += 1
            w = np.concatenate(walks)
            incr[side] = side * np.diff(np.concatenate([[self.s0_label], w]))
            mins[side] = int(w.min())
        t, lab = ar.tree()
        return InfiniteMobileTruncation(
            t, lab if labelled else None, self.epsilon, np.asarray(spine, dtype=np.int64),
            self.spine_length, s, (n_right, n_left), incr, mins)


@dataclass
class ContourWindow:
    """A contiguous piece of the bi-infinite white contour.

    ``corner_vertex``/``corner_label`` list the corners in order; the root
    corner sits at ``root_pos``.  ``star`` is, for every vertex, the signed
    index ``i`` of the child ``s_i`` whose decoration holds it (0 for the
    part containing the root), and ``star_window`` the indices and labels of
    the kept children of ``s`` in contour order; ``star_vertex[k]`` is the
    vertex id of the ``k``-th of them.
    """

    corner_vertex: np.ndarray
    corner_label: np.ndarray
    root_pos: int
    epsilon: int
    n_vertices: int
    vertex_labels: np.ndarray
    star: np.ndarray
    star_window: tuple | None
    tree: PlaneTree | None = None
    tree_labels: np.ndarray | None = None
    handles: np.ndarray | None = None
    star_vertex: np.ndarray | None = None

    def to_map(self) -> PlanarMap:
        pm = phi_build_window(self.corner_vertex, self.corner_label, self.root_pos, self.epsilon,
                              self.n_vertices, self.vertex_labels)
        pm.meta["star"] = self.star
        return pm

    def star_map(self) -> PlanarMap:
        """The map built from ``s`` and its children only; vertex ``k`` of it
        is the child whose signed index is ``star_window[0][k]``."""
        if self.star_window is None:
            raise PhaseError("no vertex of infinite degree in this window")
        idx, lab = self.star_window
        root_pos = int(np.flatnonzero(idx == 0)[0])
        pm = phi_build_window(np.arange(len(idx)), lab, root_pos, self.epsilon, len(idx), lab)
        pm.meta["star_index"] = idx
        return pm



def _sign(st: RngStream) -> int:
    return 1 if st.derive(0).gen.random() < 0.5 else -1


@dataclass
class LimitBall:
    """A certified ball of the infinite map together with its window."""

    ball: PlanarMap
    radius: int
    window_map: PlanarMap
    window: ContourWindow
    mobile: LimitMobile
    chunks: tuple

    @property
    def root_label(self) -> int:
        return int(self.window_map.labels[self.window_map.root_vertex])


def limit_ball(laws: OffspringLaws, r: int, rng, filtered: bool = True, max_blocks: int = MAX_BLOCKS,
               cap: int = OUTGROWTH_CAP) -> LimitBall:
    """Certified ball of radius ``r`` around ``e-`` in the infinite map.

    The window grows until every vertex at distance ``< r`` is complete.
    With ``filtered``, blocks whose labels all exceed the root label by more
    than ``r`` are dropped: they contain no vertex of the ball, no corner of
    them can be the successor of a corner of the ball, and arcs among them
    join vertices at distance more than ``r``.
    """
    st = as_stream(rng)
    if r < 1:
        raise ValueError("radius must be at least 1")
    eps = _sign(st)
    h = 0 if eps == -1 else -1
    lm = LimitMobile(laws, st, cap=cap, keep_max=(h + r + 1) if filtered else None, max_blocks=max_blocks)
    if lm.phase == "spine":
        depth = 4
        while True:
            win = lm.spine_window(depth)
            pm = win.to_map()
            try:
                return LimitBall(pm.ball(r), r, pm, win, lm, (depth,))
            except CertificationError:
                if depth >= lm.max_depth:
                    raise
                depth *= 2
    target = h - r - 1
    counts = {1: 0, -1: 0}
    for side in (1, -1):
        low = lm.s0_label
        while low > target:
            low = min(low, lm.chunk(side, counts[side]).walk_min)
            counts[side] += 1
    while True:
        win = lm.window(counts[1], counts[-1])
        pm = win.to_map()
        try:
            return LimitBall(pm.ball(r), r, pm, win, lm, (counts[1], counts[-1]))
        except CertificationError:
            counts[1] += 1
            counts[-1] += 1


def _forest_prefix(forest: Forest, nb: int) -> Forest:
    """Sub-forest made of the trees of the first ``nb`` roots."""
    if nb >= forest.n_roots:
        return forest
    block = np.zeros(forest.size, dtype=np.int64)
    block[: forest.n_roots] = np.arange(forest.n_roots)
    gp = forest.gen_ptr
    for g in range(1, len(gp) - 1):
        sl = slice(gp[g], gp[g + 1])
        block[sl] = block[forest.parent[sl]]
    keep = block < nb
    old = np.flatnonzero(keep)
    new_of = np.cumsum(keep) - 1
    par = forest.parent[old]
    par = np.where(par >= 0, new_of[np.maximum(par, 0)], -1)
    counts = np.bincount(forest.depth()[old])
    nptr = np.concatenate([[0], np.cumsum(counts)])
    return Forest(par, forest.colour[old], forest.outdeg[old], forest.rel[old], nb, nptr)


@dataclass
class InfiniteMobileTruncation:
    """Finite piece of the infinite mobile.

    ``spine`` lists the handles of the spine vertices from the root;
    ``spine_length`` is the number of spine edges (None while the spine is
    still growing).  When a vertex of infinite degree exists its handle is
    ``infinite_vertex`` and ``window = (a, b)`` records which of its children
    ``s_{-a}..s_b`` are stored, with their label increments and the minimum
    label reached on each side.  ``labels`` is None for unlabelled samples.
    """

    tree: PlaneTree
    labels: np.ndarray | None
    epsilon: int
    spine: np.ndarray
    spine_length: int | None
    infinite_vertex: int | None
    window: tuple
    increments: dict
    min_label: dict

    @property
    def mobile(self) -> Mobile:
        if self.labels is None:
            raise PhaseError("unlabelled truncation")
        return Mobile(self.tree, self.labels, self.epsilon)


def sample_limit_tree(laws: OffspringLaws, rng, depth: int = 64, window: tuple = (0, 0),
                      cap: int = OUTGROWTH_CAP) -> InfiniteMobileTruncation:
    """Unlabelled truncation of the limit tree: the spine (grown to ``depth``
    generations if it never ends) and ``window = (a, b)`` children on the
    right and left of the vertex of infinite degree."""
    lm = LimitMobile(laws, rng, cap=cap)
    return lm.truncation(window[1], window[0], depth=depth, labelled=False)


def sample_limit_mobile(laws: OffspringLaws, rng, window: tuple = (8, 8), depth: int = 64, until=None,
                        max_children: int = 1 << 22, cap: int = OUTGROWTH_CAP) -> InfiniteMobileTruncation:
    """Labelled truncation of the infinite mobile.  With a predicate
    ``until``, both sides of the window double until it returns True."""
    lm = LimitMobile(laws, rng, cap=cap)
    a, b = window
    while True:
        tr = lm.truncation(b, a, depth=depth)
        if until is None or until(tr):
            return tr
        if max(a, b) >= max_children:
            raise CapacityError("window limit reached before the predicate held", state={"window": (a, b)})
        a, b = max(2 * a, 1), max(2 * b, 1)
        depth *= 2


# ----------------------------------------------------------------------------
# auxiliary processes


def sample_Yn(n: int, rng, size=None):
    """Generation ``n`` of the Galton-Watson process with geometric(1/2)
    offspring whose first generation has law ``P(Y_1 = i) = (i+1) 2^(-i-2)``."""
    gen = rng.gen if hasattr(rng, "gen") else rng
    m = 1 if size is None else int(size)
    y = np.ones(m, dtype=np.int64)
    for k in range(1, n + 1):
        trials = 2 * y if k == 1 else y
        pos = trials > 0
        nxt = np.zeros(m, dtype=np.int64)
        if pos.any():
            nxt[pos] = gen.negative_binomial(trials[pos], 0.5)
        y = nxt
    return int(y[0]) if size is None else y


def yn_exact(n: int) -> dict:
    """``P(Y_n = 0)`` and ``E(Y_n)`` from the generating function
    ``((n - (n-1)x) / (n + 1 - n x))^2``."""
    if n == 0:
        return {"p0": Fraction(0), "mean": Fraction(1)}
    return {"p0": Fraction(n, n + 1) ** 2, "mean": Fraction(2)}


def lr_exact(R: int, k: int) -> Fraction:
    """``P(L_R = k)``: first index ``k < R//2`` whose independent tree
    reaches generation ``R - k``, or ``R//2`` if none does."""
    h = R // 2
    if R < 1 or not 0 <= k <= h:
        raise ValueError("need R >= 1 and 0 <= k <= R//2")
    if k < h:
        return Fraction(2 * R - 2 * k + 1, (R + 1) ** 2)
    return Fraction(R - h + 1, R + 1) ** 2


def lr_product(R: int, k: int) -> Fraction:
    """The same probability as a product of extinction probabilities."""
    p0 = [yn_exact(R - j)["p0"] for j in range(R // 2 + 1)]
    out = Fraction(1)
    for j in range(k):
        out *= p0[j]
    return out if k == R // 2 else out * (1 - p0[k])


def sample_LR(R: int, rng, size=None):
    """Simulate ``L_R`` by testing independent trees in turn."""
    gen = rng.gen if hasattr(rng, "gen") else rng
    m = 1 if size is None else int(size)
    h = R // 2
    out = np.full(m, h, dtype=np.int64)
    open_ = np.ones(m, dtype=bool)
    for j in range(h):
        idx = np.flatnonzero(open_)
        if not len(idx):
            break
        alive = sample_Yn(R - j, gen, len(idx)) > 0
        out[idx[alive]] = j
        open_[idx[alive]] = False
    return int(out[0]) if size is None else out


def _first_passage(xi, gen, max_steps: int) -> int:
    """Total size of a Galton-Watson tree via its Lukasiewicz path."""
    pos, done, batch = 0, 0, 64
    while True:
        steps = np.asarray(xi.sample(gen, batch), dtype=np.int64) - 1
        walk = pos + np.cumsum(steps)
        hit = np.flatnonzero(walk <= -1)
        if len(hit):
            return done + int(hit[0]) + 1
        pos = int(walk[-1])
        done += batch
        if done >= max_steps:
            raise CapacityError(f"first passage not reached within {max_steps} steps", state={"steps": done})
        batch = min(batch * 2, 1 << 20)


def sample_decoration_size(laws: OffspringLaws, bad: bool, rng, max_steps: int = 10**8) -> int:
    """Vertex count of an ordinary decoration (a Galton-Watson tree with
    offspring ``xi``); with ``bad``, the composite ``N + sum_{i<=L}
    sum_{j<=xi~_i} N_ij`` with ``L`` geometric of parameter ``kappa``, which
    bounds the decoration containing the root."""
    gen = rng.gen if hasattr(rng, "gen") else rng
    if laws.kappa >= 1:
        raise PhaseError("decorations are a.s. finite only when kappa < 1")
    if laws.degenerate:
        return 1
    total = _first_passage(laws.xi, gen, max_steps)
    if not bad:
        return total
    L = int(gen.geometric(1 - laws.kappa)) - 1
    for _ in range(L):
        k = int(laws.xi_tilde.sample(gen))
        for _ in range(k):
            total += _first_passage(laws.xi, gen, max_steps)
    return total


# ----------------------------------------------------------------------------
# the uniform infinite plane tree


def tree_to_map(t: PlaneTree) -> PlanarMap:
    """A finite plane tree as a planar map rooted at the edge from the root to
    its first child.  Around each vertex the parent edge comes first, then
    the children left to right (this is a clockwise order; the map stores
    counterclockwise rotations, so the order is reversed)."""
    from .bdg import from_rotation

    V = t.n_vertices
    E = V - 1
    child = np.arange(1, V)
    # half-edge 2(c-1) at the parent of c, 2(c-1)+1 at c
    origin = np.empty(2 * E, dtype=np.int64)
    origin[0::2] = t.parent[child]
    origin[1::2] = child
    he_down = np.empty(V, dtype=np.int64)
    he_down[child] = 2 * (child - 1)
    seqs = []
    order_key = np.empty(2 * E, dtype=np.int64)
    # clockwise position: up-edge 0, child j at j+1
    rank = np.zeros(V, dtype=np.int64)
    cnt = np.diff(t.child_ptr)
    rank[t.child_idx] = np.arange(len(t.child_idx)) - np.repeat(t.child_ptr[:-1], cnt) + 1
    order_key[0::2] = rank[child]
    order_key[1::2] = 0
    rot = np.lexsort((-order_key, origin))
    nxt = np.empty(2 * E, dtype=np.int64)
    og = origin[rot]
    start = np.searchsorted(og, og, side="left")
    end = np.searchsorted(og, og, side="right")
    pos = np.arange(2 * E)
    n2 = np.where(pos + 1 < end, pos + 1, start)
    nxt[rot] = rot[n2]
    root = he_down[int(t.children(0)[0])] if E else 0
    return from_rotation(V, origin, nxt, root)


def kesten_tree(laws: OffspringLaws, height: int, rng) -> PlaneTree:
    """Kesten's tree for the offspring law ``xi`` cut at ``height``: a spine
    of size-biased vertices with one uniform special child each, normal
    vertices reproducing independently."""
    st = as_stream(rng)
    gen = st.gen
    xi, xih = laws.xi, laws.xi_hat
    parent, rank, depth = [np.array([-1])], [np.array([0])], 0
    special = 0
    n = 1
    normals = np.zeros(0, dtype=np.int64)
    while depth < height:
        k = int(xih.sample(gen))
        j = int(gen.integers(k))
        ks = xi.sample(gen, len(normals)) if len(normals) else np.zeros(0, dtype=np.int64)
        kids_sp = np.arange(n, n + k)
        kids_n = np.arange(n + k, n + k + int(ks.sum()))
        parent += [np.full(k, special), np.repeat(normals, ks)]
        rank += [np.arange(k), np.arange(len(kids_n))]
        n += k + len(kids_n)
        new_special = int(kids_sp[j])
        normals = np.concatenate([np.delete(kids_sp, j), kids_n])
        special = new_special
        depth += 1
    par = np.concatenate(parent)
    rk = np.concatenate(rank)
    return PlaneTree.from_parents(par, rk)


def sample_uiptree_ball(r: int, rng, method: str = "map") -> PlanarMap:
    """Ball of radius ``r`` in the uniform infinite plane tree.

    ``map``: the infinite map built from a single vertex of infinite degree
    with i.i.d. increments; ``tree``: Kesten's tree for the critical
    geometric law, as a map rooted at the root vertex.
    """
    from .weights import FaceWeights, laws_for

    if method == "map":
        return limit_ball(laws_for(FaceWeights("factorial", c=1)), r, rng).ball
    if method == "tree":
        t = kesten_tree(laws_for(FaceWeights.uniform_tree()), r, rng)
        return tree_to_map(t).ball(r)
    raise ValueError(f"unknown method {method!r}")
