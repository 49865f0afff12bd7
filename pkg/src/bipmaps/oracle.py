"""Exhaustive exact ground truth for small sizes.

Everything here is brute force in exact rational arithmetic: plane trees by
Lukasiewicz words, mobiles by bridge products, maps by enumerating every
rotation system on ``2n`` half-edges and keeping the planar, connected,
bipartite ones.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod

import numpy as np

from .bdg import PlanarMap, from_rotation, phi_build
from .errors import CapacityError, EmptySupportError, StructuralError
from .labels import all_labelings, count_labelings
from .psi import psi_forward
from .trees import BLACK, WHITE, PlaneTree
from .weights import FaceWeights, TreeWeights, derive_tree_weights

TREE_CAP = 7
MOBILE_CAP = 5
MAP_CAP = 4


@dataclass
class ExactDistribution:
    """Finitely supported law with exact rational masses."""

    probs: dict

    def __post_init__(self):
        total = sum(self.probs.values(), Fraction(0))
        if self.probs and total != 1:
            raise StructuralError(f"masses sum to {total}, not 1")

    @property
    def support(self) -> list:
        return sorted(self.probs, key=repr)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, key):
        return self.probs.get(key, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, ExactDistribution):
            return NotImplemented
        keys = set(self.probs) | set(other.probs)
        return all(self[k] == other[k] for k in keys)

    @classmethod
    def from_weights(cls, weights: dict) -> "ExactDistribution":
        total = sum(weights.values(), Fraction(0))
        if total == 0:
            raise EmptySupportError("all configurations have weight zero")
        return cls({k: Fraction(v) / total for k, v in weights.items() if v != 0})


def _check_cap(n, cap, what):
    if n > cap:
        raise CapacityError(f"exhaustive {what} enumeration is capped at n={cap} (asked {n})")


def lukasiewicz_words(n: int):
    """Preorder outdegree sequences of all plane trees with ``n`` edges."""
    V = n + 1

    def rec(prefix, need):
        # need = number of vertices still required to close the tree
        left = V - len(prefix)
        if left == 0:
            if need == 0:
                yield tuple(prefix)
            return
        for d in range(0, left):
            nn = need - 1 + d
            if nn < 0 or nn > left - 1 or (nn == 0 and left > 1):
                continue
            prefix.append(d)
            yield from rec(prefix, nn)
            prefix.pop()

    yield from rec([], 1)


def enumerate_trees(n: int, cap: int = TREE_CAP) -> list:
    _check_cap(n, cap, "tree")
    if n == 0:
        return [PlaneTree.single_vertex()]
    return [PlaneTree.from_outdegrees(w) for w in lukasiewicz_words(n)]


def enumerate_mobiles(n: int, cap: int = MOBILE_CAP, epsilons=(1,)) -> list:
    """All mobiles with ``n`` edges, root label 0 (times the given signs)."""
    _check_cap(n, cap, "mobile")
    out = []
    for t in enumerate_trees(n, cap=max(cap, TREE_CAP)):
        out.extend(all_labelings(t, 0, epsilons))
    return out


# ----------------------------------------------------------------------------
# maps by brute force over rotation systems


def _cycles(perm):
    n = len(perm)
    seen = [False] * n
    cyc = []
    for s in range(n):
        if seen[s]:
            continue
        c = []
        h = s
        while not seen[h]:
            seen[h] = True
            c.append(h)
            h = perm[h]
        cyc.append(c)
    return cyc


def enumerate_rooted_maps(n: int, cap: int = MAP_CAP, bipartite: bool = True) -> list:
    """Every rooted planar map with ``n`` edges (root half-edge 0), one per
    isomorphism class.  Brute force over all (2n)! rotation permutations."""
    _check_cap(n, cap, "map")
    H = 2 * n
    seen = {}
    for perm in itertools.permutations(range(H)):
        vcyc = _cycles(perm)
        V = len(vcyc)
        face = [perm[h ^ 1] for h in range(H)]
        F = len(_cycles(face))
        if V - n + F != 2:
            continue
        origin = [0] * H
        for k, c in enumerate(vcyc):
            for h in c:
                origin[h] = k
        pm = from_rotation(V, origin, perm, root=0)
        # a sphere plus a torus component also has characteristic 2
        if np.any(pm.distances_from(0) < 0):
            continue
        if bipartite and np.any(pm.face_degrees() % 2):
            continue
        code = pm.canonical_code()
        if code not in seen:
            seen[code] = pm
    return list(seen.values())


def enumerate_pointed_maps(n: int, cap: int = MAP_CAP) -> list:
    """Rooted pointed bipartite maps with ``n`` edges."""
    out = {}
    for pm in enumerate_rooted_maps(n, cap):
        for v in range(pm.n_vertices):
            q = PlanarMap(pm.n_vertices, pm.origin, pm.rot_order, pm.root, v)
            out.setdefault(q.canonical_code(), q)
    return list(out.values())


def map_weight(pm: PlanarMap, fw: FaceWeights):
    """Product over faces of ``q_{deg/2}`` (exact when the weights are)."""
    return prod((fw.q(int(d) // 2) for d in pm.face_degrees()), start=Fraction(1))


# ----------------------------------------------------------------------------
# exact laws


def tree_weight(t: PlaneTree, tw: TreeWeights):
    """Simply generated weight: product over all vertices of ``w_outdeg``."""
    return prod((tw.w(int(d)) for d in t.outdeg), start=Fraction(1))


def mobile_tree_weight(t: PlaneTree, tw: TreeWeights):
    """Product over black vertices of ``w_deg``."""
    blacks = np.flatnonzero(t.colour == BLACK)
    return prod((tw.w(int(t.outdeg[b]) + 1) for b in blacks), start=Fraction(1))


def exact_nu_n(tw: TreeWeights, n: int) -> ExactDistribution:
    return ExactDistribution.from_weights({t.key(): tree_weight(t, tw) for t in enumerate_trees(n)})


def exact_tilde_nu_n(tw: TreeWeights, n: int) -> ExactDistribution:
    ws = {}
    for t in enumerate_trees(n):
        if t.colour[0] != WHITE:
            continue
        ws[t.key()] = mobile_tree_weight(t, tw)
    return ExactDistribution.from_weights(ws)


def exact_nu_pushforward(tw: TreeWeights, n: int):
    """Push the simply generated law through the tree bijection and compare
    with the mobile-tree law.  Returns ``(pushforward, direct)``; raises if
    they differ."""
    nu = exact_nu_n(tw, n)
    trees = {t.key(): t for t in enumerate_trees(n)}
    push = {}
    for key, p in nu.probs.items():
        img, _ = psi_forward(trees[key])
        push[img.key()] = push.get(img.key(), Fraction(0)) + p
    pushed = ExactDistribution(push)
    direct = exact_tilde_nu_n(tw, n)
    if pushed != direct:
        raise StructuralError("pushforward of the simply generated law differs from the mobile-tree law")
    return pushed, direct


def exact_mu_n_direct(fw: FaceWeights, n: int) -> ExactDistribution:
    return ExactDistribution.from_weights({pm.canonical_code(): map_weight(pm, fw)
                                           for pm in enumerate_pointed_maps(n)})


def exact_mu_n_pipeline(fw: FaceWeights, n: int) -> ExactDistribution:
    """Law of the map built from (tree, uniform labels, uniform sign)."""
    tw = derive_tree_weights(fw)
    tnu = exact_tilde_nu_n(tw, n)
    trees = {t.key(): t for t in enumerate_trees(n)}
    out = {}
    for key, p in tnu.probs.items():
        t = trees[key]
        mass = p / (2 * count_labelings(t))
        for m in all_labelings(t, 0, (1, -1)):
            code = phi_build(m).canonical_code()
            out[code] = out.get(code, Fraction(0)) + mass
    return ExactDistribution(out)


def exact_mu_n(fw: FaceWeights, n: int) -> ExactDistribution:
    """Exact map law, computed from the face weights directly and through the
    mobile pipeline; the two must agree exactly."""
    direct = exact_mu_n_direct(fw, n)
    pipe = exact_mu_n_pipeline(fw, n)
    if direct != pipe:
        raise StructuralError(f"map law mismatch at n={n}")
    return direct


# ----------------------------------------------------------------------------
# brute-force label counting


def enumerate_alternating_trees(max_black: int, max_black_degree: int):
    """Alternating trees (white root) with at most ``max_black`` black
    vertices, each of degree at most ``max_black_degree``.

    A tree is generated from its preorder: white vertices choose how many
    black children they have, black vertices how many white children.
    """
    out = []

    def build(seq):
        t = PlaneTree.from_outdegrees(seq)
        out.append(t)

    def rec(seq, stack_types, pending, blacks):
        # pending: list of (type, remaining children) on the DFS stack
        if not pending:
            build(seq)
            return
        typ = pending[-1]
        # place the next vertex, a child of the stack top, with colour opposite to it
        child_type = 1 - typ[0]
        rest = pending[:-1] + ([(typ[0], typ[1] - 1)] if typ[1] > 1 else [])
        if child_type == BLACK:
            if blacks >= max_black:
                return
            for d in range(0, max_black_degree):
                new = rest + ([(BLACK, d)] if d else [])
                rec(seq + [d], stack_types, new, blacks + 1)
        else:
            for d in range(0, max_black - blacks + 1):
                new = rest + ([(WHITE, d)] if d else [])
                rec(seq + [d], stack_types, new, blacks)

    for d in range(0, max_black + 1):
        rec([d], None, [(WHITE, d)] if d else [], 0)
    # keep trees whose total black count is within the bound
    return [t for t in out if int((t.colour == BLACK).sum()) <= max_black]


def brute_force_label_count(t: PlaneTree) -> int:
    """Number of labellings (root label 0) obeying the clockwise rule, by
    exhaustive search over a box that contains every valid labelling.

    Around a black vertex of degree ``r`` every label is within ``r - 1`` of
    its parent's, so each white child ranges over that window; partial
    assignments are extended black vertex by black vertex and filtered by the
    rule.
    """
    colour = t.colour
    whites = np.flatnonzero(colour == WHITE)
    col = -np.ones(t.n_vertices, dtype=np.int64)
    col[whites] = np.arange(len(whites))
    rows = np.zeros((1, len(whites)), dtype=np.int64)
    for g in t.generations[1::2]:
        for b in g.tolist():
            ch = t.children(b)
            r = len(ch) + 1
            if r == 1:
                continue
            p = col[int(t.parent[b])]
            box = np.array(list(itertools.product(range(-(r - 1), r), repeat=r - 1)), dtype=np.int64)
            # all rows x all box offsets
            new = np.repeat(rows, len(box), axis=0)
            offs = np.tile(box, (len(rows), 1))
            base = new[:, p][:, None]
            new[:, col[ch]] = base + offs
            seq = np.concatenate([base, new[:, col[ch]], base], axis=1)
            ok = np.all(np.diff(seq, axis=1) >= -1, axis=1)
            rows = new[ok]
    return len(rows)


# ----------------------------------------------------------------------------
# exact verification suites


@dataclass
class SuiteReport:
    name: str
    checked: int
    violations: list
    details: dict

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"suite": self.name, "ok": self.ok, "checked": self.checked,
                "violations": [repr(v) for v in self.violations[:20]], "details": self.details}


def bijection_suite(max_n: int = 5) -> SuiteReport:
    """Tree bijection and map construction on every object up to ``max_n`` edges.

    For the tree bijection: the image of every tree is alternating, inverts
    back, images are pairwise distinct and cover all trees, black degrees
    equal outdegrees and white degrees equal block lengths.  For the map
    construction: every labelled mobile and sign give a planar bipartite map
    with the right numbers of edges, faces and vertices, face degrees twice
    the black degrees, and distances to the marked vertex read off the labels.
    """
    from .bdg import map_checks
    from .psi import psi_inverse

    bad, checked, per_n = [], 0, {}
    for n in range(1, max_n + 1):
        trees = enumerate_trees(n)
        keys = {t.key() for t in trees}
        images = set()
        for t in trees:
            img, tr = psi_forward(t)
            checked += 1
            if img.key() in images:
                bad.append(("psi_not_injective", n, t.key()))
            images.add(img.key())
            if psi_inverse(img).key() != t.key():
                bad.append(("psi_inverse", n, t.key()))
            deg = img.degree()
            vm = tr.vertex_map
            for v in range(t.n_vertices):
                want = tr.eta[v] if t.outdeg[v] == 0 else int(t.outdeg[v])
                if deg[vm[v]] != want:
                    bad.append(("degree_transfer", n, t.key(), v))
        if images != keys:
            bad.append(("psi_not_onto", n))
        maps = 0
        for t in trees:
            for m in all_labelings(t, 0, (1, -1)):
                rep = map_checks(phi_build(m), m)
                maps += 1
                if not rep.ok:
                    bad.append(("map", n, m.key(), rep.violations))
        checked += maps
        per_n[n] = {"trees": len(trees), "mobiles_with_sign": maps}
    return SuiteReport("bijection", checked, bad, per_n)


def measure_suite(max_n: int = 4) -> SuiteReport:
    """Exact agreement of the map law computed directly from face weights and
    through the mobile pipeline, and of the tree-law pushforward, for the
    all-ones tree weights and for faces of degree four only."""
    fams = {"uniform": FaceWeights.uniform_tree(), "bimodal": FaceWeights.bimodal()}
    bad, checked, details = [], 0, {}
    for name, fw in fams.items():
        tw = derive_tree_weights(fw)
        for n in range(1, max_n + 1):
            try:
                direct = exact_mu_n_direct(fw, n)
            except EmptySupportError:
                direct = None
            try:
                pipe = exact_mu_n_pipeline(fw, n)
            except EmptySupportError:
                pipe = None
            checked += 1
            if (direct is None) != (pipe is None) or (direct is not None and direct != pipe):
                bad.append(("map_law", name, n))
            try:
                exact_nu_pushforward(tw, n)
            except EmptySupportError:
                pass
            except StructuralError as exc:
                bad.append(("pushforward", name, n, str(exc)))
            checked += 1
            details[f"{name}/{n}"] = 0 if direct is None else len(direct)
    return SuiteReport("measure", checked, bad, details)


def counting_suite(max_r: int = 8, max_black: int = 5, max_degree: int = 3) -> SuiteReport:
    """Bridge counts against enumeration, and the product formula for the
    number of labellings against exhaustive search."""
    from math import comb

    from .labels import enumerate_bridges

    bad, checked = [], 0
    for r in range(1, max_r + 1):
        got = len(enumerate_bridges(r))
        checked += 1
        if got != comb(2 * r - 1, r - 1):
            bad.append(("bridges", r, got))
    trees = enumerate_alternating_trees(max_black, max_degree)
    for t in trees:
        checked += 1
        if count_labelings(t) != brute_force_label_count(t):
            bad.append(("labels", t.key()))
    return SuiteReport("counting", checked, bad, {"trees": len(trees), "max_r": max_r})


SUITES = {"bijection": bijection_suite, "measure": measure_suite, "counting": counting_suite}
