"""Random walks on sampled maps, spectral-dimension fits and root degrees.

Walkers are confined to certified balls: a walker standing on a vertex whose
neighbourhood is not fully known (the boundary sphere or an incomplete
vertex) raises :class:`BallTooSmall` instead of being reflected, so return
probabilities are never biased by the truncation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .bdg import PlanarMap
from .errors import CapacityError, CertificationError, PhaseError, ToleranceError
from .rng import as_stream
from .samplers import LimitMobile, _sign, limit_ball
from .weights import OffspringLaws


class BallTooSmall(CertificationError):
    """A walker reached a vertex whose neighbourhood is not certified."""

    def __init__(self, message, excursion=None):
        super().__init__(message, suggestion="sample a ball of larger radius")
        self.excursion = excursion


# ----------------------------------------------------------------------------
# simple random walk


@dataclass
class WalkStats:
    """Return counts at even times for walkers started at one vertex.

    ``returns_at[n]`` is the number of walkers at the origin at time ``2n``.
    Statistics of independent runs merge by addition.
    """

    returns_at: np.ndarray
    walker_count: int
    steps_total: int
    origin: int = 0
    max_excursion: int = 0
    per_map: list = field(default_factory=list)

    @property
    def p_hat(self) -> np.ndarray:
        return self.returns_at / max(self.walker_count, 1)

    @property
    def stderr(self) -> np.ndarray:
        p = self.p_hat
        return np.sqrt(p * (1 - p) / max(self.walker_count, 1))

    def merge(self, other: "WalkStats") -> "WalkStats":
        n = min(len(self.returns_at), len(other.returns_at))
        return WalkStats(self.returns_at[:n] + other.returns_at[:n], self.walker_count + other.walker_count,
                         self.steps_total + other.steps_total, self.origin,
                         max(self.max_excursion, other.max_excursion), self.per_map + other.per_map)

    def to_rows(self) -> list:
        return [{"n": int(n), "p_hat": float(p), "stderr": float(s)}
                for n, (p, s) in enumerate(zip(self.p_hat, self.stderr))]


def _interior(pm: PlanarMap, origin: int) -> tuple:
    d = pm.distances_from(origin)
    radius = pm.meta.get("ball_radius")
    inner = pm.complete.copy()
    if radius is not None:
        inner &= (d >= 0) & (d < radius)
    return inner, d


def run_srw(pm: PlanarMap, steps: int, walkers: int, rng, origin: int | None = None) -> WalkStats:
    """``walkers`` independent simple random walks of ``steps`` steps from
    ``origin`` (default ``e-``).  Parallel edges weight the choice."""
    gen = as_stream(rng).gen
    o = pm.root_vertex if origin is None else int(origin)
    ptr, nb = pm.adjacency()
    deg = np.diff(ptr)
    inner, dist = _interior(pm, o)
    if pm.n_half_edges == 0:
        raise PhaseError("a map without edges has no walk")
    pos = np.full(walkers, o, dtype=np.int64)
    returns = np.zeros(steps // 2 + 1, dtype=np.int64)
    returns[0] = walkers
    far = 0
    for t in range(1, steps + 1):
        if not inner[pos].all():
            bad = pos[~inner[pos]]
            raise BallTooSmall(f"walker reached an uncertified vertex at time {t - 1} "
                               f"(distance {int(dist[bad].max())})", excursion=int(dist[bad].max()))
        u = gen.random(walkers)
        pos = nb[ptr[pos] + (u * deg[pos]).astype(np.int64)]
        if t % 2 == 0:
            returns[t // 2] = int(np.count_nonzero(pos == o))
        if t % 64 == 0 or t == steps:
            far = max(far, int(dist[pos].max()))
    return WalkStats(returns, walkers, steps * walkers, o, far)


def exact_return_prob(pm: PlanarMap, t: int, origin: int | None = None, cap: int = 12) -> Fraction:
    """Exact probability that the walk from ``origin`` is back at time ``t``."""
    if pm.n_vertices > cap:
        raise ValueError(f"exact walk probabilities are limited to {cap} vertices")
    o = pm.root_vertex if origin is None else int(origin)
    ptr, nb = pm.adjacency()
    V = pm.n_vertices
    vec = [Fraction(0)] * V
    vec[o] = Fraction(1)
    for _ in range(t):
        new = [Fraction(0)] * V
        for v in range(V):
            if vec[v]:
                d = int(ptr[v + 1] - ptr[v])
                share = vec[v] / d
                for w in nb[ptr[v]:ptr[v + 1]].tolist():
                    new[w] += share
        vec = new
    return vec[o]


@dataclass
class SpectralFit:
    """``ds_estimate = -2 * slope`` of ``log p(2n)`` against ``log n``."""

    ds_estimate: float
    stderr: float
    fit_window: tuple
    n_points: int

    def to_dict(self) -> dict:
        return {"ds_estimate": self.ds_estimate, "stderr": self.stderr,
                "fit_window": list(self.fit_window), "n_points": self.n_points}


def fit_spectral_dimension(ws, window=(2**7, 2**12), points: int = 24) -> SpectralFit:
    """Least squares of ``log p(2n)`` on ``log n`` over geometric bins.

    ``ws`` is a :class:`WalkStats` or an array of ``p(2n)`` indexed by ``n``.
    The window is cut into ``points`` bins of constant ratio and ``p`` is
    averaged within each bin, so a pure power law keeps its exact slope.
    Empty bins are dropped with a warning.
    """
    p = ws.p_hat if isinstance(ws, WalkStats) else np.asarray(ws, dtype=float)
    lo, hi = int(window[0]), int(window[1])
    if lo < 1 or hi >= len(p) or lo >= hi:
        raise ValueError(f"fit window {window} outside the collected range 1..{len(p) - 1}")
    edges = np.unique(np.round(np.geomspace(lo, hi + 1, points + 1)).astype(np.int64))
    cs = np.concatenate([[0.0], np.cumsum(p)])
    y = (cs[edges[1:]] - cs[edges[:-1]]) / np.diff(edges)
    x = 0.5 * (np.log(edges[1:] - 1) + np.log(edges[:-1]))
    ok = y > 0
    if not ok.all():
        warnings.warn(f"{int((~ok).sum())} empty bins dropped from the spectral fit", stacklevel=2)
    x, y = x[ok], y[ok]
    if len(x) < 2:
        raise ToleranceError("fewer than two non-empty bins in the fit window")
    ly = np.log(y)
    if len(x) == 2:
        slope = (ly[1] - ly[0]) / (x[1] - x[0])
        return SpectralFit(float(-2 * slope), float("nan"), (lo, hi), 2)
    res = stats.linregress(x, ly)
    return SpectralFit(float(-2 * res.slope), float(2 * res.stderr), (lo, hi), len(x))


@dataclass
class SpectralEnsemble:
    """Pooled return statistics of many maps with a pooled fit and the
    spread of per-map fits."""

    pooled: WalkStats
    fit: SpectralFit
    per_map_ds: np.ndarray
    ball_sizes: np.ndarray
    radii: np.ndarray
    regrown: int
    redrawn: int = 0

    @property
    def dispersion(self) -> float:
        return float(np.std(self.per_map_ds, ddof=1)) if len(self.per_map_ds) > 1 else float("nan")

    def to_dict(self) -> dict:
        return {"fit": self.fit.to_dict(), "maps": int(len(self.ball_sizes)),
                "walkers_per_map": int(self.pooled.walker_count // max(len(self.ball_sizes), 1)),
                "per_map_ds_mean": float(np.mean(self.per_map_ds)), "per_map_ds_sd": self.dispersion,
                "min_ball": int(self.ball_sizes.min()), "median_ball": float(np.median(self.ball_sizes)),
                "radii": sorted(set(int(r) for r in self.radii)), "regrown": self.regrown,
                "redrawn": self.redrawn}


def walk_ball(laws: OffspringLaws, rng, min_vertices: int = 10**4, r0: int = 32, r_max: int = 1 << 12):
    """Certified ball of the infinite map with at least ``min_vertices``
    vertices; the radius doubles from ``r0``."""
    st = as_stream(rng)
    r = r0
    while True:
        lb = limit_ball(laws, r, st.derive(0))
        if lb.ball.n_vertices >= min_vertices or r >= r_max:
            return lb.ball, r
        r *= 2


def spectral_map(laws: OffspringLaws, seed: int, k: int, walkers: int, window=(2**7, 2**12),
                 min_vertices: int = 10**4, points: int = 24, max_redraws: int = 5) -> dict:
    """Walks on map ``k`` of an ensemble.  A ball that a walker outgrows is
    replaced by the ball of twice the radius of the same sample.  A sample
    whose window hits the capacity cap is redrawn from a fresh stream, at
    most ``max_redraws`` times; the count is reported."""
    from .rng import RngStream

    base = RngStream(seed, 7).derive(k)
    steps = 2 * int(window[1])
    for attempt in range(max_redraws + 1):
        st = base if attempt == 0 else base.derive(1000 + attempt)
        r0, regrown = 32, 0
        try:
            while True:
                ball, r = walk_ball(laws, st.derive(0), min_vertices, r0)
                try:
                    ws = run_srw(ball, steps, walkers, st.derive(1))
                    break
                except BallTooSmall:
                    regrown += 1
                    r0 = 2 * r
        except CapacityError:
            if attempt == max_redraws:
                raise
            continue
        break
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ds = fit_spectral_dimension(ws, window, points).ds_estimate
    return {"stats": ws, "ds": ds, "size": ball.n_vertices, "radius": r, "regrown": regrown,
            "redrawn": attempt}


def spectral_ensemble(laws: OffspringLaws, maps: int, walkers: int, seed: int,
                      window=(2**7, 2**12), min_vertices: int = 10**4, points: int = 24,
                      results=None) -> SpectralEnsemble:
    """Run ``walkers`` walks of ``2 * window[1]`` steps on each of ``maps``
    independent certified balls and fit the pooled return probabilities.
    Precomputed per-map results (from :func:`spectral_map`) may be passed."""
    if results is None:
        results = [spectral_map(laws, seed, k, walkers, window, min_vertices, points) for k in range(maps)]
    pooled = results[0]["stats"]
    for res in results[1:]:
        pooled = pooled.merge(res["stats"])
    fit = fit_spectral_dimension(pooled, window, points)
    return SpectralEnsemble(pooled, fit, np.array([r["ds"] for r in results]),
                            np.array([r["size"] for r in results]), np.array([r["radius"] for r in results]),
                            sum(r["regrown"] for r in results), sum(r.get("redrawn", 0) for r in results))


# ----------------------------------------------------------------------------
# the degree bound law


def last_increment_law(r: int) -> dict:
    """For a uniform bridge of length ``r + 1``: exact probabilities that
    the last increment is ``-1``, ``0`` and ``>= 1``."""
    if r < 1:
        return {"minus": Fraction(0), "zero": Fraction(1), "plus": Fraction(0)}
    return {"minus": Fraction(r, 2 * r + 1), "zero": Fraction(r + 1, 2 * (2 * r + 1)),
            "plus": Fraction(r + 1, 2 * (2 * r + 1))}


@dataclass
class DegreeBoundLaw:
    """Parameters of ``zeta' + sum_{j <= 2 + G_1 + G_2} (1 + zeta_j)`` with
    ``zeta ~ Geom(p)``, ``zeta' ~ Geom(p')`` on {1, 2, ...} and ``G_i``
    geometric of parameter ``pi_0`` on {0, 1, ...}.  ``p_err`` bounds the
    truncation error of both series."""

    p: float
    p_prime: float
    pi0: float
    p_err: float

    @property
    def mean(self) -> float:
        K = 2 + 2 * (1 - self.pi0) / self.pi0
        return 1 / self.p_prime + K * (1 + 1 / self.p)

    def pmf(self, kmax: int) -> np.ndarray:
        """Exact law on ``0..kmax`` (floating point)."""
        p, pp, q0 = self.p, self.p_prime, self.pi0
        ks = np.arange(kmax + 1)
        # K - 2 = G_1 + G_2 is negative binomial (2, pi_0)
        kk = np.arange(0, kmax // 2 + 1)
        pk = stats.nbinom.pmf(kk, 2, q0)
        s = np.zeros(kmax + 1)
        for m, w in zip(kk.tolist(), pk.tolist()):
            K = m + 2
            if 2 * K > kmax or w == 0:
                continue
            # sum of K terms 1 + zeta_j equals 2K + NB(K, p)
            s[2 * K:] += w * stats.nbinom.pmf(ks[: kmax + 1 - 2 * K], K, p)
        zp = stats.geom.pmf(ks, pp)
        return np.convolve(s, zp)[: kmax + 1]

    def survival(self, kmax: int) -> np.ndarray:
        """``P(B > k)`` for ``k = 0..kmax``."""
        return np.clip(1 - np.cumsum(self.pmf(kmax)), 0.0, 1.0)

    def to_dict(self) -> dict:
        return {"p": self.p, "p_prime": self.p_prime, "pi0": self.pi0, "p_err": self.p_err, "mean": self.mean}


def degree_bound_law(laws: OffspringLaws) -> DegreeBoundLaw:
    if laws.pi0 >= 1:
        raise PhaseError("pi_0 = 1: the map is the uniform infinite plane tree and the bound does not apply")
    N = laws.xi_black.table_size
    r = np.arange(N + 1)
    w = laws.xi_black.probs(N)
    plus = np.where(r >= 1, (r + 1) / (2 * (2 * r + 1)), 0.0)
    minus = np.where(r >= 1, r / (2 * r + 1), 0.0)
    tail = laws.xi_black.tail(N)
    scale = 1 - laws.pi0
    p = scale * float(np.dot(w, plus))
    pp = scale * float(np.dot(w, minus))
    return DegreeBoundLaw(p, pp, laws.pi0, scale * tail)


def sample_degree_bound(dbl: DegreeBoundLaw, rng, size=None):
    gen = as_stream(rng).gen
    m = 1 if size is None else int(size)
    K = 2 + gen.geometric(dbl.pi0, m) - 1 + gen.geometric(dbl.pi0, m) - 1
    out = gen.geometric(dbl.p_prime, m) + 2 * K + gen.negative_binomial(K, dbl.p)
    return int(out[0]) if size is None else out.astype(np.int64)


# ----------------------------------------------------------------------------
# root degrees of the infinite map


def root_degree(laws: OffspringLaws, rng, max_blocks: int = 1 << 26):
    """Degree of ``e-`` in the infinite map, or None when the contour
    exploration needs more than ``max_blocks`` children of ``s`` on a side.

    The degree is the number of corners of the vertex plus, for each of
    them, the number of corners with label one higher lying between it and
    the previous corner of label at most its own.  Only blocks reaching
    that level are stored.  Draws coincide with :func:`limit_ball` for the
    same stream.
    """
    st = as_stream(rng)
    eps = _sign(st)
    h = 0 if eps == -1 else -1
    if laws.kappa_tilde >= 1 and not laws.degenerate:
        b = limit_ball(laws, 1, st)
        return b.ball.degree(b.ball.root_vertex)
    lm = LimitMobile(laws, st, keep_max=h + 1, max_blocks=max_blocks)
    nl = nr = 0
    while True:
        try:
            win = lm.window(nl, nr)
        except CapacityError:
            return None
        lab, cv, rp = win.corner_label, win.corner_vertex, win.root_pos
        if eps == -1:
            v = cv[rp]
        else:
            f = np.flatnonzero(lab[rp + 1:] == -1)
            if not len(f):
                nl += 1
                continue
            v = cv[rp + 1 + f[0]]
        cs = np.flatnonzero(cv == v)
        low = np.flatnonzero(lab[: cs[0]] <= h)
        if not len(low):
            nr += 1
            continue
        edges = [low[-1]] + cs.tolist()
        incoming = 0
        for a, b in zip(edges[:-1], edges[1:]):
            seg = lab[a + 1:b]
            below = np.flatnonzero(seg <= h)
            start = below[-1] + 1 if len(below) else 0
            incoming += int(np.count_nonzero(seg[start:] == h + 1))
        return len(cs) + incoming


def root_degree_samples(laws: OffspringLaws, n: int, seed: int, stream: int = 0,
                        max_blocks: int = 1 << 26) -> np.ndarray:
    """Root degrees for ``n`` independent streams; unresolved samples are -1."""
    from .rng import RngStream

    out = np.empty(n, dtype=np.int64)
    base = RngStream(seed, stream)
    for i in range(n):
        d = root_degree(laws, base.derive(i), max_blocks)
        out[i] = -1 if d is None else d
    return out


def dkw_epsilon(n: int, alpha: float = 0.01) -> float:
    """One-sided Dvoretzky-Kiefer-Wolfowitz-Massart band half-width."""
    return math.sqrt(math.log(1 / alpha) / (2 * n))


def empirical_survival(samples: np.ndarray, kmax: int) -> np.ndarray:
    """``P(D > k)`` for ``k = 0..kmax``; entries -1 count as infinite."""
    s = np.asarray(samples)
    inf = s < 0
    fin = s[~inf]
    counts = np.bincount(np.minimum(fin, kmax + 1), minlength=kmax + 2)
    le = np.cumsum(counts)[: kmax + 1]
    return 1 - le / len(s)


def dominance_test(samples: np.ndarray, dbl: DegreeBoundLaw, alpha: float = 0.01) -> dict:
    """One-sided check that the empirical survival of ``samples`` stays below
    the survival of the bound law plus the DKW band."""
    s = np.asarray(samples)
    fin = s[s >= 0]
    kmax = int(max(fin.max() if len(fin) else 0, 10)) + 1
    emp = empirical_survival(s, kmax)
    bound = dbl.survival(kmax)
    eps = dkw_epsilon(len(s), alpha)
    excess = emp - bound
    k_worst = int(np.argmax(excess))
    return {"n": int(len(s)), "unresolved": int((s < 0).sum()), "band": eps,
            "max_excess": float(excess[k_worst]), "k_at_max": k_worst,
            "passed": bool(excess.max() <= eps + dbl.p_err)}


def survival_slope(samples: np.ndarray, min_count: int = 10) -> float:
    """Slope of ``log P(D > k)`` in ``k`` over the range with at least
    ``min_count`` samples beyond ``k``."""
    s = np.asarray(samples)
    fin = s[s >= 0]
    kmax = int(fin.max()) if len(fin) else 0
    surv = empirical_survival(s, kmax)
    ok = surv * len(s) >= min_count
    ks = np.flatnonzero(ok)
    if len(ks) < 3:
        raise ToleranceError("too few points for a tail fit")
    return float(stats.linregress(ks, np.log(surv[ks])).slope)
