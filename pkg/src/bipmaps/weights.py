"""Face weights, tree weights, generating-function constants and offspring laws.

A face of degree ``2i`` carries weight ``q_i``.  The associated tree weights
are ``w_0 = 1`` and ``w_i = C(2i-1, i-1) q_i``.  From the power series
``g(z) = sum_i w_i z^i`` one gets the radius ``R``, the limit ``gamma`` of
``t g'(t) / g(t)`` as ``t -> R``, the tilt ``tau`` and the offspring law
``pi_i = tau^i w_i / g(tau)`` together with its derived laws.

Four families are built in:

``explicit``
    finitely many nonzero ``q_i`` (radius infinite).
``power_law``
    ``w_i = c i^(-beta)`` for ``i >= 1`` (radius 1).
``geometric``
    ``w_i = a b^i`` for ``i >= 1`` (radius ``1/b``); ``a = b = 1`` gives ``w = 1``.
``factorial``
    ``w_i = c i!`` for ``i >= 1`` (radius 0, the degenerate regime).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb

import mpmath
import numpy as np

from .errors import CapacityError, ConfigError, PhaseError, ToleranceError

INFINITE = -1
"""Sentinel used in integer arrays for an infinite degree."""

INDEX_CAP = 10**6
FAMILIES = ("explicit", "power_law", "geometric", "factorial")


def _exact(x):
    """Parse a config number into an exact Fraction (decimal strings stay decimal)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ConfigError("boolean is not a weight")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ConfigError(f"non-finite weight {x}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise ConfigError(f"cannot parse number {x!r}") from exc
    raise ConfigError(f"cannot parse number {x!r}")


def face_to_tree_factor(i: int) -> int:
    """Number of zero-sum sequences of ``i`` integers >= -1, i.e. C(2i-1, i-1)."""
    if i < 1:
        raise ValueError("index must be >= 1")
    return comb(2 * i - 1, i - 1)


class FaceWeights:
    """A face-weight sequence ``(q_i)`` together with its family description."""

    def __init__(self, family: str, **params):
        if family not in FAMILIES:
            raise ConfigError(f"unknown weight family {family!r}", "/family")
        self.family = family
        self.params = {}
        if family == "explicit":
            raw = params.get("q")
            if not isinstance(raw, dict) or not raw:
                raise ConfigError("explicit family needs a non-empty map q", "/q")
            q = {}
            for k, v in raw.items():
                try:
                    i = int(k)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"face index {k!r} is not an integer", f"/q/{k}") from exc
                if i < 1:
                    raise ConfigError("face indices start at 1", f"/q/{k}")
                val = _exact(v)
                if val < 0:
                    raise ConfigError("weights must be non-negative", f"/q/{k}")
                if val > 0:
                    q[i] = val
            if not any(i >= 2 for i in q):
                raise ConfigError("need some q_i > 0 with i >= 2", "/q")
            self.params["q"] = dict(sorted(q.items()))
        elif family == "power_law":
            c, beta = params.get("c"), params.get("beta")
            if c is None or beta is None:
                raise ConfigError("power_law needs c and beta", "/c" if c is None else "/beta")
            self.params["c"] = _exact(c)
            self.params["beta"] = _exact(beta)
            if self.params["c"] <= 0:
                raise ConfigError("c must be positive", "/c")
            if self.params["beta"] <= 1:
                raise ConfigError("beta must exceed 1", "/beta")
        elif family == "geometric":
            a, b = params.get("a", 1), params.get("b", 1)
            self.params["a"] = _exact(a)
            self.params["b"] = _exact(b)
            if self.params["a"] <= 0:
                raise ConfigError("a must be positive", "/a")
            if self.params["b"] <= 0:
                raise ConfigError("b must be positive", "/b")
        else:
            c = params.get("c", 1)
            self.params["c"] = _exact(c)
            if self.params["c"] <= 0:
                raise ConfigError("c must be positive", "/c")

    # constructors -----------------------------------------------------
    @classmethod
    def from_config(cls, cfg: dict) -> "FaceWeights":
        if not isinstance(cfg, dict) or "family" not in cfg:
            raise ConfigError("weight config must be an object with a 'family' key", "/family")
        params = {k: v for k, v in cfg.items() if k != "family"}
        return cls(cfg["family"], **params)

    @classmethod
    def uniform_tree(cls) -> "FaceWeights":
        """Tree weights identically one."""
        return cls("geometric", a=1, b=1)

    @classmethod
    def bimodal(cls, w2=1) -> "FaceWeights":
        """Only faces of degree 4, with tree weight ``w_2 = w2``."""
        return cls("explicit", q={2: _exact(w2) / 3})

    def to_config(self) -> dict:
        out = {"family": self.family}
        for k, v in self.params.items():
            if k == "q":
                out["q"] = {str(i): str(x) for i, x in v.items()}
            else:
                out[k] = str(v)
        return out

    def __repr__(self):
        return f"FaceWeights({self.to_config()})"

    def __eq__(self, other):
        return isinstance(other, FaceWeights) and self.to_config() == other.to_config()

    def __hash__(self):
        return hash(repr(self.to_config()))

    # values -----------------------------------------------------------
    @property
    def declared_radius(self) -> float:
        if self.family == "explicit":
            return math.inf
        if self.family == "power_law":
            return 1.0
        if self.family == "geometric":
            return 1.0 / float(self.params["b"])
        return 0.0

    @property
    def max_support(self):
        """Largest index with nonzero weight, or None for infinite support."""
        if self.family == "explicit":
            return max(self.params["q"])
        return None

    def q(self, i: int):
        if i < 1:
            raise ValueError("face weights are indexed from 1")
        if self.family == "explicit":
            return self.params["q"].get(i, Fraction(0))
        return self._w_nonexplicit(i) / face_to_tree_factor(i)

    def _w_nonexplicit(self, i: int):
        p = self.params
        if self.family == "power_law":
            beta = p["beta"]
            if beta.denominator == 1:
                return p["c"] / Fraction(i) ** int(beta)
            return float(p["c"]) * float(i) ** (-float(beta))
        if self.family == "geometric":
            return p["a"] * p["b"] ** i
        return p["c"] * math.factorial(i)


class TreeWeights:
    """Tree weights ``w_i`` derived from face weights; extended lazily."""

    def __init__(self, fw: FaceWeights, index_cap: int = INDEX_CAP):
        self.fw = fw
        self.index_cap = index_cap
        self._cache = {0: Fraction(1)}

    def w(self, i: int):
        """Exact weight (Fraction) when the family allows it, float otherwise."""
        if i < 0:
            raise ValueError("negative index")
        if i > self.index_cap:
            raise CapacityError(f"weight index {i} beyond cap {self.index_cap}")
        got = self._cache.get(i)
        if got is None:
            if self.fw.family == "explicit":
                got = face_to_tree_factor(i) * self.fw.q(i)
            else:
                got = self.fw._w_nonexplicit(i)
            if len(self._cache) < 4096:
                self._cache[i] = got
        return got

    def w_float(self, idx) -> np.ndarray:
        """Vectorised floating-point weights."""
        idx = np.asarray(idx, dtype=np.int64)
        fw = self.fw
        out = np.zeros(idx.shape, dtype=float)
        pos = idx >= 1
        out[idx == 0] = 1.0
        if fw.family == "explicit":
            for i, qi in fw.params["q"].items():
                out[idx == i] = float(face_to_tree_factor(i) * qi)
        elif fw.family == "power_law":
            c, beta = float(fw.params["c"]), float(fw.params["beta"])
            out[pos] = c * idx[pos].astype(float) ** (-beta)
        elif fw.family == "geometric":
            a, b = float(fw.params["a"]), float(fw.params["b"])
            out[pos] = a * np.exp(idx[pos] * math.log(b))
        else:
            c = float(fw.params["c"])
            from scipy.special import gammaln

            out[pos] = c * np.exp(gammaln(idx[pos] + 1.0))
        return out

    @property
    def support_gcd(self) -> int:
        """gcd of the positive indices with nonzero weight."""
        if self.fw.family == "explicit":
            return math.gcd(*self.fw.params["q"].keys())
        return 1

    def exact_weights(self, n: int) -> list:
        """Exact weights w_0..w_n, converting float weights to exact binary fractions."""
        out = []
        for i in range(n + 1):
            v = self.w(i)
            out.append(v if isinstance(v, Fraction) else Fraction(v))
        return out


def derive_tree_weights(fw: FaceWeights, index_cap: int = INDEX_CAP) -> TreeWeights:
    return TreeWeights(fw, index_cap)


@dataclass(frozen=True)
class GenFnAnalysis:
    radius: float
    gamma: float
    tau: float
    g_of_tau: float
    kappa: float
    iterations: int = 0
    residual: float = 0.0


def _g_and_tgp(fw: FaceWeights, t: float):
    """Return (g(t), t g'(t)) for 0 <= t < R (t = R allowed when finite)."""
    f = fw.family
    if f == "explicit":
        g, tg = 1.0, 0.0
        for i, qi in fw.params["q"].items():
            wi = float(face_to_tree_factor(i) * qi)
            term = wi * t**i
            g += term
            tg += i * term
        return g, tg
    if f == "power_law":
        c, beta = float(fw.params["c"]), float(fw.params["beta"])
        if t == 0:
            return 1.0, 0.0
        if t >= 1.0:
            z0 = float(mpmath.zeta(beta))
            z1 = float(mpmath.zeta(beta - 1)) if beta > 2 else math.inf
            return 1.0 + c * z0, c * z1
        li0 = float(mpmath.polylog(beta, t))
        li1 = float(mpmath.polylog(beta - 1, t))
        return 1.0 + c * li0, c * li1
    if f == "geometric":
        a, b = float(fw.params["a"]), float(fw.params["b"])
        u = b * t
        if u >= 1:
            return math.inf, math.inf
        return 1.0 + a * u / (1 - u), a * u / (1 - u) ** 2
    # factorial: only t = 0 is inside the disc
    return 1.0, 0.0


def _gamma_closed_form(fw: FaceWeights) -> float:
    f = fw.family
    if f == "explicit":
        return float(fw.max_support)
    if f == "power_law":
        c, beta = float(fw.params["c"]), float(fw.params["beta"])
        if beta <= 2:
            return math.inf
        return c * float(mpmath.zeta(beta - 1)) / (1 + c * float(mpmath.zeta(beta)))
    if f == "geometric":
        return math.inf
    return 0.0


def analyze(tw: TreeWeights, fw: FaceWeights | None = None, max_iter: int = 200,
            tol: float = 1e-12) -> GenFnAnalysis:
    """Radius, gamma, tau and g(tau).

    tau is found by bisection on the increasing ratio t g'(t)/g(t); the loop
    runs until the bracket stops shrinking in floating point (which is well
    below ``tol``) or ``max_iter`` is reached.
    """
    fw = fw or tw.fw
    R = fw.declared_radius
    gamma = _gamma_closed_form(fw)
    if R == 0:
        return GenFnAnalysis(0.0, 0.0, 0.0, 1.0, 0.0)
    if gamma < 1:
        g, _ = _g_and_tgp(fw, R)
        return GenFnAnalysis(R, gamma, R, g, gamma)

    def ratio(t):
        g, tg = _g_and_tgp(fw, t)
        return tg / g

    lo = 0.0
    if math.isinf(R):
        hi = 1.0
        while ratio(hi) <= 1:
            hi *= 2
            if hi > 1e300:
                raise ToleranceError("could not bracket tau")
    else:
        hi = R
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ratio(mid) < 1:
            lo = mid
        else:
            hi = mid
        it += 1
    if hi - lo > tol:
        raise ToleranceError(f"bisection for tau did not reach {tol} in {max_iter} steps")
    tau = 0.5 * (lo + hi) if hi - lo > 0 else lo
    g, tg = _g_and_tgp(fw, tau)
    return GenFnAnalysis(R, gamma, tau, g, 1.0, it, abs(tg / g - 1))


# ---------------------------------------------------------------------------
# discrete laws

class DegreeLaw:
    """A law on {0, 1, ...} possibly with an atom at infinity.

    ``pmf`` must be vectorised over integer arrays.  ``tail(N)`` returns an
    upper bound for P(N < X < inf) (exact for the built-in families where a
    closed form exists).  Light tails are tabulated until their mass drops
    below ``tail_tol``; heavy (polynomial) tails of exponent ``alpha`` are
    sampled exactly by rejection from a discretised Pareto proposal.
    """

    def __init__(self, name, pmf, tail, p_inf=0.0, heavy_alpha=None,
                 tail_tol=1e-17, n_max=1 << 16, support_max=None):
        self.name = name
        self._pmf = pmf
        self._tail = tail
        self.p_inf = float(p_inf)
        self.heavy_alpha = heavy_alpha
        if support_max is not None:
            N = int(support_max)
        elif heavy_alpha is not None:
            N = n_max
        else:
            N = 64
            while N < n_max and tail(N) > tail_tol:
                N *= 2
            if tail(N) > 1e-12:
                raise ToleranceError(f"{name}: tail mass {tail(N)} at table size {N}")
        self.table_size = N
        probs = np.clip(pmf(np.arange(N + 1)), 0.0, None)
        self._probs = probs
        self._cdf = np.cumsum(probs)
        self._tail_mass = float(tail(N)) if heavy_alpha is not None else 0.0
        self._total = self._cdf[-1] + self._tail_mass + self.p_inf
        self._M = None

    def pmf(self, i):
        i = np.asarray(i, dtype=np.int64)
        return self._pmf(i)

    def tail(self, N: int) -> float:
        return float(self._tail(N))

    def probs(self, N: int) -> np.ndarray:
        return self.pmf(np.arange(N + 1))

    def _rejection_constant(self):
        if self._M is None:
            N, a = self.table_size, self.heavy_alpha
            grid = np.unique(np.round(np.geomspace(N + 1, 1e15, 400)).astype(np.int64))
            self._M = float(np.max(self._ratio(grid))) * 1.0001
        return self._M

    def _ratio(self, i):
        N, a = self.table_size, self.heavy_alpha
        x = i.astype(float) / (N + 1)
        q = x ** (1 - a) - (x + 1.0 / (N + 1)) ** (1 - a)
        return self._pmf(i) / (self._tail_mass * q)

    def _sample_tail(self, gen, count):
        out = np.empty(count, dtype=np.int64)
        M = self._rejection_constant()
        N, a = self.table_size, self.heavy_alpha
        filled = 0
        while filled < count:
            m = count - filled
            u = gen.random(m)
            x = (N + 1) * (1 - u) ** (-1.0 / (a - 1))
            ok = x < 2.0**62
            i = np.floor(np.where(ok, x, N + 1)).astype(np.int64)
            acc = ok & (gen.random(m) * M < self._ratio(i))
            k = int(acc.sum())
            out[filled:filled + k] = i[acc]
            filled += k
        return out

    def sample(self, rng, size=None):
        gen = rng.gen if hasattr(rng, "gen") else rng
        scalar = size is None
        n = 1 if scalar else int(np.prod(size))
        u = gen.random(n) * self._total
        res = np.searchsorted(self._cdf, u, side="right").astype(np.int64)
        intail = res > self.table_size
        if intail.any():
            tail_zone = intail & (u < self._cdf[-1] + self._tail_mass)
            res[intail] = INFINITE
            k = int(tail_zone.sum())
            if k:
                res[tail_zone] = self._sample_tail(gen, k)
        if scalar:
            return int(res[0])
        return res.reshape(size)

    def mean(self) -> float:
        if self.p_inf > 0:
            return math.inf
        idx = np.arange(self.table_size + 1)
        m = float(np.dot(idx, self._probs))
        return m


class GeometricLaw:
    """P(X = i) = p (1 - p)^i on {0, 1, ...}; ``order=2`` gives the size-biased
    law P(X = i) = p^2 i (1 - p)^(i - 1) on {1, 2, ...}."""

    def __init__(self, name, p, order=1):
        self.name = name
        self.p = float(p)
        self.order = order
        self.p_inf = 0.0

    def pmf(self, i):
        i = np.asarray(i, dtype=float)
        p = self.p
        if self.order == 1:
            return np.where(i >= 0, p * (1 - p) ** np.maximum(i, 0), 0.0)
        return np.where(i >= 1, p * p * i * (1 - p) ** np.maximum(i - 1, 0), 0.0)

    def probs(self, N):
        return self.pmf(np.arange(N + 1))

    def tail(self, N):
        p = self.p
        if self.order == 1:
            return (1 - p) ** (N + 1)
        # P(G1 + G2 - 1 > N) for G ~ Geom(p) on {1, 2, ...}
        return (1 - p) ** N * (1 + N * p) if p < 1 else 0.0

    def sample(self, rng, size=None):
        gen = rng.gen if hasattr(rng, "gen") else rng
        if self.p >= 1:
            val = 0 if self.order == 1 else 1
            return val if size is None else np.full(size, val, dtype=np.int64)
        if self.order == 1:
            x = gen.geometric(self.p, size) - 1
        else:
            x = gen.geometric(self.p, size) + gen.geometric(self.p, size) - 1
        return int(x) if size is None else x.astype(np.int64)

    def mean(self):
        p = self.p
        return (1 - p) / p if self.order == 1 else 2 / p - 1


class OffspringLaws:
    """The offspring law ``pi`` and its derived laws for a weight sequence."""

    def __init__(self, analysis: GenFnAnalysis, tw: TreeWeights):
        self.analysis = analysis
        self.tw = tw
        self.fw = tw.fw
        self.tau = analysis.tau
        self.g_tau = analysis.g_of_tau
        self.kappa = float(min(analysis.gamma, 1.0))
        fam = self.fw.family
        self.degenerate = analysis.radius == 0
        self.heavy = fam == "power_law" and self.tau >= 1.0
        self.pi0 = 1.0 if self.degenerate else 1.0 / self.g_tau
        if self.kappa >= 1:
            self.kappa_tilde = 1.0
        else:
            self.kappa_tilde = max((self.kappa + self.pi0 - 1) / self.pi0, 0.0)

        self.xi = DegreeLaw("xi", self.pi, lambda N: self.moment_tail(0, N),
                            heavy_alpha=self._alpha(0), support_max=self._smax(0))
        self.xi_hat = DegreeLaw("xi_hat", lambda i: i * self.pi(i),
                                lambda N: self.moment_tail(1, N), p_inf=1 - self.kappa,
                                heavy_alpha=self._alpha(1), support_max=self._smax(0))
        self.xi_white = GeometricLaw("xi_white", self.pi0)
        self.xi_white_hat = GeometricLaw("xi_white_hat", self.pi0, order=2)
        if self.pi0 < 1:
            norm = 1 - self.pi0
            self.xi_black = DegreeLaw("xi_black", lambda i: self.pi(i + 1) / norm,
                                      lambda N: self.moment_tail(0, N + 1) / norm,
                                      heavy_alpha=self._alpha(0), support_max=self._smax(1))
        else:
            self.xi_black = None
        if self.kappa > 0:
            k = self.kappa
            self.xi_tilde = DegreeLaw("xi_tilde", lambda i: (i + 1) * self.pi(i + 1) / k,
                                      lambda N: self.moment_tail(1, N + 1) / k,
                                      heavy_alpha=self._alpha(1), support_max=self._smax(1))
        else:
            self.xi_tilde = None
        self._xi_black_hat = None

    # helpers ----------------------------------------------------------
    def _alpha(self, shift):
        if not self.heavy:
            return None
        return float(self.fw.params["beta"]) - shift

    def _smax(self, shift):
        if self.degenerate:
            return 1
        m = self.fw.max_support
        return None if m is None else max(m - shift, 1)

    def pi(self, i):
        """Vectorised offspring probabilities."""
        i = np.asarray(i, dtype=np.int64)
        if self.degenerate:
            return (i == 0).astype(float)
        fam = self.fw.family
        out = np.zeros(i.shape, dtype=float)
        pos = i >= 1
        out[i == 0] = 1.0 / self.g_tau
        if fam == "explicit":
            for d, qd in self.fw.params["q"].items():
                wd = float(face_to_tree_factor(d) * qd)
                out[i == d] = wd * self.tau**d / self.g_tau
        elif fam == "power_law":
            c, beta = float(self.fw.params["c"]), float(self.fw.params["beta"])
            ii = i[pos].astype(float)
            lt = math.log(self.tau) if self.tau < 1 else 0.0
            out[pos] = np.exp(math.log(c) - beta * np.log(ii) + ii * lt - math.log(self.g_tau))
        elif fam == "geometric":
            a, b = float(self.fw.params["a"]), float(self.fw.params["b"])
            lu = math.log(b * self.tau)
            out[pos] = a * np.exp(i[pos] * lu) / self.g_tau
        return out

    def moment_tail(self, s: int, N: int) -> float:
        """Upper bound (exact when a closed form exists) for sum_{i>N} i^s pi_i."""
        if self.degenerate:
            return 0.0
        fam = self.fw.family
        if fam == "explicit":
            return float(sum(float(i) ** s * float(self.pi(np.array([i]))[0])
                             for i in self.fw.params["q"] if i > N))
        if fam == "power_law" and self.heavy:
            c, beta = float(self.fw.params["c"]), float(self.fw.params["beta"])
            if beta - s <= 1:
                return math.inf
            return c * float(mpmath.zeta(beta - s, N + 1)) / self.g_tau
        # geometric decay: bound by a geometric series using the term ratio at N+1
        first = float((N + 1) ** s * self.pi(np.array([N + 1]))[0])
        if fam == "power_law":
            beta = float(self.fw.params["beta"])
            rho = self.tau * ((N + 2) / (N + 1)) ** max(s - beta, 0.0)
        else:
            rho = float(self.fw.params["b"]) * self.tau * ((N + 2) / (N + 1)) ** s
        if rho >= 1:
            return math.inf
        return first / (1 - rho)

    @property
    def xi_black_hat(self) -> DegreeLaw:
        """Law of the outdegree of a special black vertex (atom at infinity)."""
        if self.pi0 >= 1:
            raise PhaseError("pi_0 = 1: degenerate regime, the special black vertex has infinite degree")
        if self._xi_black_hat is None:
            p0 = self.pi0
            self._xi_black_hat = DegreeLaw(
                "xi_black_hat", lambda i: np.where(i >= 1, i * self.pi(i + 1), 0.0) / p0,
                lambda N: self.moment_tail(1, N + 1) / p0, p_inf=(1 - self.kappa) / p0,
                heavy_alpha=self._alpha(1), support_max=self._smax(1))
        return self._xi_black_hat

    def moment(self, r: float) -> float:
        """E(xi^r); inf when the moment diverges."""
        if self.degenerate:
            return 0.0 if r > 0 else 1.0
        fam = self.fw.family
        if fam == "power_law" and self.heavy:
            c, beta = float(self.fw.params["c"]), float(self.fw.params["beta"])
            if beta - r <= 1:
                return math.inf
            return c * float(mpmath.zeta(beta - r)) / self.g_tau
        N = self.xi.table_size
        i = np.arange(1, N + 1, dtype=float)
        return float(np.sum(i**r * self.pi(np.arange(1, N + 1)))) + self.moment_tail(r, N)

    def moment_report(self, orders=(1, 2, 3)) -> dict:
        return {str(r): self.moment(r) for r in orders}

    def summary(self, n_pi: int = 10) -> dict:
        a = self.analysis
        return {
            "radius": a.radius, "gamma": a.gamma, "tau": a.tau, "g_of_tau": a.g_of_tau,
            "kappa": self.kappa, "kappa_tilde": self.kappa_tilde, "pi0": self.pi0,
            "pi": [float(x) for x in self.pi(np.arange(n_pi))],
            "condensation": self.kappa < 1,
        }


def offspring_laws(analysis: GenFnAnalysis, tw: TreeWeights) -> OffspringLaws:
    return OffspringLaws(analysis, tw)


def laws_for(fw: FaceWeights) -> OffspringLaws:
    """Convenience: face weights to offspring laws in one call."""
    tw = derive_tree_weights(fw)
    return offspring_laws(analyze(tw), tw)


def power_law_with_kappa(kappa: float, beta: float) -> FaceWeights:
    """Power-law family whose limit has the requested kappa < 1."""
    if not 0 < kappa < 1:
        raise ConfigError("kappa must lie in (0, 1)")
    if beta <= 2:
        raise ConfigError("beta must exceed 2 for a condensation phase")
    z0, z1 = float(mpmath.zeta(beta)), float(mpmath.zeta(beta - 1))
    c = kappa / (z1 - kappa * z0)
    return FaceWeights("power_law", c=repr(c), beta=repr(float(beta)))
