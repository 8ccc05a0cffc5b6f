"""Ensemble analysis and performance bounds: density evolution, IT-decoder
EXIT curves, area-theorem ML-threshold upper bounds, protograph DE/EXIT,
Singleton and Berlekamp bounds, and the truncated-union error-floor estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .binmat import BinVector
from .ldpc import LdpcCode, Protograph, encode


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective lambda/rho coefficients indexed by degree
    (coefficient of x^(d-1)), plus the derived node-perspective Lambda."""

    lam: tuple  # lam[i] = coefficient for degree i+1
    rho: tuple

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        for arr, name in ((lam, "lambda"), (rho, "rho")):
            if (arr < -1e-12).any() or abs(arr.sum() - 1.0) > 1e-9:
                raise ValueError(f"{name} coefficients must be >= 0 and sum to 1")
        object.__setattr__(self, "lam", tuple(lam))
        object.__setattr__(self, "rho", tuple(rho))

    @classmethod
    def regular(cls, dv: int, dc: int) -> "DegreeDistribution":
        lam = [0.0] * dv
        lam[dv - 1] = 1.0
        rho = [0.0] * dc
        rho[dc - 1] = 1.0
        return cls(tuple(lam), tuple(rho))

    @property
    def node_lambda(self):
        """Lambda_i: fraction of variable nodes with degree i."""
        w = np.array([l / (i + 1) for i, l in enumerate(self.lam)])
        return tuple(w / w.sum())

    @property
    def rate(self) -> float:
        num = sum(r / (j + 1) for j, r in enumerate(self.rho))
        den = sum(l / (i + 1) for i, l in enumerate(self.lam))
        return 1.0 - num / den

    def lam_eval(self, x):
        return sum(l * np.power(x, i) for i, l in enumerate(self.lam))

    def rho_eval(self, x):
        return sum(r * np.power(x, j) for j, r in enumerate(self.rho))

    def node_lambda_eval(self, x):
        return sum(L * np.power(x, i + 1) for i, L in enumerate(self.node_lambda))


@dataclass
class ExitCurve:
    x: np.ndarray
    p_a: np.ndarray
    p_e: np.ndarray
    x_bp: float
    eps_bp: float


@dataclass
class ThresholdReport:
    eps_it: float
    eps_ml_bound: float
    eps_sh: float
    degenerate: bool = False
    diagnostics: dict = field(default_factory=dict)


@dataclass
class WeightSpectrumTail:
    d_min: int
    a_min: int


def _de_converges(dist: DegreeDistribution, eps: float,
                  iters: int = 2000, cutoff: float = 1e-9) -> bool:
    x = eps
    for _ in range(iters):
        x_next = eps * dist.lam_eval(1.0 - dist.rho_eval(1.0 - x))
        if x_next < cutoff:
            return True
        if abs(x_next - x) < 1e-15:
            return False
        x = x_next
    return x < cutoff


def it_threshold(dist: DegreeDistribution, tol: float = 1e-5) -> float:
    """Supremum erasure probability for which density evolution converges."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _de_converges(dist, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _find_bp(dist: DegreeDistribution):
    """Locate the minimum of p_A(x) on (0, 1] by golden-section search."""

    def pa(x):
        d = dist.lam_eval(1.0 - dist.rho_eval(1.0 - x))
        return x / d if d > 0 else math.inf

    gr = (math.sqrt(5) - 1) / 2
    a, b = 1e-9, 1.0
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = pa(c), pa(d)
    for _ in range(200):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = pa(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = pa(d)
    x_bp = 0.5 * (a + b)
    return x_bp, pa(x_bp)


def exit_curve(dist: DegreeDistribution, grid: int = 100001) -> ExitCurve:
    """IT-decoder EXIT curve in parametric form over x in [x_BP, 1]."""
    x_bp, eps_bp = _find_bp(dist)
    xs = np.linspace(x_bp, 1.0, grid)
    y = 1.0 - dist.rho_eval(1.0 - xs)
    p_a = xs / dist.lam_eval(y)
    p_e = dist.node_lambda_eval(y)
    return ExitCurve(xs, p_a, p_e, x_bp, eps_bp)


def ml_threshold_bound(dist: DegreeDistribution, grid: int = 100001):
    """Area-theorem upper bound p_A* on the ML threshold: the abscissa where
    the area under the IT EXIT curve, from p_A* to 1, equals the rate."""
    curve = exit_curve(dist, grid)
    r = dist.rate
    p_a, p_e = curve.p_a, curve.p_e
    seg = 0.5 * (p_e[1:] + p_e[:-1]) * np.diff(p_a)
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])  # area from p_a[i] to 1
    if tail[0] < r:
        return curve.eps_bp, True
    # first index where remaining area drops below R, then local linear solve
    idx = int(np.searchsorted(-tail, -r))
    if idx == 0:
        return float(p_a[0]), False
    a0, a1 = tail[idx - 1], tail[idx]
    x0, x1 = p_a[idx - 1], p_a[idx]
    frac = (a0 - r) / (a0 - a1) if a0 > a1 else 0.0
    return float(x0 + frac * (x1 - x0)), False


def threshold_report(dist: DegreeDistribution) -> ThresholdReport:
    eps_it = it_threshold(dist)
    bound, degenerate = ml_threshold_bound(dist)
    return ThresholdReport(eps_it, bound, 1.0 - dist.rate, degenerate)


# --- protograph density evolution -------------------------------------------

def _proto_arrays(p: Protograph):
    b = np.asarray(p.base, dtype=float)
    punct = np.array([j in p.punctured_cols for j in range(p.n_vars)])
    return b, punct


def _proto_fixed_point(b, priors, v0=None, iters: int = 20000, tol: float = 1e-12):
    """Largest fixed point of per-edge-type erasure DE, reached from above.

    Returns (v, c, posterior) where the products are accumulated in the log
    domain so zero-probability messages stay harmless.
    """
    mask = b > 0
    v = np.where(mask, 1.0, 0.0) if v0 is None else v0.copy()
    tiny = 1e-300
    for _ in range(iters):
        lo = np.log(np.maximum(1.0 - v, tiny))
        s = (b * lo).sum(axis=1, keepdims=True)
        c = np.where(mask, 1.0 - np.exp(s - lo), 0.0)
        lc = np.log(np.maximum(c, tiny))
        t = (b * lc).sum(axis=0, keepdims=True)
        v_new = np.where(mask, priors[None, :] * np.exp(t - lc), 0.0)
        v_new = np.clip(v_new, 0.0, 1.0)
        if np.abs(v_new - v).max() < tol:
            v = v_new
            break
        v = v_new
    lc = np.log(np.maximum(np.where(mask, c, 1.0), tiny))
    extrinsic = np.exp((b * lc).sum(axis=0))
    posterior = priors * extrinsic
    return v, extrinsic, posterior


def protograph_de(p: Protograph, eps: float, cutoff: float = 1e-9) -> bool:
    """Whether per-edge-type DE at channel erasure eps drives every variable
    node's posterior erasure probability to zero (punctured nodes use prior 1)."""
    b, punct = _proto_arrays(p)
    priors = np.where(punct, 1.0, eps)
    _, _, post = _proto_fixed_point(b, priors)
    return bool((post < cutoff).all())


def protograph_it_threshold(p: Protograph, tol: float = 1e-4) -> float:
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if protograph_de(p, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def protograph_exit_curve(p: Protograph, grid: int = 2001):
    """Average extrinsic erasure over transmitted VNs versus the a-priori
    erasure applied to transmitted VNs, swept downward with warm starts."""
    b, punct = _proto_arrays(p)
    pas = np.linspace(1.0, 0.0, grid)
    pes = np.zeros(grid)
    v = None
    for i, pa in enumerate(pas):
        priors = np.where(punct, 1.0, pa)
        v, extrinsic, _ = _proto_fixed_point(b, priors, v0=v)
        pes[i] = extrinsic[~punct].mean()
    return pas[::-1], pes[::-1]


def protograph_ml_bound(p: Protograph, grid: int = 2001):
    """Area-theorem bound for a protograph ensemble, rate over transmitted
    positions only."""
    pas, pes = protograph_exit_curve(p, grid)
    r = p.design_rate
    seg = 0.5 * (pes[1:] + pes[:-1]) * np.diff(pas)
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    if tail[0] < r:
        return float(pas[0]), True
    idx = int(np.searchsorted(-tail, -r))
    if idx == 0:
        return float(pas[0]), False
    a0, a1 = tail[idx - 1], tail[idx]
    x0, x1 = pas[idx - 1], pas[idx]
    frac = (a0 - r) / (a0 - a1) if a0 > a1 else 0.0
    return float(x0 + frac * (x1 - x0)), False


# --- finite-length bounds ---------------------------------------------------

def _log_binom(n: int, i: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)


def _log_term(n: int, i: int, eps: float) -> float:
    if eps == 0.0:
        return 0.0 if i == 0 else -math.inf
    if eps == 1.0:
        return 0.0 if i == n else -math.inf
    return _log_binom(n, i) + i * math.log(eps) + (n - i) * math.log1p(-eps)


def _logsumexp(terms) -> float:
    m = max(terms, default=-math.inf)
    if m == -math.inf:
        return m
    return m + math.log(sum(math.exp(t - m) for t in terms))


def singleton_bound(n: int, k: int, eps: float) -> float:
    """CER of an ideal MDS code: failure iff more than n-k erasures."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    terms = [_log_term(n, i, eps) for i in range(n - k + 1, n + 1)]
    return min(1.0, math.exp(_logsumexp(terms))) if terms else 0.0


def berlekamp_bound(n: int, k: int, eps: float) -> float:
    """Average CER upper bound for the random (n,k) ensemble: the MDS tail
    plus rank-deficiency terms weighted by 2^-(n-k-i)."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    ln2 = math.log(2.0)
    terms = [_log_term(n, i, eps) - (n - k - i) * ln2 for i in range(0, n - k + 1)]
    terms += [_log_term(n, i, eps) for i in range(n - k + 1, n + 1)]
    return min(1.0, math.exp(_logsumexp(terms)))


def error_floor_estimate(tail: WeightSpectrumTail, eps: float) -> float:
    """Truncated union bound: A_min * eps^d_min."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    return tail.a_min * eps ** tail.d_min


def exhaustive_min_distance(code: LdpcCode, cap_k: int = 24) -> WeightSpectrumTail:
    """Exact d_min and multiplicity by enumerating all nonzero messages."""
    if code.k > cap_k:
        raise ValueError(f"k = {code.k} exceeds enumeration cap {cap_k}")
    best = code.n + 1
    mult = 0
    for msg in range(1, 1 << code.k):
        w = encode(code, BinVector(code.k, msg)).weight()
        if w < best:
            best, mult = w, 1
        elif w == best:
            mult += 1
    return WeightSpectrumTail(best, mult)
