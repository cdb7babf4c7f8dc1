"""Core-emergence constants c_k, mu_k, d_k and k-core size predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .poisson import h, log_poisson_pmf, log_upper_tail, mean_ratio, upper_tail

_XTOL = 1e-12
_MAXITER = 200
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NoRootError(ValueError):
    pass


@dataclass(frozen=True)
class CoreThreshold:
    k: int
    c_k: float
    mu_k: float
    d_k: float
    core_fraction: float

    def stationarity_residual(self) -> float:
        return stationarity(self.k, self.mu_k) - 1.0 / (self.k - 1)


@dataclass(frozen=True)
class CorePrediction:
    n: int
    c: float
    k: int
    vertices: float
    edges: float

    @property
    def average_degree(self) -> float:
        return 2.0 * self.edges / self.vertices if self.vertices > 0 else 0.0


def stationarity(k: int, mu: float) -> float:
    """e^{-mu} mu^{k-1} / ((k-1)! f_{k-1}(mu)); equals 1/(k-1) exactly at mu_k."""
    return math.exp(log_poisson_pmf(k - 1, mu) - log_upper_tail(k - 1, mu))


def _golden_min(fn, lo: float, hi: float, tol: float = 1e-10, maxiter: int = 1000):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(maxiter):
        if b - a < tol * max(1.0, abs(a)):
            return 0.5 * (a + b)
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    raise RuntimeError("golden-section search did not converge")


def emergence_threshold(k: int) -> CoreThreshold:
    """Minimise h_k; c_k = h_k(mu_k) is the k-core emergence average degree."""
    if k < 3:
        raise ValueError("emergence threshold is defined for k >= 3")
    lo, hi = k / 2.0, 3.0 * k
    for _ in range(30):
        m = _golden_min(lambda x: h(k, x), lo, hi, tol=1e-7)
        # a minimiser pinned to an end means the bracket was wrong
        if m - lo > 1e-3 * lo and hi - m > 1e-3 * hi:
            break
        lo, hi = lo / 2.0, hi * 2.0
    else:
        raise RuntimeError(f"no interior minimum of h_{k} found")
    # refine on the stationarity identity, which is monotone near mu_k
    target = 1.0 / (k - 1)
    g = lambda x: stationarity(k, x) - target  # noqa: E731
    a, b = m * (1 - 1e-3), m * (1 + 1e-3)
    while g(a) < 0:
        a *= 0.9
    while g(b) > 0:
        b *= 1.1
    mu = brentq(g, a, b, xtol=_XTOL, rtol=1e-15, maxiter=_MAXITER)
    return CoreThreshold(
        k=k, c_k=h(k, mu), mu_k=mu, d_k=mean_ratio(k, mu), core_fraction=upper_tail(k, mu)
    )


def mu_for_c(c: float, k: int, threshold: CoreThreshold | None = None) -> float:
    """Larger root of h_k(mu) = c."""
    th = threshold or emergence_threshold(k)
    if c < th.c_k - 1e-12:
        raise NoRootError(f"c={c} is below c_{k}={th.c_k}")
    if c <= th.c_k:
        return th.mu_k
    lo, hi = th.mu_k, c
    # Newton from c, kept inside [lo, hi]
    x = c
    for _ in range(50):
        fx = h(k, x) - c
        if abs(fx) < 1e-13 * c:
            return x
        if fx > 0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        # h'(x) = (f_{k-1} - x f'_{k-1}) / f_{k-1}^2 with f'_{k-1} = p(k-2; x)
        f1 = upper_tail(k - 1, x)
        dh = (f1 - x * math.exp(log_poisson_pmf(k - 2, x))) / (f1 * f1)
        nx = x - fx / dh if dh > 0 else 0.5 * (lo + hi)
        if not lo < nx < hi:
            nx = 0.5 * (lo + hi)
        x = nx
    return brentq(lambda y: h(k, y) - c, lo, hi, xtol=_XTOL, maxiter=_MAXITER)


def lambda_for_density(d: float, k: int) -> float:
    """The unique lambda > 0 with lambda f_{k-1}(lambda) = d f_k(lambda)."""
    if d - k < 1e-9:
        raise NoRootError(f"density d={d} must exceed k={k}")
    lo, hi = 1e-9, 3.0 * d
    while mean_ratio(k, lo) >= d:
        lo *= 1e-3
        if lo < 1e-300:
            raise NoRootError("density too close to k")
    return brentq(lambda x: mean_ratio(k, x) - d, lo, hi, xtol=min(_XTOL, lo), rtol=1e-15,
                  maxiter=_MAXITER)


def core_prediction(n: int, c: float, k: int,
                    threshold: CoreThreshold | None = None) -> CorePrediction:
    mu = mu_for_c(c, k, threshold)
    return CorePrediction(
        n=n, c=c, k=k,
        vertices=upper_tail(k, mu) * n,
        edges=0.5 * mu * upper_tail(k - 1, mu) * n,
    )


def dk_asymptotic(k: int) -> float:
    """Two-term expansion k + sqrt(k log k) shared by mu_k and d_k."""
    if k < 3:
        raise ValueError("k must be >= 3")
    return k + math.sqrt(k * math.log(k))


def expansion_residual(value: float, k: int) -> float:
    """(value - k - sqrt(k log k)) / sqrt(k / log k)."""
    return (value - dk_asymptotic(k)) / math.sqrt(k / math.log(k))
