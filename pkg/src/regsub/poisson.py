"""Truncated Poisson kernel.

Upper tails f_k(mu) = P(Poisson(mu) >= k), the ratios built from them, and an
exact sampler for the Poisson law conditioned to be at least ``k``.

Point probabilities use Loader's saddle-point form (``stirlerr`` + ``bd0``) so
that log p(i; mu) carries an absolute error of a few ulps even for i, mu ~ 1e3.
Tails are summed outward from the mode, relative to the largest term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_TERM_CUTOFF = 1e-18
_SAMPLER_SWITCH = 0.1

_S0 = 1.0 / 12
_S1 = 1.0 / 360
_S2 = 1.0 / 1260
_S3 = 1.0 / 1680
_S4 = 1.0 / 1188


def _stirlerr(n: int) -> float:
    """log(n!) - log(sqrt(2 pi n) (n/e)^n) for integer n >= 1."""
    if n <= 15:
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - _LOG_SQRT_2PI
    nn = float(n) * n
    if n > 500:
        return (_S0 - _S1 / nn) / n
    if n > 80:
        return (_S0 - (_S1 - _S2 / nn) / nn) / n
    if n > 35:
        return (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


def _bd0(x: float, np_: float) -> float:
    """Deviance term x log(x/np) + np - x without cancellation."""
    if abs(x - np_) < 0.1 * (x + np_):
        v = (x - np_) / (x + np_)
        s = (x - np_) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / np_) + np_ - x


def log_poisson_pmf(i: int, mu: float) -> float:
    """log P(Poisson(mu) = i)."""
    if i < 0:
        return -math.inf
    if mu == 0.0:
        return 0.0 if i == 0 else -math.inf
    if i == 0:
        return -mu
    return -_stirlerr(i) - _bd0(float(i), mu) - _LOG_SQRT_2PI - 0.5 * math.log(i)


def _check_mu(mu: float) -> None:
    if not mu >= 0.0:
        raise ValueError(f"Poisson rate must be nonnegative, got {mu!r}")


def log_upper_tail(k: int, mu: float) -> float:
    """log f_k(mu); finite whenever mu > 0, even when f_k(mu) underflows."""
    _check_mu(mu)
    if k <= 0:
        return 0.0
    if mu == 0.0:
        return -math.inf
    start = max(k, int(math.floor(mu)))
    total = 1.0
    # upward from the larger of (k, mode)
    term = 1.0
    i = start
    while True:
        term *= mu / (i + 1)
        total += term
        i += 1
        if term < _TERM_CUTOFF * total:
            break
    # downward from the mode to k
    term = 1.0
    i = start
    while i > k:
        term *= i / mu
        total += term
        i -= 1
        if term < _TERM_CUTOFF * total:
            break
    return log_poisson_pmf(start, mu) + math.log(total)


def upper_tail(k: int, mu: float) -> float:
    """f_k(mu) = P(Poisson(mu) >= k)."""
    return math.exp(log_upper_tail(k, mu))


def h(k: int, mu: float) -> float:
    """mu / f_{k-1}(mu), the ambient average degree whose core has rate mu."""
    if k < 1:
        raise ValueError("h needs k >= 1")
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    lf = log_upper_tail(k - 1, mu)
    if lf < math.log(1e-300):
        raise OverflowError(f"f_{k - 1}({mu}) underflows; h is not representable")
    return mu / math.exp(lf)


def mean_ratio(k: int, mu: float) -> float:
    """mu f_{k-1}(mu) / f_k(mu): the mean of Z_{>=k}(mu).

    f_{-1} is taken to be 1, so k = 0 gives the untruncated mean mu.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    return mu * math.exp(log_upper_tail(k - 1, mu) - log_upper_tail(k, mu))


@dataclass(frozen=True)
class TruncatedPoisson:
    """Poisson(rate) conditioned on being >= cutoff."""

    cutoff: int
    rate: float

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    @property
    def log_norm(self) -> float:
        return log_upper_tail(self.cutoff, self.rate)

    def mean(self) -> float:
        return mean_ratio(self.cutoff, self.rate)

    def support_table(self, tol: float = 1e-17) -> np.ndarray:
        """pmf on cutoff, cutoff+1, ... until the omitted tail mass is below tol."""
        lam, k = self.rate, self.cutoff
        lognorm = self.log_norm
        probs = []
        j = k
        while True:
            p = math.exp(log_poisson_pmf(j, lam) - lognorm)
            probs.append(p)
            # past 2*lam the tail after j is dominated by a geometric series of ratio < 1/2
            if j + 1 > 2 * lam and p < 0.5 * tol:
                break
            j += 1
        return np.array(probs)


def pmf(tp: TruncatedPoisson, j: int) -> float:
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j < tp.cutoff:
        return 0.0
    return math.exp(log_poisson_pmf(j, tp.rate) - tp.log_norm)


def sample(tp: TruncatedPoisson, rng: np.random.Generator, size=None):
    """Exact draw(s) from Z_{>=cutoff}(rate).

    Plain Poisson rejection when f_k(rate) >= 0.1 (at most ten proposals on
    average); otherwise an inverse-CDF walk starting at the cutoff.
    """
    k, lam = tp.cutoff, tp.rate
    scalar = size is None
    count = 1 if scalar else int(np.prod(size))
    norm = math.exp(tp.log_norm)
    if norm >= _SAMPLER_SWITCH:
        out = np.empty(count, dtype=np.int64)
        filled = 0
        while filled < count:
            need = count - filled
            draws = rng.poisson(lam, size=int(need * 1.1 / norm) + 16)
            draws = draws[draws >= k][:need]
            out[filled:filled + draws.size] = draws
            filled += draws.size
    else:
        cdf = np.cumsum(tp.support_table())
        u = rng.random(count) * cdf[-1]
        out = k + np.searchsorted(cdf, u, side="right").astype(np.int64)
        np.minimum(out, k + cdf.size - 1, out=out)
    if scalar:
        return int(out[0])
    return out.reshape(size)
