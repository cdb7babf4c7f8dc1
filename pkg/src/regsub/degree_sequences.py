"""Degree sequences of M(n, M, k): the truncated multinomial law Multi(n, M, k)."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .bounds import trunc_exp_coeff
from .poisson import TruncatedPoisson, log_upper_tail
from .thresholds import lambda_for_density

REJECTION_BUDGET = 10**7
LOG_PROB_CELL_LIMIT = 10**7
_BLOCK_ENTRIES = 1 << 21
_HALVING_MIN_N = 64


class RejectionBudgetError(RuntimeError):
    def __init__(self, attempts: int, accepted: int):
        self.attempts = attempts
        self.acceptance = accepted / attempts if attempts else 0.0
        super().__init__(
            f"rejection budget exhausted after {attempts} attempts "
            f"(acceptance estimate {self.acceptance:.3g})"
        )


@dataclass(frozen=True)
class DegreeSequence:
    degrees: np.ndarray
    min_degree: int
    total: int

    def __post_init__(self):
        d = np.asarray(self.degrees, dtype=np.int64)
        object.__setattr__(self, "degrees", d)
        if d.size and d.min() < self.min_degree:
            raise ValueError("entry below min_degree")
        if int(d.sum()) != self.total:
            raise ValueError("degrees do not sum to total")

    @classmethod
    def of(cls, degrees, k: int) -> "DegreeSequence":
        d = np.asarray(degrees, dtype=np.int64)
        return cls(d, k, int(d.sum()))

    @property
    def n(self) -> int:
        return int(self.degrees.size)


@dataclass(frozen=True)
class SeqStats:
    d_max: int
    pair_density: float
    zeta: float
    phi: float
    in_D0: bool
    max_ok: bool
    pair_ok: bool


def _check_args(n: int, M: int, k: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    if M < k * n:
        raise ValueError(f"M={M} is below k*n={k * n}")


def sample_sequences(n: int, M: int, k: int, rng: np.random.Generator, size: int,
                     budget: int = REJECTION_BUDGET, method: str = "auto") -> np.ndarray:
    """``size`` independent rows from Multi(n, M, k), shape (size, n).

    Rows are built from i.i.d. Z_{>=k}(lambda) draws and kept only when they
    meet the sum constraint; the kept law is Multi(n, M, k) for any lambda, and
    lambda with mean M/n maximises the acceptance rate.  Small n uses whole-row
    rejection on the last coordinate; large n splits the row in halves (see
    ``_HalvingSampler``).  ``method`` forces "rows" or "halving".
    """
    if method not in ("auto", "rows", "halving"):
        raise ValueError(f"unknown method {method!r}")
    _check_args(n, M, k)
    if M == k * n:
        return np.full((size, n), k, dtype=np.int64)
    if n == 1:
        return np.full((size, 1), M, dtype=np.int64)
    if method == "rows" or (method == "auto" and n <= _HALVING_MIN_N):
        return _sample_rows(n, M, k, rng, size, budget)
    sampler = _halving_sampler(n, M, k)
    out = np.empty((size, n), dtype=np.int64)
    for i in range(size):
        out[i] = sampler.draw(rng, budget)
    return out


def _sample_rows(n, M, k, rng, size, budget):
    # d_1..d_{n-1} i.i.d., d_n = M - sum kept with probability p(d_n) / max p
    tp = TruncatedPoisson(k, lambda_for_density(M / n, k))
    table = tp.support_table()
    cdf = np.cumsum(table)
    accept = table / table.max()
    support = np.arange(k, k + table.size)
    var = float(table @ support**2 - (table @ support) ** 2)
    # local-limit estimate of the acceptance rate, used only to size blocks
    rate = min(1.0, 1.0 / (math.sqrt(2 * math.pi * max(n * var, 1e-12)) * table.max()))
    out = np.empty((size, n), dtype=np.int64)
    filled = attempts = 0
    rows = max(1, _BLOCK_ENTRIES // n)
    while filled < size:
        if attempts >= budget:
            raise RejectionBudgetError(attempts, filled)
        want = int(1.5 * (size - filled) / rate) + 1
        block = min(rows, want, budget - attempts)
        u = rng.random((block, n - 1)) * cdf[-1]
        head = _invert_cdf(cdf, u) + k
        last = M - head.sum(axis=1, dtype=np.int64)
        attempts += block
        j = last - k
        ok = (j >= 0) & (j < table.size)
        ok[ok] &= rng.random(int(ok.sum())) < accept[j[ok]]
        take = min(int(ok.sum()), size - filled)
        if take:
            idx = np.flatnonzero(ok)[:take]
            out[filled:filled + take, :-1] = head[idx]
            out[filled:filled + take, -1] = last[idx]
            filled += take
    return out


class _HalvingSampler:
    """Exact Multi(n, M, k) rows in O(n) expected draws.

    With m coordinates left to fill and remaining total T, the first m - j
    (j = m // 2) are drawn i.i.d. and kept with probability
    P(S_j = T') / max_t P(S_j = t), where S_j is a sum of j i.i.d. copies and T'
    the leftover; the last j are then filled recursively given their sum.
    The product of proposal and acceptance is proportional to prod p(d_i), so
    the kept rows have the conditional law exactly.  Sum laws come from direct
    (not FFT) convolution of positive vectors, accurate entrywise.
    """

    def __init__(self, n: int, M: int, k: int):
        self.n, self.M, self.k = n, M, k
        tp = TruncatedPoisson(k, lambda_for_density(M / n, k))
        self.table = tp.support_table()
        self.cdf = np.cumsum(self.table)
        sizes = []
        m = n
        while m > 1:
            m //= 2
            sizes.append(m)
        # P(S_j = k*j + offset + i) stored as (offset, probs / max)
        self.laws: dict[int, tuple[int, np.ndarray]] = {}
        law = (0, self.table / self.table.max())
        self.laws[1] = law
        built = 1
        for j in reversed(sizes):
            if j == built:
                continue
            off, arr = self.laws[built]
            sq = _trim(off * 2, np.convolve(arr, arr))
            if j == 2 * built + 1:
                sq = _trim(sq[0], np.convolve(sq[1], self.laws[1][1]))
            self.laws[j] = sq
            built = j

    def draw(self, rng: np.random.Generator, budget: int) -> np.ndarray:
        k = self.k
        out = np.empty(self.n, dtype=np.int64)
        pos, m, total = 0, self.n, self.M
        attempts = 0
        while m > 1:
            j = m // 2
            left = m - j
            off, law = self.laws[j]
            while True:
                if attempts >= budget:
                    raise RejectionBudgetError(attempts, 0)
                attempts += 1
                head = _invert_cdf(self.cdf, rng.random(left) * self.cdf[-1]) + k
                rest = total - int(head.sum(dtype=np.int64))
                i = rest - k * j - off
                if 0 <= i < law.size and rng.random() < law[i]:
                    break
            out[pos:pos + left] = head
            pos += left
            m, total = j, rest
        out[pos] = total
        return out


def _trim(offset: int, arr: np.ndarray, floor: float = 1e-280) -> tuple[int, np.ndarray]:
    arr = arr / arr.max()
    keep = np.flatnonzero(arr > floor)
    lo, hi = int(keep[0]), int(keep[-1]) + 1
    return offset + lo, arr[lo:hi]


@functools.lru_cache(maxsize=16)
def _halving_sampler(n: int, M: int, k: int) -> _HalvingSampler:
    return _HalvingSampler(n, M, k)


def _invert_cdf(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Index of the first cdf entry exceeding u."""
    if cdf.size > 64:
        return np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    # short tables: counting thresholds beats a binary search per element
    idx = np.zeros(u.shape, dtype=np.int8)
    for c in cdf[:-1]:
        idx += u >= c
    return idx


def sample_sequence(n: int, M: int, k: int, rng: np.random.Generator,
                    budget: int = REJECTION_BUDGET, method: str = "auto") -> DegreeSequence:
    row = sample_sequences(n, M, k, rng, 1, budget, method)[0]
    return DegreeSequence(row, k, M)


def sequence_log_prob(d: DegreeSequence) -> float:
    """Exact log P(Y = d) under Multi(n, M, k)."""
    n, M, k = d.n, d.total, d.min_degree
    if n * M > LOG_PROB_CELL_LIMIT:
        from .bounds import SizeLimitError

        raise SizeLimitError(f"n*M={n * M} exceeds {LOG_PROB_CELL_LIMIT}")
    return float(-gammaln(d.degrees + 1.0).sum()) - trunc_exp_coeff(n, M, k)


def zeta(lam: float, k: int, d: float) -> float:
    """lambda^2 f_{k-2}(lambda) / (2 d f_k(lambda)): the limit of the pair density."""
    return lam * lam * math.exp(log_upper_tail(k - 2, lam) - log_upper_tail(k, lam)) / (2.0 * d)


def stats(d: DegreeSequence, lam: float) -> SeqStats:
    n, M, k = d.n, d.total, d.min_degree
    if n < 3:
        raise ValueError("stats need n >= 3")
    deg = d.degrees
    d_max = int(deg.max())
    pair = float((deg * (deg - 1)).sum()) / (2.0 * M)
    z = zeta(lam, k, M / n)
    logn = math.log(n)
    max_ok = d_max <= M ** 0.25 / logn
    pair_ok = z - 1.0 / logn <= pair <= z + 1.0 / logn
    return SeqStats(d_max, pair, z, pair + pair * pair, max_ok and pair_ok, max_ok, pair_ok)


def enumerate_sequences(n: int, M: int, k: int):
    """All vectors of length n, entries >= k, summing to M (lexicographic)."""
    _check_args(n, M, k)

    def rec(prefix, left, slots):
        if slots == 1:
            yield prefix + (left,)
            return
        for v in range(k, left - k * (slots - 1) + 1):
            yield from rec(prefix + (v,), left - v, slots - 1)

    yield from rec((), M, n)
