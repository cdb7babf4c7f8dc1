"""Analytic pieces of the first-moment argument.

The exact object throughout is the coefficient of x^M in
(sum_{j>=k} x^j / j!)^s, i.e. the sum over degree vectors of length s, total M
and minimum k of prod 1/d_i!.  It is computed by a log-space convolution DP and
used both as the normaliser of the truncated multinomial law and as the oracle
for the bounds it is sandwiched between.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from .poisson import log_upper_tail, mean_ratio
from .thresholds import NoRootError, lambda_for_density

DP_CELL_LIMIT = 10**8
RATIO_WINDOW = (1.0 / 20.0, 20.0)


class SizeLimitError(ValueError):
    pass


def _log_conv(a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    """log of the first ``length`` coefficients of exp(a) * exp(b)."""
    out = np.full(length, -np.inf)
    nb = min(b.size, length)
    for i in range(min(a.size, length)):
        if a[i] == -np.inf:
            continue
        stop = min(length, i + nb)
        seg = out[i:stop]
        np.logaddexp(seg, a[i] + b[:stop - i], out=seg)
    return out


def log_coeff_series(s: int, R: int, k: int) -> np.ndarray:
    """log [x^{ks + r}] (sum_{j>=k} x^j/j!)^s for r = 0..R."""
    base = -gammaln(np.arange(k, k + R + 1) + 1.0)
    result = None
    power = base
    e = s
    while e:
        if e & 1:
            result = power if result is None else _log_conv(result, power, R + 1)
        e >>= 1
        if e:
            power = _log_conv(power, power, R + 1)
    return result


def trunc_exp_coeff(s: int, Ms: int, k: int) -> float:
    """log of sum_{d in D_{s,Ms,k}} prod_i 1/d_i!."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if Ms < k * s:
        raise ValueError(f"Ms={Ms} is below k*s={k * s}")
    if s * Ms > DP_CELL_LIMIT:
        raise SizeLimitError(f"table s*Ms={s * Ms} exceeds {DP_CELL_LIMIT}")
    return float(log_coeff_series(s, Ms - k * s, k)[-1])


@dataclass
class SumBoundReport:
    s: int
    Ms: int
    k: int
    log_coeff: float
    lower_ok: bool
    scaled_ratio: float | None
    window_ok: bool | None
    shifted_log_lhs: float
    shifted_log_rhs: float
    shifted_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.shifted_ok and self.window_ok is not False


def check_sum_bounds(s: int, Ms: int, k: int, rel_tol: float = 1e-9) -> SumBoundReport:
    """Test the three bounds on the coefficient sum against the exact DP value.

    (a) lower bound from the extremal vector (k, ..., k, k + phi);
    (b) sqrt(Ms) * coefficient / (e^{mu s} mu^{-Ms} f_k(mu)^s) in the window;
    (c) the shifted (cutoff 0) sum is at most (e / (Ms/s - k))^{Ms - ks}.
    """
    logc = trunc_exp_coeff(s, Ms, k)
    phi = Ms - k * s
    lk = math.lgamma(k + 1)
    slack = rel_tol * max(1.0, abs(logc))
    lower1 = -(s - 1) * lk - math.lgamma(k + phi + 1)
    lower2 = -s * lk - (phi * math.log(k + phi) if phi > 0 else 0.0)
    lower = logc >= lower1 - slack and lower1 >= lower2 - slack

    ratio = in_window = None
    if phi > 0:
        mu = lambda_for_density(Ms / s, k)
        log_ref = mu * s - Ms * math.log(mu) + s * log_upper_tail(k, mu)
        ratio = math.exp(logc - log_ref + 0.5 * math.log(Ms))
        in_window = RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]

    lhs = trunc_exp_coeff(s, phi, 0) if phi > 0 else 0.0
    rhs = phi * (1.0 - math.log(phi / s)) if phi > 0 else 0.0
    shifted = lhs <= rhs + rel_tol * max(1.0, abs(rhs))
    return SumBoundReport(s, Ms, k, logc, lower, ratio, in_window, lhs, rhs, shifted)


def mu_of_rho(rho: float, k: int) -> float:
    if not rho > k:
        raise ValueError(f"rho={rho} must exceed k={k}")
    try:
        return lambda_for_density(rho, k)
    except NoRootError as exc:
        raise ValueError(str(exc)) from exc


def log_psi(rho: float, k: int) -> float:
    mu = mu_of_rho(rho, k)
    x = rho - k
    return rho * math.log(mu) - mu - log_upper_tail(k, mu) + x * (1.0 - math.log(x))


def psi(rho: float, k: int) -> float:
    """mu^rho e^{-mu} / f_k(mu) * (e / (rho - k))^{rho - k} with mu = mu_of_rho."""
    return math.exp(log_psi(rho, k))


def log_h1(rho: float, k: int) -> float:
    """log(mu^rho e^{-mu} / f_k(mu)); its derivative in rho is log mu."""
    mu = mu_of_rho(rho, k)
    return rho * math.log(mu) - mu - log_upper_tail(k, mu)


def _check_bound_args(eta: float, sigma: float, k: int, d: float) -> None:
    if not eta > 1:
        raise ValueError(f"eta={eta} must exceed 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not d > k:
        raise ValueError(f"d={d} must exceed k={k}")


def log_bound_f(eta: float, sigma: float, k: int, d: float, mu: float | None = None) -> float:
    if mu is None:
        mu = lambda_for_density(d, k)
    _check_bound_args(eta, sigma, k, d)
    e = (1.0 + sigma) * d / k
    x = (1.0 + sigma) * d - k
    return (
        0.5 * eta * math.log1p(-1.0 / eta)
        - 0.5 * math.log(eta - 1.0)
        - math.lgamma(k + 1) / k
        + (-mu - log_upper_tail(k, mu)) / k
        + e * math.log(mu)
        + (e - 1.0) * (1.0 - math.log(x))
    )


def bound_f(eta: float, sigma: float, k: int, d: float) -> float:
    """Per-edge first-moment factor f(eta, sigma), including the 1/k!^{1/k} term."""
    return math.exp(log_bound_f(eta, sigma, k, d))


def limiting_shape(eta: float) -> float:
    """(eta - 1)^{(eta-1)/2} eta^{-eta/2}, the large-k limit of the bound."""
    if not eta > 1:
        raise ValueError("eta must exceed 1")
    if eta == 2.0:
        return 0.5
    return math.exp(0.5 * (eta - 1.0) * math.log(eta - 1.0) - 0.5 * eta * math.log(eta))


def log_entropy_bound(delta: float, sigma: float, k: int, d: float, c_const: float,
                      mu: float | None = None) -> float:
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    eta = d / (k * delta)
    if not eta > 1:
        raise ValueError(f"eta = d/(k delta) = {eta} must exceed 1")
    return (
        -math.log(delta) / k
        - (1.0 - delta) * math.log1p(-delta) / (k * delta)
        + math.log1p(c_const * (sigma + d / k - 1.0))
        + log_bound_f(eta, sigma, k, d, mu)
    )


def entropy_bound(delta: float, sigma: float, k: int, d: float, c_const: float = 1.0) -> float:
    """Per-edge bound on the expected number of k-regular subgraphs on delta*n vertices,
    with the binomial entropy folded in; below 1 means such subgraphs are rare."""
    return math.exp(log_entropy_bound(delta, sigma, k, d, c_const))


def default_density(k: int) -> float:
    """d = k + sqrt(k log k) / 2, the reference density for the epsilon_k sweeps."""
    return k + 0.5 * math.sqrt(k * math.log(k))


@dataclass
class BoundProfile:
    k: int
    d: float
    sigma: float
    c_const: float
    delta_grid: np.ndarray
    values: np.ndarray
    epsilon_k: float | None = None
    params: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["delta", "value"])
            for x, v in zip(self.delta_grid, self.values):
                w.writerow([repr(float(x)), repr(float(v))])
        side = {
            "k": self.k, "d": self.d, "sigma": self.sigma, "c_const": self.c_const,
            "grid_step": float(self.delta_grid[1] - self.delta_grid[0])
            if self.delta_grid.size > 1 else None,
            "epsilon_k": self.epsilon_k, **self.params,
        }
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(side, indent=2) + "\n")


def bound_profile(k: int, d: float, sigma: float = 0.01, c_const: float = 1.0,
                  grid_step: float = 1e-3) -> BoundProfile:
    steps = int(round(1.0 / grid_step))
    grid = np.arange(1, steps) / steps
    mu = lambda_for_density(d, k)
    vals = np.array([math.exp(log_entropy_bound(x, sigma, k, d, c_const, mu)) for x in grid])
    prof = BoundProfile(k, d, sigma, c_const, grid, vals)
    prof.epsilon_k = _epsilon_from_values(grid, vals, steps)
    return prof


def _epsilon_from_values(grid: np.ndarray, vals: np.ndarray, steps: int) -> float | None:
    # grid point i (delta = i/steps) is excluded from [j, steps - j] iff j > min(i, steps - i)
    idx = np.arange(1, steps)
    bad = idx[vals >= 1.0]
    j = 1 if bad.size == 0 else int(np.max(np.minimum(bad, steps - bad))) + 1
    if 2 * j > steps:
        return None
    return j / steps


def extract_epsilon_k(k: int, d: float, sigma: float = 0.01, c_const: float = 1.0,
                      grid_step: float = 1e-3) -> float | None:
    """Smallest grid epsilon with entropy_bound < 1 on every grid delta in [eps, 1 - eps]."""
    if grid_step > 1e-3:
        raise ValueError("grid_step must be <= 1e-3")
    return bound_profile(k, d, sigma, c_const, grid_step).epsilon_k
