"""Quick oracle-equivalence and invariant checks behind ``regsub verify``.

Each check is small enough for the whole suite to run in well under a minute;
the pytest suite runs the same comparisons at full size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import chisquare

from . import oracles
from .bounds import (check_sum_bounds, default_density, extract_epsilon_k, limiting_shape, log_psi,
                     mu_of_rho)
from .degree_sequences import sample_sequences
from .factors import find_k_regular, has_k_factor, hitting_time, k_core
from .graphs import DegreeSequence, configuration_pairing, process_trace, sample_gnp
from .poisson import upper_tail
from .thresholds import emergence_threshold, expansion_residual


@dataclass
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def _kernel(rng) -> list[CheckResult]:
    worst = 0.0
    for k in range(0, 40, 3):
        for mu in (0.01, 0.5, 2.0, 7.5, 30.0, 120.0):
            ref = oracles.upper_tail_mp(k, mu)
            if ref > 0:
                worst = max(worst, abs(upper_tail(k, mu) - ref) / ref)
    return [CheckResult("kernel", "upper_tail vs extended precision", worst < 1e-10, f"max rel err {worst:.2e}")]


def _thresholds(rng) -> list[CheckResult]:
    ths = [emergence_threshold(k) for k in range(3, 21)]
    stat = max(abs(t.stationarity_residual()) for t in ths)
    inc = all(a.c_k < b.c_k for a, b in zip(ths, ths[1:]))
    below = all(t.c_k < 3 * t.k for t in ths)
    res = max(abs(expansion_residual(emergence_threshold(k).d_k, k)) for k in (50, 100))
    return [
        CheckResult("thresholds", "stationarity identity", stat < 1e-8, f"max residual {stat:.1e}"),
        CheckResult("thresholds", "c_k increasing and below 3k", inc and below),
        CheckResult("thresholds", "d_k expansion residual", res <= 10, f"max {res:.2f}"),
    ]


def _sequences(rng) -> list[CheckResult]:
    law = oracles.multi_law(4, 14, 3)
    keys = list(law)
    draws = sample_sequences(4, 14, 3, rng, 20000)
    index = {key: i for i, key in enumerate(keys)}
    counts = np.bincount([index[tuple(r)] for r in draws.tolist()], minlength=len(keys))
    p = chisquare(counts, np.array([law[key] for key in keys]) * draws.shape[0]).pvalue
    return [CheckResult("sequences", "Multi(4,14,3) chi-square", bool(p > 1e-3), f"p = {p:.3f}")]


def _graphs(rng) -> list[CheckResult]:
    law = oracles.pairing_law([2, 2])
    seq = DegreeSequence.of([2, 2], 1)
    trials = 6000
    loops = sum(configuration_pairing(seq, rng).loop_count() > 0 for _ in range(trials))
    z = abs(loops / trials - law[((0, 0), (1, 1))]) / math.sqrt(2 / 9 / trials)
    return [CheckResult("graphs", "pairing law at d = (2, 2)", z < 4, f"z = {z:.2f}")]


def _factors(rng) -> list[CheckResult]:
    bad = 0
    for _ in range(120):
        n = int(rng.integers(3, 8))
        g = sample_gnp(n, float(rng.uniform(0.3, 1.0)), rng)
        for k in (1, 2, 3):
            sizes = oracles.regular_subgraph_sizes(g, k)
            w = has_k_factor(g, k)
            x = find_k_regular(g, k, "exact")
            bad += (w is not None) != (n in sizes)
            bad += (x.size if x is not None else None) != (max(sizes) if sizes else None)
            if x is not None:
                bad += not x.check(g, k) or not set(x.vertices) <= set(k_core(g, k).vertices)
    hits = 0
    for _ in range(10):
        tr = process_trace(200, rng)
        hits += hitting_time(tr, 1).m_upper == 1
        hits += hitting_time(tr, 2).m_upper == oracles.first_cycle_step(tr)
    return [
        CheckResult("factors", "detectors vs edge-subset enumeration", bad == 0, f"{bad} disagreements"),
        CheckResult("factors", "m_1 = 1 and m_2 = first cycle", hits == 20, f"{hits}/20"),
    ]


def _bounds(rng) -> list[CheckResult]:
    gap = all(mu_of_rho(r, k) > r - k for k in (3, 10, 50) for r in np.linspace(k + 0.05, 3 * k, 40))
    mono = True
    for k in (3, 10, 50):
        vals = [log_psi(r, k) for r in np.linspace(k + 0.05, 3 * k, 60)]
        mono &= all(a < b for a, b in zip(vals, vals[1:]))
    shape = limiting_shape(2.0) == 0.5
    grid = np.linspace(1.01, 50, 500)
    dec = all(limiting_shape(a) > limiting_shape(b) for a, b in zip(grid, grid[1:]))
    dp = all(check_sum_bounds(s, Ms, k).ok for s, Ms, k in ((10, 35, 3), (20, 70, 3), (15, 80, 4)))
    eps = [extract_epsilon_k(k, default_density(k)) for k in (50, 100, 200)]
    trend = None not in eps and eps[2] < eps[1] < eps[0]
    return [
        CheckResult("bounds", "mu(rho) > rho - k", gap),
        CheckResult("bounds", "psi increasing in rho", mono),
        CheckResult("bounds", "limiting shape", shape and dec),
        CheckResult("bounds", "coefficient sum bounds", dp),
        CheckResult("bounds", "epsilon_k decreasing", trend, str(eps)),
    ]


SUITES: dict[str, Callable] = {
    "kernel": _kernel,
    "thresholds": _thresholds,
    "sequences": _sequences,
    "graphs": _graphs,
    "factors": _factors,
    "bounds": _bounds,
}


def run_suite(name: str = "all", seed: int = 0) -> list[CheckResult]:
    if name != "all" and name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    names = list(SUITES) if name == "all" else [name]
    out = []
    for i, nm in enumerate(names):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        try:
            out.extend(SUITES[nm](rng))
        except Exception as exc:
            out.append(CheckResult(nm, "suite raised", False, f"{type(exc).__name__}: {exc}"))
    return out
