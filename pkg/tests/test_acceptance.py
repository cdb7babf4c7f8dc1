"""Acceptance criteria 1-11, one test each.

Every criterion prints a PASS/FAIL line (also repeated in the pytest terminal
summary).  Run on its own with ``pytest tests/test_acceptance.py -v`` or as a
script: ``python3 tests/test_acceptance.py``.
"""

import math
import time
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from regsub.bounds import (
    check_sum_bounds,
    default_density,
    extract_epsilon_k,
    limiting_shape,
    log_psi,
    mu_of_rho,
)
from regsub.degree_sequences import sample_sequences
from regsub.experiments import DEFAULT_DP_SUITE, ExperimentConfig, run_experiment
from regsub.factors import find_k_regular, has_k_factor, hitting_time
from regsub.graphs import process_trace, sample_gnp
from regsub.oracles import (
    first_cycle_step,
    log_upper_tail_mp,
    multi_law,
    regular_subgraph_sizes,
    upper_tail_mp,
)
from regsub.poisson import log_upper_tail, upper_tail
from regsub.thresholds import emergence_threshold, expansion_residual, mu_for_c

RESULTS: list[str] = []


def record(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} ({detail})"
    print(line)
    RESULTS.append(line)
    assert ok, line


def test_criterion_01_kernel():
    rng = np.random.default_rng(1)
    ks = rng.integers(0, 2001, size=1000)
    # keep k + 2000 far above mu so the 2000-term oracle sum is complete
    mus = np.array([rng.uniform(1e-3, min(2000.0, k + 1500.0)) for k in ks])
    t0 = time.perf_counter()
    ours = [(upper_tail(int(k), float(m)), log_upper_tail(int(k), float(m)))
            for k, m in zip(ks, mus)]
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for (val, logval), k, m in zip(ours, ks, mus):
        ref = upper_tail_mp(int(k), float(m))
        if ref > 1e-300:
            err = abs(val - ref) / ref
        else:  # below double range: relative error of f is the error of log f
            err = abs(logval - log_upper_tail_mp(int(k), float(m)))
        worst = max(worst, err)
    record(1, "upper_tail vs 2000-term extended-precision sum",
           worst <= 1e-10 and elapsed < 5,
           f"max rel err {worst:.2e} on 1000 points, kernel time {elapsed:.2f}s")


def test_criterion_02_thresholds():
    t0 = time.perf_counter()
    ths = [emergence_threshold(k) for k in range(3, 51)]
    stat = max(abs(t.stationarity_residual()) for t in ths)
    below = all(t.c_k < 3 * t.k for t in ths)
    incr = all(a.c_k < b.c_k for a, b in zip(ths, ths[1:]))
    resid = {k: expansion_residual(emergence_threshold(k).d_k, k) for k in (50, 100, 200, 500)}
    elapsed = time.perf_counter() - t0
    ok = stat <= 1e-8 and below and incr and all(abs(r) <= 10 for r in resid.values())
    record(2, "threshold consistency", ok and elapsed < 10,
           f"stationarity {stat:.1e}, c_k<3k {below}, increasing {incr}, "
           f"residuals {', '.join(f'{k}:{r:.2f}' for k, r in resid.items())}, {elapsed:.2f}s")


def test_criterion_03_core_size():
    n, k = 100_000, 3
    th = emergence_threshold(k)
    c = th.c_k + 0.2
    t0 = time.perf_counter()
    res = run_experiment(ExperimentConfig("E1", n=n, k=k, c=c, trials=50, seed=0))
    elapsed = time.perf_counter() - t0
    mu = mu_for_c(c, k, th)
    frac_th = upper_tail(k, mu)
    edges_th = 0.5 * mu * upper_tail(k - 1, mu) * n
    frac = res.summary["core_fraction_mean"]
    edges = res.summary["core_edges_mean"]
    ok = abs(frac - frac_th) <= 0.01 and abs(edges / edges_th - 1) <= 0.01
    record(3, "k-core size in G(n, c/n)", ok and elapsed < 120,
           f"fraction {frac:.4f} vs {frac_th:.4f}, edges {edges:.0f} vs {edges_th:.0f}, "
           f"{elapsed:.1f}s")


def test_criterion_04_simple_probability():
    n, trials = 10_000, 2000
    t0 = time.perf_counter()
    res = run_experiment(ExperimentConfig("E4", n=n, k=3, M=3 * n, trials=trials, seed=0))
    elapsed = time.perf_counter() - t0
    p = math.exp(-2)
    frac = res.summary["simple_fraction"]
    z = (frac - p) / math.sqrt(p * (1 - p) / trials)
    record(4, "simple probability of cubic pairings", abs(z) <= 3 and elapsed < 60,
           f"simple fraction {frac:.4f} vs e^-2 = {p:.4f}, z = {z:.2f}, {elapsed:.1f}s")


def test_criterion_05_sequence_sampler():
    n, M, k, draws = 4, 14, 3, 10**6
    t0 = time.perf_counter()
    rows = sample_sequences(n, M, k, np.random.default_rng(5), draws)
    elapsed = time.perf_counter() - t0
    law = multi_law(n, M, k)
    keys = list(law)
    counts = Counter(map(tuple, rows.tolist()))
    ok_support = set(counts) <= set(keys)
    obs = np.array([counts.get(key, 0) for key in keys])
    exp = np.array([law[key] for key in keys]) * draws
    p = sps.chisquare(obs, exp).pvalue
    record(5, "Multi(4, 14, 3) sampler chi-square", ok_support and p > 0.01 and elapsed < 30,
           f"p = {p:.3f} over {len(keys)} sequences, {elapsed:.1f}s")


def test_criterion_06_factor_oracle():
    rng = np.random.default_rng(6)
    bad = []
    t0 = time.perf_counter()
    for i in range(1000):
        n = int(rng.integers(1, 9))
        g = sample_gnp(n, float(rng.uniform(0.2, 1.0)), rng)
        for k in (1, 2, 3):
            sizes = regular_subgraph_sizes(g, k)
            w = has_k_factor(g, k)
            x = find_k_regular(g, k, "exact")
            if (w is not None) != (n in sizes) or (w is not None and not w.check(g, k)):
                bad.append((i, k, "factor"))
            if (x.size if x else None) != (max(sizes) if sizes else None) or \
                    (x is not None and not x.check(g, k)):
                bad.append((i, k, "exact"))
    elapsed = time.perf_counter() - t0
    record(6, "k-factor and exact search vs edge-subset enumeration",
           not bad and elapsed < 120, f"{len(bad)} disagreements on 1000 graphs, {elapsed:.1f}s")


def test_criterion_07_hitting_time():
    n = 1000
    t0 = time.perf_counter()
    m1_ok = m2_ok = 0
    for i in range(100):
        tr = process_trace(n, np.random.default_rng(np.random.SeedSequence([7, i])))
        m1_ok += hitting_time(tr, 1).m_upper == 1
        m2_ok += hitting_time(tr, 2).m_upper == first_cycle_step(tr)
    elapsed = time.perf_counter() - t0
    record(7, "m_1 = 1 and m_2 = first cycle", m1_ok == 100 and m2_ok == 100 and elapsed < 30,
           f"m_1 {m1_ok}/100, m_2 {m2_ok}/100, {elapsed:.1f}s")


def test_criterion_08_property_b():
    t0 = time.perf_counter()
    a = run_experiment(ExperimentConfig("E3", n=10_000, k=3, M=35_000, trials=200, seed=8))
    b = run_experiment(ExperimentConfig("E3", n=20_000, k=3, M=70_000, trials=200, seed=8))
    elapsed = time.perf_counter() - t0
    diff, se = a.summary["diff_mean"], a.summary["diff_se"]
    ratio = b.summary["count_mean"] / a.summary["count_mean"]
    ok = abs(diff) <= 3 * se and 1.7 <= ratio <= 2.3
    record(8, "property-B count vs its expectation", ok and elapsed < 120,
           f"mean {a.summary['count_mean']:.1f} vs {a.summary['expected_mean']:.1f} "
           f"(diff {diff:.2f} +- {se:.2f}), ratio at 2n {ratio:.3f}, {elapsed:.1f}s")


def test_criterion_09_analytics():
    t0 = time.perf_counter()
    gap = mono = True
    for k in (3, 10, 50):
        grid = np.linspace(k + 1e-3, 3 * k, 500)
        gap &= all(mu_of_rho(r, k) > r - k for r in grid)
        vals = [log_psi(r, k) for r in grid]
        mono &= bool(np.all(np.diff(vals) > 0))
    exact_half = limiting_shape(2.0) == 0.5
    grid = np.linspace(1 + 1e-4, 50, 10_000)
    dec = bool(np.all(np.diff([limiting_shape(x) for x in grid]) < 0))
    suite = list(DEFAULT_DP_SUITE) + [(s, math.ceil(1.1 * 3 * s), 3) for s in range(10, 101, 10)]
    reps = [check_sum_bounds(*t) for t in suite]
    dp = all(r.lower_ok and r.shifted_ok and r.window_ok for r in reps)
    ratios = [r.scaled_ratio for r in reps]
    elapsed = time.perf_counter() - t0
    ok = gap and mono and exact_half and dec and dp and elapsed < 60
    record(9, "first-moment analytics", ok,
           f"gap {gap}, psi increasing {mono}, shape(2) = 0.5 {exact_half}, decreasing {dec}, "
           f"{len(suite)} DP triples ok {dp}, ratio range [{min(ratios):.3f}, {max(ratios):.3f}], "
           f"{elapsed:.1f}s")


def test_criterion_10_epsilon_trend():
    t0 = time.perf_counter()
    eps = {k: extract_epsilon_k(k, default_density(k), sigma=0.01, c_const=1.0)
           for k in (50, 100, 200)}
    elapsed = time.perf_counter() - t0
    ok = None not in eps.values() and eps[200] < eps[100] < eps[50]
    record(10, "epsilon_k decreases in k", ok and elapsed < 60,
           f"eps_50 {eps[50]}, eps_100 {eps[100]}, eps_200 {eps[200]}, {elapsed:.1f}s")


DETERMINISM = [
    ExperimentConfig("E1", n=20_000, c=3.6, trials=5, seed=11),
    ExperimentConfig("E2", n=300, k=3, trials=3, seed=11),
    ExperimentConfig("E2", n=16, k=3, trials=3, seed=11, mode="exact"),
    ExperimentConfig("E3", n=10_000, M=35_000, trials=10, seed=11),
    ExperimentConfig("E4", n=10_000, M=30_000, trials=50, seed=11),
    ExperimentConfig("E5", params={"ks": [50, 100, 200]}),
    ExperimentConfig("E6"),
]


def test_criterion_11_determinism():
    same = []
    for cfg in DETERMINISM:
        one = run_experiment(cfg).csv_text().encode()
        two = run_experiment(cfg).csv_text().encode()
        same.append(one == two)
    label = ", ".join(f"{c.experiment}{'/' + c.mode if c.mode == 'exact' else ''}:"
                      f"{'same' if s else 'DIFF'}" for c, s in zip(DETERMINISM, same))
    record(11, "byte-identical CSV on replay", all(same), label)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
