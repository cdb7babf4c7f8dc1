import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from regsub.poisson import h, mean_ratio, upper_tail
from regsub.thresholds import (
    NoRootError,
    core_prediction,
    dk_asymptotic,
    emergence_threshold,
    lambda_for_density,
    expansion_residual,
    mu_for_c,
)


def test_c3_matches_dense_grid_minimum():
    grid = np.arange(1e-5, 20.0, 1e-5)
    # vectorised h_3(mu) = mu / (1 - e^{-mu}(1 + mu))
    vals = grid / (1 - np.exp(-grid) * (1 + grid))
    th = emergence_threshold(3)
    assert abs(th.c_k - vals.min()) < 1e-6
    assert th.c_k == pytest.approx(3.35091887, abs=1e-7)


@pytest.mark.parametrize("k", [3, 4, 5, 8, 13, 21, 34, 50])
def test_threshold_invariants(k):
    th = emergence_threshold(k)
    assert abs(h(k, th.mu_k) - th.c_k) < 1e-9
    assert abs(th.stationarity_residual()) < 1e-8
    assert th.c_k < 3 * k
    assert th.mu_k < th.d_k
    assert th.core_fraction == pytest.approx(upper_tail(k, th.mu_k))
    assert th.d_k <= th.c_k / upper_tail(k - 1, th.mu_k) + 1e-9


def test_mu_exceeds_k_for_large_k():
    # the ordering k < mu_k only sets in from k = 6 on (mu_3 = 2.35)
    assert emergence_threshold(3).mu_k < 3
    for k in range(10, 60, 7):
        assert emergence_threshold(k).mu_k > k


def test_h_unimodal_around_minimiser():
    for k in (3, 7, 20):
        th = emergence_threshold(k)
        left = np.linspace(k / 2, th.mu_k, 500)[:-1]
        right = np.linspace(th.mu_k, 3 * k, 500)[1:]
        assert np.all(np.diff([h(k, x) for x in left]) < 0)
        assert np.all(np.diff([h(k, x) for x in right]) > 0)


@pytest.mark.parametrize("k", [50, 100, 200, 500])
def test_asymptotic_residuals(k):
    th = emergence_threshold(k)
    assert abs(expansion_residual(th.d_k, k)) <= 10
    assert abs(expansion_residual(th.mu_k, k)) <= 10


def test_core_fraction_tends_to_one():
    # f_500(mu_500) = 0.980799 by an independent 50-digit minimisation; the
    # fraction passes 0.99 only near k = 1600
    assert emergence_threshold(500).core_fraction == pytest.approx(0.9807987303803681, rel=1e-9)
    fr = [emergence_threshold(k).core_fraction for k in (50, 200, 500, 2000, 5000)]
    assert all(a < b for a, b in zip(fr, fr[1:]))
    assert fr[-2] > 0.99
    assert dk_asymptotic(500) == pytest.approx(500 + math.sqrt(500 * math.log(500)))


def test_mu_for_c_examples():
    th = emergence_threshold(3)
    assert mu_for_c(th.c_k, 3) == pytest.approx(th.mu_k, abs=1e-12)
    c = th.c_k + 1
    mu = mu_for_c(c, 3)
    assert abs(h(3, mu) - c) < 1e-10
    ref = brentq(lambda x: h(3, x) - c, th.mu_k, 50, xtol=1e-14)
    assert mu == pytest.approx(ref, abs=1e-9)
    with pytest.raises(NoRootError):
        mu_for_c(th.c_k - 0.01, 3)


@given(st.integers(3, 30), st.floats(0.001, 5), st.floats(0.001, 5))
def test_mu_for_c_monotone(k, a, b):
    th = emergence_threshold(k)
    lo, hi = sorted((a, b))
    if hi - lo < 1e-6:
        return
    assert mu_for_c(th.c_k + lo, k, th) < mu_for_c(th.c_k + hi, k, th)


def test_lambda_for_density_examples():
    ref = brentq(lambda x: x - 2 * (1 - math.exp(-x)), 0.5, 3)
    assert lambda_for_density(2.0, 1) == pytest.approx(ref, abs=1e-10)
    assert lambda_for_density(2.0, 1) == pytest.approx(1.594, abs=1e-3)
    lam = lambda_for_density(3.0001, 3)
    assert lam < 1e-2
    assert abs(mean_ratio(3, lam) - 3.0001) < 1e-9
    with pytest.raises(NoRootError):
        lambda_for_density(3.0, 3)


@given(st.integers(0, 60), st.floats(1e-3, 40))
def test_lambda_back_substitution(k, gap):
    d = k + gap
    lam = lambda_for_density(d, k)
    assert mean_ratio(k, lam) == pytest.approx(d, abs=1e-10 * max(1.0, d))


@pytest.mark.parametrize("k", [50, 80, 120])
def test_lambda_between_k_and_d(k):
    d = k + 0.5 * math.sqrt(k * math.log(k))
    for dd in (d, d + 3, 1.5 * d):
        lam = lambda_for_density(dd, k)
        assert k <= lam <= dd


def test_core_prediction_at_threshold():
    th = emergence_threshold(3)
    pred = core_prediction(1000, th.c_k, 3)
    assert pred.vertices / 1000 == pytest.approx(th.core_fraction, rel=1e-12)
    assert abs(pred.average_degree - th.d_k) < 1e-9


@given(st.integers(3, 12), st.floats(0, 10))
def test_core_prediction_average_degree(k, extra):
    th = emergence_threshold(k)
    pred = core_prediction(500, th.c_k + extra, k, th)
    assert pred.average_degree >= k
