"""Estimation summaries, KS/chi-square checks, and rate fitting."""

import json
import math

import numpy as np
import pytest

from catalytic_bbm.rng import RngStream
from catalytic_bbm.stats import (KS_CRITICAL, EstimateReport,
                                 NonPositiveValueError, RateFit,
                                 chi_square_test, estimate_report, fit_rate,
                                 ks_statistic)


def test_estimate_report_basic():
    samples = np.array([1.0, 2.0, 3.0, 4.0])
    rep = estimate_report(samples, target=2.0)
    assert rep.estimate == 2.5
    assert rep.n == 4
    assert rep.std_error == pytest.approx(
        np.std(samples, ddof=1) / 2.0)
    assert rep.z == pytest.approx((2.5 - 2.0) / rep.std_error)
    no_target = estimate_report(samples)
    assert no_target.target is None and no_target.z is None
    doc = json.loads(rep.to_json())
    assert doc["schema"].startswith("catalytic-bbm/")
    assert doc["estimate"] == 2.5


def test_estimate_report_csv_row():
    rep = estimate_report(np.arange(10.0), target=4.5)
    row = rep.csv_row()
    assert len(row.split(",")) == len(EstimateReport.CSV_HEADER.split(","))


def test_ks_statistic_accepts_correct_law():
    rng = RngStream(11, 0).generator()
    u = rng.random(20000)
    d, snd = ks_statistic(u, lambda x: min(max(x, 0.0), 1.0))
    assert snd < KS_CRITICAL
    assert 0.0 < d < 0.02


def test_ks_statistic_rejects_wrong_law():
    rng = RngStream(11, 1).generator()
    u = rng.random(20000) ** 2
    _, snd = ks_statistic(u, lambda x: min(max(x, 0.0), 1.0))
    assert snd > KS_CRITICAL


def test_ks_statistic_guards():
    with pytest.raises(ValueError):
        ks_statistic(np.arange(5), lambda x: x)
    rng = RngStream(11, 2).generator()
    u = rng.random(1000)
    with pytest.raises(ValueError):
        ks_statistic(u, lambda x: -x)  # decreasing probe


def test_fit_rate_exact_on_synthetic_data():
    times = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    values = 3.0 * np.exp(0.7 * times)
    fit = fit_rate(times, values)
    assert fit.slope == pytest.approx(0.7, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-12)
    assert fit.window == (1.0, 5.0)
    assert isinstance(fit, RateFit)


def test_fit_rate_window_restriction():
    times = np.arange(1.0, 11.0)
    values = np.exp(0.5 * times)
    values[:3] = 100.0  # early transient, excluded by window
    fit = fit_rate(times, values, window=(4.0, 10.0))
    assert fit.slope == pytest.approx(0.5, abs=1e-12)
    assert fit.window == (4.0, 10.0)


def test_fit_rate_errors():
    with pytest.raises(NonPositiveValueError):
        fit_rate([1.0, 2.0, 3.0], [1.0, 0.0, 2.0])
    with pytest.raises(ValueError):
        fit_rate([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_rate(np.arange(10.0), np.exp(np.arange(10.0)),
                 window=(20.0, 30.0))


def test_chi_square_accepts_matching_counts():
    rng = RngStream(12, 0).generator()
    n, k = 100000, 10
    obs = np.bincount(rng.integers(0, k, size=n), minlength=k)
    exp = np.full(k, n / k)
    stat, p, dof = chi_square_test(obs, exp)
    assert p > 0.001
    assert dof == k - 1


def test_chi_square_rejects_skewed_counts():
    exp = np.full(10, 1000.0)
    obs = exp.copy()
    obs[0] += 300
    obs[1] -= 300
    _, p, _ = chi_square_test(obs, exp)
    assert p < 1e-6


def test_chi_square_pools_small_cells():
    exp = np.array([500.0, 500.0, 5.0, 5.0, 5.0])
    obs = np.array([500.0, 500.0, 5.0, 5.0, 5.0])
    _, p, dof = chi_square_test(obs, exp, min_expected=20.0)
    # three small cells pool into one
    assert dof == 2
    assert p > 0.999


def test_chi_square_shape_mismatch():
    with pytest.raises(ValueError):
        chi_square_test(np.ones(3), np.ones(4))
