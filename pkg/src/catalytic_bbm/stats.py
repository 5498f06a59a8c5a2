"""Estimator aggregation and goodness-of-fit checks.

Monte Carlo means with standard errors, a one-sample
Kolmogorov-Smirnov statistic, exponential growth-rate fits, chi-square
comparison against target bin probabilities, and the empirical
functionals appearing in the long-run population limits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.stats import chi2 as _chi2

from .analytic import Params
from .engine import Snapshot

__all__ = [
    "EstimateReport", "RateFit", "NonPositiveValueError",
    "estimate_report", "ks_statistic", "fit_rate",
    "empirical_slln_ratio", "empirical_scaled_sum", "chi_square_test",
]

REPORT_SCHEMA = "catalytic-bbm/report-v1"

# sqrt(n) * D below this is accepted at roughly the 0.001 level
KS_CRITICAL = 1.95


class NonPositiveValueError(ValueError):
    """A value that must be positive (for a log fit) was not."""


@dataclass(frozen=True)
class EstimateReport:
    """Monte Carlo estimate with standard error and optional target."""

    estimate: float
    std_error: float
    n: int
    target: float | None = None
    z: float | None = None

    def to_json(self) -> str:
        doc = {"schema": REPORT_SCHEMA}
        doc.update(asdict(self))
        return json.dumps(doc)

    def csv_row(self) -> str:
        fmt = lambda v: "" if v is None else repr(v)
        return f"{self.estimate!r},{self.std_error!r},{self.n}," \
               f"{fmt(self.target)},{fmt(self.z)}"

    CSV_HEADER = "estimate,std_error,n,target,z"


def estimate_report(samples, target=None) -> EstimateReport:
    """Mean / standard-error report for a sample array."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    mean = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    z = None
    if target is not None:
        z = (mean - target) / se if se > 0 else math.inf * np.sign(mean - target) if mean != target else 0.0
        z = float(z)
    return EstimateReport(estimate=mean, std_error=se, n=n,
                          target=None if target is None else float(target),
                          z=z)


@dataclass(frozen=True)
class RateFit:
    """Least-squares exponential rate over a time window."""

    slope: float
    intercept: float
    residual_rms: float
    window: tuple

    def to_json(self) -> str:
        doc = {"schema": REPORT_SCHEMA}
        doc.update(asdict(self))
        return json.dumps(doc)


def ks_statistic(samples, cdf):
    """One-sample Kolmogorov-Smirnov sup-distance against cdf.

    Returns (D, sqrt(n) * D). The cdf is probed on a sorted grid of
    sample points and must be non-decreasing there.
    """
    samples = np.sort(np.asarray(samples, dtype=float))
    n = samples.size
    if n < 10:
        raise ValueError("need at least 10 samples")
    probe = samples[:: max(1, n // 100)]
    fp = np.asarray([cdf(x) for x in probe], dtype=float)
    if np.any(np.diff(fp) < -1e-12):
        raise ValueError("cdf probe is not monotone on the sample range")
    f = np.asarray([cdf(x) for x in samples], dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    return d, d * math.sqrt(n)


def fit_rate(times, values, window=None) -> RateFit:
    """Least-squares slope of log(values) against times.

    values must be strictly positive; window = (lo, hi) optionally
    restricts the fit to times in [lo, hi].
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        keep = (times >= window[0]) & (times <= window[1])
        times, values = times[keep], values[keep]
    if times.size < 3:
        raise ValueError("need at least 3 points for a rate fit")
    if np.any(values <= 0):
        raise NonPositiveValueError("values must be > 0 for a log fit")
    logs = np.log(values)
    slope, intercept = np.polyfit(times, logs, 1)
    resid = logs - (slope * times + intercept)
    return RateFit(slope=float(slope), intercept=float(intercept),
                   residual_rms=float(np.sqrt(np.mean(resid ** 2))),
                   window=(float(times.min()), float(times.max())))


def empirical_slln_ratio(snapshot: Snapshot, f) -> float:
    """Population average of f over one snapshot: sum f(x_u) / |N_t|."""
    if len(snapshot) == 0:
        raise ValueError("snapshot holds no particles")
    vals = np.asarray(f(snapshot.positions), dtype=float)
    return float(np.mean(vals))


def empirical_scaled_sum(snapshot: Snapshot, params: Params, f) -> float:
    """Exponentially discounted particle sum:
    e^(-beta^2 t / 2) * sum f(x_u)."""
    if len(snapshot) == 0:
        raise ValueError("snapshot holds no particles")
    b = params.beta
    vals = np.asarray(f(snapshot.positions), dtype=float)
    return float(math.exp(-0.5 * b * b * snapshot.t) * np.sum(vals))


def chi_square_test(observed, expected, min_expected=20.0):
    """Pearson chi-square of observed counts against expected counts.

    Cells with expected count below min_expected are pooled into one
    cell so the asymptotic distribution is trustworthy. Returns
    (statistic, p_value, dof).
    """
    observed = np.asarray(observed, dtype=float).ravel()
    expected = np.asarray(expected, dtype=float).ravel()
    if observed.shape != expected.shape:
        raise ValueError("observed and expected must have the same shape")
    small = expected < min_expected
    obs = list(observed[~small])
    exp = list(expected[~small])
    if small.any():
        obs.append(observed[small].sum())
        exp.append(expected[small].sum())
    obs, exp = np.asarray(obs), np.asarray(exp)
    if np.any(exp <= 0):
        raise ValueError("expected counts must be positive after pooling")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = obs.size - 1
    return stat, float(_chi2.sf(stat, dof)), dof
