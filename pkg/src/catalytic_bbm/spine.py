"""Single-particle weighted estimators.

The expectation of a sum over all particles equals a single-particle
expectation weighted by e^(beta * local time). These estimators need
no tree at all, which makes them an independent cross-validation
oracle for the full simulation engine, and host the martingale-mean
checks.
"""

from __future__ import annotations

import math

import numpy as np

from .analytic import Params
from .engine import Snapshot, snapshot_positions_batch
from .sampler import _position_and_localtime_arrays
from .stats import EstimateReport, estimate_report

__all__ = [
    "InsufficientHitsError", "many_to_one_estimate", "martingale_value",
    "single_particle_martingale_check", "rare_event_probability",
]

_CHUNK = 1 << 19


class InsufficientHitsError(RuntimeError):
    """Too few rare-event hits for a usable frequency estimate."""


def _weighted_draws(params: Params, t: float, f, n: int, rng):
    """f(x) * e^(beta * l) over n exact joint draws, in chunks."""
    b = params.beta
    out = np.empty(n)
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        x, l = _position_and_localtime_arrays(float(t), rng, m)
        w = np.exp(b * l)
        assert np.all(w >= 1.0)
        out[done:done + m] = np.asarray(f(x), dtype=float) * w
        done += m
    return out


def many_to_one_estimate(params: Params, t: float, f, n: int, rng,
                         target=None) -> EstimateReport:
    """Unbiased estimate of E[sum over particles of f(position)] from n
    single-particle draws weighted by e^(beta * local time)."""
    if not t > 0:
        raise ValueError("t must be > 0")
    return estimate_report(_weighted_draws(params, t, f, n, rng), target)


def martingale_value(snapshot: Snapshot, params: Params) -> float:
    """Additive-martingale value of one snapshot:
    sum over particles of exp(-beta |x| - beta^2 t / 2).

    Unit mean for a single origin start; a function of |x| only, so it
    is exactly invariant under reflecting every position."""
    b = params.beta
    if len(snapshot) == 0:
        raise ValueError("snapshot holds no particles")
    return float(np.sum(np.exp(-b * np.abs(snapshot.positions)
                               - 0.5 * b * b * snapshot.t)))


def single_particle_martingale_check(params: Params, t: float, n: int,
                                     rng) -> EstimateReport:
    """Mean of exp(-beta |x| + beta l - beta^2 t / 2) over n exact joint
    draws; the target is exactly 1 (unit-mean weight)."""
    if not t > 0:
        raise ValueError("t must be > 0")
    b = params.beta
    out = np.empty(n)
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        x, l = _position_and_localtime_arrays(float(t), rng, m)
        out[done:done + m] = np.exp(-b * np.abs(x) + b * l - 0.5 * b * b * t)
        done += m
    return estimate_report(out, target=1.0)


def rare_event_probability(params: Params, lam: float, t: float, n: int,
                           rng, min_hits: int = 10) -> EstimateReport:
    """Direct Monte Carlo frequency of {at least one particle above
    lam * t} over n full-engine replicates, with binomial standard error.

    Only meaningful in the decaying regime lam > beta / 2; raises
    InsufficientHitsError when fewer than min_hits replicates hit.
    """
    if not lam > params.beta / 2:
        raise ValueError("rare-event regime requires lambda > beta / 2")
    if not t > 0:
        raise ValueError("t must be > 0")
    hits = 0
    done = 0
    chunk = max(1, _CHUNK // max(1, int(4 * math.exp(0.5 * params.beta ** 2 * t))))
    while done < n:
        m = min(chunk, n - done)
        rep, pos = snapshot_positions_batch(params, t, m, rng)
        above = rep[pos > lam * t]
        hits += np.unique(above).size
        done += m
    if hits < min_hits:
        raise InsufficientHitsError(
            f"only {hits} hits in {n} replicates (need >= {min_hits})")
    p = hits / n
    se = math.sqrt(p * (1.0 - p) / n)
    return EstimateReport(estimate=p, std_error=se, n=n)
