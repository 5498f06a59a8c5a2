"""Exact single-particle samplers for Brownian local-time functionals.

All samplers are exact (no time discretisation): they rest on the
identity in law between the running maximum and the local time at the
origin of a standard Brownian motion, plus the reflection principle.
The discretised path walker at the bottom exists only as an
independent validation oracle for the exact routines.

Samplers take a numpy Generator; given the same generator state they
are bit-reproducible. `size=None` means a scalar draw, otherwise
arrays are returned. Parameters t / e may themselves be arrays, in
which case one draw per element is made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import Params
from .special import std_normal_cdf, std_normal_quantile

__all__ = [
    "PositionLocalTime", "sample_local_time", "sample_branch_threshold",
    "sample_hitting_time", "sample_position_and_localtime",
    "sample_position_given_no_branch", "sample_path_discretized",
    "log_clamp_count",
]

# Guard for log(U): U below this is clamped (probability ~2^-64 per draw).
_LOG_FLOOR = 2.0 ** -64
_log_clamp_count = 0


def log_clamp_count() -> int:
    """Number of uniform draws clamped away from 0 before taking logs."""
    return _log_clamp_count


def _safe_log(u):
    global _log_clamp_count
    clamped = u < _LOG_FLOOR
    n = int(np.count_nonzero(clamped))
    if n:
        _log_clamp_count += n
        u = np.maximum(u, _LOG_FLOOR)
    return np.log(u)


def _uniform_sign(rng, shape):
    # dedicated bit draw so the x -> -x symmetry holds exactly
    return rng.integers(0, 2, size=shape) * 2.0 - 1.0


def sample_local_time(t, rng, size=None):
    """Local time at the origin accumulated by time t: law |N(0, t)|."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be > 0")
    return np.abs(rng.normal(0.0, np.sqrt(t), size=size))


def sample_branch_threshold(params: Params, rng, size=None):
    """Exponential(beta) local-time budget until fission."""
    return rng.exponential(1.0 / params.beta, size=size)


def sample_hitting_time(e, rng, size=None):
    """First time the local time at the origin reaches level e.

    Equal in law to the first passage time of a standard BM to e,
    i.e. e^2 / Z^2 with Z standard normal; CDF t -> 2(1 - Phi(e/sqrt(t))).
    """
    e = np.asarray(e, dtype=float)
    if np.any(e < 0):
        raise ValueError("level e must be >= 0")
    if size is None and e.ndim > 0:
        size = e.shape
    z = rng.standard_normal(size=size)
    with np.errstate(divide="ignore"):
        tau = e * e / (z * z)
    return float(tau) if np.ndim(tau) == 0 else tau


@dataclass(frozen=True)
class PositionLocalTime:
    """Joint draw of endpoint position and accumulated local time."""

    x: float
    l: float


def _position_and_localtime_arrays(t, rng, size):
    b = rng.normal(0.0, math.sqrt(t), size=size)
    u = rng.random(size=size)
    s = 0.5 * (b + np.sqrt(b * b - 2.0 * t * _safe_log(u)))
    # running max given endpoint: S >= max(B, 0) pathwise
    assert np.all(s >= np.maximum(b, 0.0))
    x = _uniform_sign(rng, np.shape(s)) * (s - b)
    return x, s


def sample_position_and_localtime(t, rng, size=None):
    """Exact draw from the joint law of (X_t, L_t) for BM started at 0.

    Draws the endpoint B ~ N(0,t), recovers the running maximum S given
    the endpoint by inverting the reflection-principle CDF, then maps
    (S, S - B) to (L, |X|) and attaches a uniform sign.
    """
    if not t > 0:
        raise ValueError("t must be > 0")
    x, l = _position_and_localtime_arrays(float(t), rng, size)
    if size is None:
        return PositionLocalTime(float(x), float(l))
    return PositionLocalTime(x, l)


def sample_position_given_no_branch(t, e, rng, size=None):
    """Exact draw of X_t conditioned on {L_t < e} (no branch by t).

    Inverse-CDF construction, no rejection:
      (i)  draw l from the half-normal law of L_t truncated to [0, e);
      (ii) given l, draw |x| by inverting
           P(|X| > x | L = l) = exp(-(x^2 + 2 l x) / (2 t));
      (iii) attach a uniform sign.
    """
    t = np.asarray(t, dtype=float)
    e = np.asarray(e, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be > 0")
    if np.any(e <= 0):
        raise ValueError("threshold e must be > 0")
    if size is None and (t.ndim > 0 or e.ndim > 0):
        size = np.broadcast_shapes(t.shape, e.shape)

    sqrt_t = np.sqrt(t)
    cap = 2.0 * std_normal_cdf(e / sqrt_t) - 1.0
    v = rng.random(size=size)
    l = sqrt_t * std_normal_quantile((1.0 + v * cap) / 2.0)
    l = np.minimum(l, np.nextafter(e, 0.0))  # guard quantile round-off
    assert np.all(l < e)

    u = rng.random(size=size)
    x_abs = -l + np.sqrt(l * l - 2.0 * t * _safe_log(u))
    assert np.all(x_abs >= 0.0)
    out = _uniform_sign(rng, np.shape(x_abs)) * x_abs
    return float(out) if size is None else out


def sample_path_discretized(t, dt, rng, eps_scale=1.0):
    """Euler walk with an occupation estimate of local time.

    Validation oracle only: returns (path, l_estimate) where the local
    time is approximated by the time spent in (-eps, eps) over 2 eps
    with eps = eps_scale * sqrt(dt). Converges in law to the exact
    samplers as dt -> 0.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    n = int(round(t / dt))
    steps = rng.normal(0.0, math.sqrt(dt), size=n)
    path = np.concatenate(([0.0], np.cumsum(steps)))
    eps = eps_scale * math.sqrt(dt)
    occupation = np.count_nonzero(np.abs(path[:-1]) < eps) * dt
    return path, occupation / (2.0 * eps)
