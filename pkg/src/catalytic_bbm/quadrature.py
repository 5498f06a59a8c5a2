"""Adaptive quadrature helpers used as numerical oracles.

Thin wrapper over QUADPACK's adaptive Gauss-Kronrod scheme
(scipy.integrate.quad) with an absolute-tolerance contract: if the
reported error estimate exceeds the requested tolerance a
QuadratureError is raised instead of silently returning a bad value.
Infinite endpoints are handled by QUADPACK's built-in variable
substitution; callers can pass interior breakpoints for integrands
with kinks or jumps.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate as _integrate


class QuadratureError(RuntimeError):
    """Quadrature failed to converge to the requested tolerance."""


def integrate(f, a=-np.inf, b=np.inf, tol=1e-10, points=None, limit=300):
    """Integrate f over (a, b) to absolute tolerance tol.

    points: optional interior breakpoints (kinks/discontinuities);
    the interval is split there and each piece integrated separately.
    """
    if not a < b:
        raise ValueError("require a < b")
    cuts = [a]
    if points is not None:
        cuts.extend(p for p in sorted(points) if a < p < b)
    elif a == -np.inf and b == np.inf:
        cuts.append(0.0)
    cuts.append(b)

    nseg = len(cuts) - 1
    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            val, e = _integrate.quad(f, lo, hi, epsabs=tol / nseg,
                                     epsrel=1e-12, limit=limit)
            total += val
            err += e
    if err > tol:
        raise QuadratureError(
            f"error estimate {err:.3e} exceeds tolerance {tol:.3e}")
    return total


def integrate_2d(f, x0, x1, y0, y1, tol=1e-8):
    """Integrate f(x, y) over the rectangle [x0,x1] x [y0,y1]."""
    inner_tol = tol / max(10.0, abs(x1 - x0))

    def outer(x):
        return integrate(lambda y: f(x, y), y0, y1, tol=inner_tol)

    return integrate(outer, x0, x1, tol=tol)
