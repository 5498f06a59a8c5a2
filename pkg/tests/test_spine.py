"""Single-particle weighted estimators and martingale diagnostics."""

import math

import numpy as np
import pytest

from catalytic_bbm.analytic import Params, expected_population
from catalytic_bbm.engine import Snapshot, grow_genealogy, decorate, SimConfig
from catalytic_bbm.rng import RngStream
from catalytic_bbm.spine import (InsufficientHitsError, many_to_one_estimate,
                                 martingale_value, rare_event_probability,
                                 single_particle_martingale_check)

PARAMS = Params(1.0)


def _gen(stream):
    return RngStream(99, stream).generator()


def test_many_to_one_matches_expected_population():
    t = 2.0
    rep = many_to_one_estimate(PARAMS, t, lambda x: np.ones_like(x),
                               200000, _gen(0),
                               target=expected_population(PARAMS, t))
    assert abs(rep.z) <= 4.0


def test_many_to_one_even_function_symmetry():
    # an even f gives the same estimate when positions are reflected,
    # so two independent runs should agree within combined error
    t = 1.5
    f = lambda x: np.abs(x)
    a = many_to_one_estimate(PARAMS, t, f, 100000, _gen(1))
    b = many_to_one_estimate(PARAMS, t, f, 100000, _gen(2))
    comb = math.hypot(a.std_error, b.std_error)
    assert abs(a.estimate - b.estimate) <= 4 * comb


def test_many_to_one_validation():
    with pytest.raises(ValueError):
        many_to_one_estimate(PARAMS, 0.0, lambda x: x, 100, _gen(3))


def test_single_particle_martingale_check():
    rep = single_particle_martingale_check(PARAMS, 3.0, 200000, _gen(4))
    assert rep.target == 1.0
    assert abs(rep.z) <= 4.0


def test_martingale_value_reflection_invariant():
    rng = _gen(5)
    tree = grow_genealogy(SimConfig(params=PARAMS, horizon=2.0), rng)
    snap = decorate(tree, 2.0, rng)
    v = martingale_value(snap, PARAMS)
    flipped = Snapshot(t=snap.t, node_indices=snap.node_indices,
                       positions=-snap.positions, tree=snap.tree)
    assert martingale_value(flipped, PARAMS) == pytest.approx(v, rel=1e-14)
    assert v > 0


def test_martingale_unit_mean():
    vals = []
    for i in range(2000):
        rng = _gen(1000 + i)
        tree = grow_genealogy(SimConfig(params=PARAMS, horizon=1.0), rng)
        vals.append(martingale_value(decorate(tree, 1.0, rng), PARAMS))
    vals = np.asarray(vals)
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - 1.0) <= 4 * se


def test_rare_event_probability_basic():
    rep = rare_event_probability(PARAMS, 0.8, 4.0, 20000, _gen(6))
    assert 0.0 < rep.estimate < 1.0
    # binomial standard error
    p, n = rep.estimate, rep.n
    assert rep.std_error == pytest.approx(math.sqrt(p * (1 - p) / n),
                                          rel=1e-12)


def test_rare_event_regime_validation():
    with pytest.raises(ValueError):
        rare_event_probability(PARAMS, 0.5, 4.0, 100, _gen(7))
    with pytest.raises(ValueError):
        rare_event_probability(PARAMS, 0.8, 0.0, 100, _gen(8))


def test_rare_event_insufficient_hits():
    # lam far out: essentially no hits in a tiny run
    with pytest.raises(InsufficientHitsError):
        rare_event_probability(PARAMS, 5.0, 4.0, 200, _gen(9))
