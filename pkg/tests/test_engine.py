"""Genealogy growth, decoration, and snapshot statistics."""

import json
import math

import numpy as np
import pytest

from catalytic_bbm.analytic import Params, expected_population
from catalytic_bbm.engine import (CapExceededError, GenealogyTree, SimConfig,
                                  Snapshot, count_above, decorate,
                                  grow_genealogy, leaf_counts_batch,
                                  population_curve, rightmost,
                                  snapshot_positions_batch)
from catalytic_bbm.quadrature import integrate
from catalytic_bbm.rng import RngStream
from catalytic_bbm.special import std_normal_cdf
from catalytic_bbm.stats import estimate_report

PARAMS = Params(1.0)


def _gen(stream, seed=7):
    return RngStream(seed, stream).generator()


def _config(horizon, max_pop=10 ** 6):
    return SimConfig(params=PARAMS, horizon=horizon, max_population=max_pop)


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(params=PARAMS, horizon=-1.0)
    with pytest.raises(ValueError):
        SimConfig(params=PARAMS, horizon=1.0, max_population=0)


def test_single_tree_structure():
    tree = grow_genealogy(_config(4.0), _gen(0))
    n = tree.n_nodes
    assert n >= 1
    assert tree.parent[0] == -1
    assert tree.birth[0] == 0.0
    # each branch event creates exactly two children
    internal = np.flatnonzero(tree.internal)
    for i in internal:
        kids = np.flatnonzero(tree.parent == i)
        assert kids.size == 2
        assert np.all(tree.birth[kids] == tree.branch_time[i])
    # leaves alive at the horizon = 1 + number of branch events
    assert tree.leaves_alive(4.0).size == 1 + internal.size


def test_labels_are_unique_binary_words():
    tree = grow_genealogy(_config(5.0), _gen(1))
    labels = [tree.label(i) for i in range(tree.n_nodes)]
    assert len(set(labels)) == tree.n_nodes
    assert labels[0] == ""  # root carries the empty word
    for lab in labels[1:]:
        assert set(lab) <= {"0", "1"}


def test_population_curve_monotone_and_anchored():
    tree = grow_genealogy(_config(6.0), _gen(2))
    times = np.linspace(0.0, 6.0, 61)
    curve = population_curve(tree, times)
    assert curve[0] == 1
    assert np.all(np.diff(curve) >= 0)
    assert curve[-1] == tree.leaves_alive(6.0).size


def test_mean_population_matches_closed_form():
    t = 4.0
    n = 4000
    counts = leaf_counts_batch(PARAMS, t, n, _gen(3))
    rep = estimate_report(counts, target=expected_population(PARAMS, t))
    assert abs(rep.z) <= 4.0


def test_no_branch_probability_matches_quadrature():
    # P(no branching by t) = int beta e^(-beta e) (2 Phi(e/sqrt(t)) - 1) de
    t = 2.0
    n = 20000
    counts = leaf_counts_batch(PARAMS, t, n, _gen(4))
    frac = np.mean(counts == 1)
    p = integrate(lambda e: math.exp(-e)
                  * (2.0 * std_normal_cdf(e / math.sqrt(t)) - 1.0),
                  0.0, np.inf, tol=1e-10)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(frac - p) < 4 * se


def test_mirrored_children_leave_law_invariant():
    # swapping the two children everywhere consumes the same draws and
    # must give identical birth/branch structure
    a = grow_genealogy(_config(5.0), _gen(5), mirror_children=False)
    b = grow_genealogy(_config(5.0), _gen(5), mirror_children=True)
    assert a.n_nodes == b.n_nodes
    assert np.array_equal(np.sort(a.birth), np.sort(b.birth))
    assert np.array_equal(np.sort(a.branch_time[a.internal]),
                          np.sort(b.branch_time[b.internal]))


def test_decorate_marginal_positions():
    t = 3.0
    snap_pos = []
    for i in range(400):
        rng = _gen(100 + i)
        tree = grow_genealogy(_config(t), rng)
        snap = decorate(tree, t, rng)
        assert len(snap) == tree.leaves_alive(t).size
        snap_pos.extend(snap.positions)
    pos = np.asarray(snap_pos)
    # sign symmetry of the decorated positions
    imbalance = abs(np.mean(pos > 0) - np.mean(pos < 0))
    assert imbalance < 4.0 / math.sqrt(pos.size)


def test_decorate_snapshot_interface():
    rng = _gen(6)
    tree = grow_genealogy(_config(2.0), rng)
    snap = decorate(tree, 1.5, rng)
    assert isinstance(snap, Snapshot)
    assert snap.t == 1.5
    assert len(snap.particles) == len(snap.positions)
    assert rightmost(snap) == snap.positions.max()
    assert count_above(snap, -100.0) == len(snap)
    assert count_above(snap, 100.0) == 0
    doc = json.loads(snap.to_json())
    assert doc["schema"] == "catalytic-bbm/snapshot-v1"


def test_branch_at_observation_time_counts_as_branched():
    # one branch exactly at the observation time: both children alive
    # at distance zero from the origin
    tree = GenealogyTree(
        horizon=2.0,
        birth=np.array([0.0, 1.0, 1.0]),
        threshold=np.array([0.5, 1.0, 1.0]),
        tau=np.array([1.0, np.inf, np.inf]),
        parent=np.array([-1, 0, 0]),
        child_slot=np.array([-1, 0, 1]),
    )
    assert tree.internal.sum() == 1
    assert tree.leaves_alive(1.0).size == 2
    snap = decorate(tree, 1.0, _gen(7))
    assert np.all(snap.positions == 0.0)
    assert population_curve(tree, [1.0])[0] == 2


def test_json_roundtrip():
    tree = grow_genealogy(_config(4.0), _gen(8))
    doc = tree.to_json()
    back = GenealogyTree.from_json(doc)
    assert back.n_nodes == tree.n_nodes
    assert np.allclose(back.birth, tree.birth)
    assert np.allclose(back.threshold, tree.threshold)
    tau_a, tau_b = tree.tau, back.tau
    assert np.array_equal(np.isinf(tau_a), np.isinf(tau_b))
    assert np.allclose(tau_a[np.isfinite(tau_a)], tau_b[np.isfinite(tau_b)])
    assert json.loads(doc)["schema"] == "catalytic-bbm/tree-v1"


def test_population_cap():
    with pytest.raises(CapExceededError) as exc:
        grow_genealogy(_config(30.0, max_pop=8), _gen(9))
    partial = exc.value.partial_tree
    assert partial.cap_exceeded
    assert partial.n_nodes >= 1


def test_batch_cap():
    with pytest.raises(CapExceededError):
        leaf_counts_batch(PARAMS, 30.0, 4, _gen(10), max_population=8)


def test_batch_matches_object_engine_in_distribution():
    t = 3.0
    n = 3000
    batch_counts = leaf_counts_batch(PARAMS, t, n, _gen(11))
    obj_counts = np.array([
        grow_genealogy(_config(t), _gen(500 + i)).leaves_alive(t).size
        for i in range(800)])
    a = estimate_report(batch_counts)
    c = estimate_report(obj_counts.astype(float))
    comb = math.hypot(a.std_error, c.std_error)
    assert abs(a.estimate - c.estimate) <= 4 * comb


def test_snapshot_positions_batch_shape():
    rep, pos = snapshot_positions_batch(PARAMS, 2.0, 50, _gen(12))
    assert rep.shape == pos.shape
    assert rep.min() >= 0 and rep.max() < 50
    # every replicate contributes at least one particle
    assert np.unique(rep).size == 50
