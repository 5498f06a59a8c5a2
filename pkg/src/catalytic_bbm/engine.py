"""Event-exact simulation of the catalytic branching Brownian motion.

Two-stage architecture: because every fission happens at the origin,
the genealogy (branch times only) is independent of particle motion.
Stage one grows the branch-event tree from exponential local-time
budgets and exact first-passage times; stage two decorates the leaves
alive at an observation time with positions drawn from the exact
conditional law given survival. Per-time snapshot marginals are exact;
the joint law across several observation times is not preserved.

Trees are stored as flat parallel arrays (parent index + child slot),
with Ulam-Harris labels derived on demand. A batch fast path simulates
many replicates at once with replicate-id arrays; it uses the same
sampler primitives and is what the large Monte Carlo experiments run on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import Params
from .sampler import (sample_branch_threshold, sample_hitting_time,
                      sample_position_given_no_branch)

__all__ = [
    "SimConfig", "GenealogyTree", "Snapshot",
    "CapExceededError", "EmptyPopulationError",
    "grow_genealogy", "decorate", "population_curve", "count_above",
    "rightmost", "leaf_counts_batch", "snapshot_positions_batch",
]

TREE_SCHEMA = "catalytic-bbm/tree-v1"
SNAPSHOT_SCHEMA = "catalytic-bbm/snapshot-v1"

DEFAULT_MAX_POPULATION = 10 ** 6


class CapExceededError(RuntimeError):
    """Population cap breached; carries the partial tree grown so far."""

    def __init__(self, msg, partial_tree=None):
        super().__init__(msg)
        self.partial_tree = partial_tree


class EmptyPopulationError(RuntimeError):
    """No particles in a snapshot. The model has no deaths, so this
    signals internal corruption rather than a reachable state."""


@dataclass(frozen=True)
class SimConfig:
    params: Params
    horizon: float
    observation_times: tuple = ()
    max_population: int = DEFAULT_MAX_POPULATION
    seed: int = 0
    replicates: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon >= 0):
            raise ValueError("horizon must be finite and >= 0")
        if any(t > self.horizon for t in self.observation_times):
            raise ValueError("observation times must not exceed horizon")
        if self.max_population < 1:
            raise ValueError("max_population must be >= 1")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        object.__setattr__(self, "observation_times",
                           tuple(float(t) for t in self.observation_times))


@dataclass
class GenealogyTree:
    """Branch-event tree. Node 0 is the root; children are appended in
    birth order, so parent[i] < i. branch_time = birth + tau for every
    node (known even past the horizon); a node is internal iff its
    branch time is <= horizon."""

    horizon: float
    birth: np.ndarray       # birth time per node
    threshold: np.ndarray   # Exp(beta) local-time budget per node
    tau: np.ndarray         # first-passage time to that budget
    parent: np.ndarray      # parent node index, -1 for the root
    child_slot: np.ndarray  # 0/1 position among siblings, -1 for root
    cap_exceeded: bool = False

    @property
    def n_nodes(self) -> int:
        return self.birth.size

    @property
    def branch_time(self) -> np.ndarray:
        return self.birth + self.tau

    @property
    def internal(self) -> np.ndarray:
        # ties (branch time exactly at the horizon) count as branched
        return self.branch_time <= self.horizon

    def label(self, i: int) -> str:
        """Ulam-Harris label: concatenated child slots from the root."""
        parts = []
        while self.parent[i] >= 0:
            parts.append(str(int(self.child_slot[i])))
            i = int(self.parent[i])
        return "".join(reversed(parts))

    def leaves_alive(self, t: float) -> np.ndarray:
        """Indices of particles alive at time t (branch ties at t count
        as already branched; their children are alive at the origin)."""
        if t > self.horizon:
            raise ValueError("t exceeds tree horizon")
        return np.flatnonzero((self.birth <= t) & (self.branch_time > t))

    def to_json(self) -> str:
        return json.dumps({
            "schema": TREE_SCHEMA,
            "horizon": self.horizon,
            "cap_exceeded": self.cap_exceeded,
            "nodes": [
                {"label": self.label(i),
                 "birth": float(self.birth[i]),
                 "threshold": float(self.threshold[i]),
                 "tau": float(self.tau[i])}
                for i in range(self.n_nodes)
            ],
        })

    @classmethod
    def from_json(cls, text: str) -> "GenealogyTree":
        doc = json.loads(text)
        if doc.get("schema") != TREE_SCHEMA:
            raise ValueError(f"unknown tree schema: {doc.get('schema')!r}")
        nodes = sorted(doc["nodes"], key=lambda n: (len(n["label"]), n["label"]))
        index = {n["label"]: i for i, n in enumerate(nodes)}
        parent = np.full(len(nodes), -1, dtype=np.int64)
        slot = np.full(len(nodes), -1, dtype=np.int8)
        for i, n in enumerate(nodes):
            lab = n["label"]
            if lab:
                parent[i] = index[lab[:-1]]
                slot[i] = int(lab[-1])
        return cls(
            horizon=float(doc["horizon"]),
            birth=np.array([n["birth"] for n in nodes], dtype=float),
            threshold=np.array([n["threshold"] for n in nodes], dtype=float),
            tau=np.array([n["tau"] for n in nodes], dtype=float),
            parent=parent,
            child_slot=slot,
            cap_exceeded=bool(doc.get("cap_exceeded", False)),
        )


@dataclass
class Snapshot:
    """Particle positions at one observation time, tied to a tree."""

    t: float
    node_indices: np.ndarray
    positions: np.ndarray
    tree: GenealogyTree = field(repr=False)

    def __len__(self) -> int:
        return self.positions.size

    @property
    def particles(self):
        """(label, position) pairs; labels are derived lazily."""
        return [(self.tree.label(int(i)), float(x))
                for i, x in zip(self.node_indices, self.positions)]

    def to_json(self) -> str:
        return json.dumps({
            "schema": SNAPSHOT_SCHEMA,
            "t": self.t,
            "particles": [[lab, x] for lab, x in self.particles],
        })


def grow_genealogy(config: SimConfig, rng,
                   mirror_children: bool = False) -> GenealogyTree:
    """Grow the exact branch-event tree up to the horizon.

    Generation by generation: every frontier particle draws its
    Exp(beta) local-time budget and the exact first-passage time to it;
    those branching within the horizon spawn two children at the
    origin. Since there are no deaths the population is non-decreasing,
    so the cap is checked against the running leaf-equivalent count
    (1 + number of branch events).

    mirror_children swaps the child slots (exchangeability probe);
    it consumes the identical draw sequence.
    """
    params, horizon = config.params, config.horizon
    birth = [np.zeros(1)]
    thresholds = []
    taus = []
    parent = [np.full(1, -1, dtype=np.int64)]
    slot = [np.full(1, -1, dtype=np.int8)]

    frontier = np.zeros(1, dtype=np.int64)
    frontier_birth = np.zeros(1)
    n_nodes = 1
    branches = 0
    slots = np.array([1, 0], dtype=np.int8) if mirror_children \
        else np.array([0, 1], dtype=np.int8)

    def build(cap_flag):
        return GenealogyTree(
            horizon=horizon,
            birth=np.concatenate(birth)[:n_nodes],
            threshold=_pad_concat(thresholds, n_nodes),
            tau=_pad_concat(taus, n_nodes),
            parent=np.concatenate(parent)[:n_nodes],
            child_slot=np.concatenate(slot)[:n_nodes],
            cap_exceeded=cap_flag,
        )

    while frontier.size:
        e = sample_branch_threshold(params, rng, size=frontier.size)
        tau = sample_hitting_time(e, rng)
        thresholds.append(e)
        taus.append(tau)
        bt = frontier_birth + tau

        spawn = bt <= horizon
        branches += int(np.count_nonzero(spawn))
        if 1 + branches > config.max_population:
            raise CapExceededError(
                f"alive population would exceed cap {config.max_population}",
                partial_tree=build(True))

        n_children = 2 * int(np.count_nonzero(spawn))
        if n_children == 0:
            break
        child_birth = np.repeat(bt[spawn], 2)
        child_parent = np.repeat(frontier[spawn], 2)
        child_slot = np.tile(slots, n_children // 2)
        birth.append(child_birth)
        parent.append(child_parent)
        slot.append(child_slot)
        frontier = np.arange(n_nodes, n_nodes + n_children, dtype=np.int64)
        frontier_birth = child_birth
        n_nodes += n_children

    return build(False)


def _pad_concat(chunks, n):
    out = np.concatenate(chunks) if chunks else np.zeros(0)
    if out.size < n:  # only on cap abort mid-generation
        out = np.concatenate([out, np.full(n - out.size, np.nan)])
    return out[:n]


def decorate(tree: GenealogyTree, t_obs: float, rng) -> Snapshot:
    """Attach positions to the leaves alive at t_obs.

    Each leaf alive for dt = t_obs - birth is drawn from the exact law
    of X_dt conditioned on its local time staying below its own
    threshold. Leaves born exactly at t_obs sit at the origin.
    """
    leaves = tree.leaves_alive(t_obs)
    dt = t_obs - tree.birth[leaves]
    e = tree.threshold[leaves]
    positions = np.zeros(leaves.size)
    live = dt > 0
    if live.any():
        positions[live] = sample_position_given_no_branch(
            dt[live], e[live], rng)
    return Snapshot(t=float(t_obs), node_indices=leaves,
                    positions=positions, tree=tree)


def population_curve(tree: GenealogyTree, times) -> np.ndarray:
    """Exact |N_s| at each requested time, from branch times alone."""
    times = np.asarray(times, dtype=float)
    if np.any(times > tree.horizon):
        raise ValueError("times must not exceed tree horizon")
    bt = np.sort(tree.branch_time[tree.internal])
    return 1 + np.searchsorted(bt, times, side="right")


def count_above(snapshot: Snapshot, lam: float) -> int:
    """Number of particles strictly above lam * t."""
    return int(np.count_nonzero(snapshot.positions > lam * snapshot.t))


def rightmost(snapshot: Snapshot) -> float:
    """Maximum particle position in the snapshot."""
    if len(snapshot) == 0:
        raise EmptyPopulationError("snapshot holds no particles")
    return float(np.max(snapshot.positions))


# ---------------------------------------------------------------------------
# Batch fast path: many replicates at once, replicate-id arrays.

def _batch_leaves(params: Params, horizon: float, n_rep: int, rng,
                  max_population: int = DEFAULT_MAX_POPULATION):
    """Grow n_rep independent genealogies simultaneously.

    Returns (rep, birth, threshold) arrays over all leaves alive at the
    horizon, plus (branch_rep, branch_times) over all branch events.
    Same draw primitives as grow_genealogy, vectorised across replicates.
    """
    rep = np.arange(n_rep, dtype=np.int64)
    born = np.zeros(n_rep)
    leaf_rep, leaf_birth, leaf_e = [], [], []
    br_rep, br_time = [], []
    branch_counts = np.zeros(n_rep, dtype=np.int64)

    while rep.size:
        e = sample_branch_threshold(params, rng, size=rep.size)
        tau = sample_hitting_time(e, rng)
        bt = born + tau
        spawn = bt <= horizon

        done = ~spawn
        leaf_rep.append(rep[done])
        leaf_birth.append(born[done])
        leaf_e.append(e[done])

        if spawn.any():
            r, t = rep[spawn], bt[spawn]
            br_rep.append(r)
            br_time.append(t)
            branch_counts += np.bincount(r, minlength=n_rep)
            if np.max(branch_counts) + 1 > max_population:
                raise CapExceededError(
                    f"a replicate exceeded the population cap {max_population}")
            rep = np.repeat(r, 2)
            born = np.repeat(t, 2)
        else:
            break

    cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0)
    return (cat(leaf_rep).astype(np.int64), cat(leaf_birth), cat(leaf_e),
            cat(br_rep).astype(np.int64), cat(br_time))


def leaf_counts_batch(params: Params, t: float, n_rep: int, rng,
                      max_population: int = DEFAULT_MAX_POPULATION):
    """|N_t| for n_rep independent replicates (no position sampling)."""
    rep, _, _, _, _ = _batch_leaves(params, t, n_rep, rng, max_population)
    return np.bincount(rep, minlength=n_rep)


def snapshot_positions_batch(params: Params, t: float, n_rep: int, rng,
                             max_population: int = DEFAULT_MAX_POPULATION):
    """Positions of all particles alive at t across n_rep replicates.

    Returns (rep, positions): flat arrays, one entry per particle.
    """
    rep, birth, e, _, _ = _batch_leaves(params, t, n_rep, rng, max_population)
    dt = t - birth
    positions = np.zeros(rep.size)
    live = dt > 0
    if live.any():
        positions[live] = sample_position_given_no_branch(
            dt[live], e[live], rng)
    return rep, positions
