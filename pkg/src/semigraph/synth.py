"""Planted-partition networks that evolve by activity-driven rewiring.

Every node carries a hidden activity level drawn from a unit-mean Gamma
distribution. Activity scales the initial link probabilities (a
degree-corrected planted partition), picks the endpoints of new links and
sets the hazard with which existing links dissolve. With
``activity_dispersion = 0`` all nodes are alike and the model reduces to a
plain planted partition with uniform dissolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .temporal_graph import Snapshot, TemporalNetwork


class SynthConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters.

    ``rewire_rate`` is the fraction of links dissolved per step; the same
    number of new links is formed. ``churn_asymmetry`` is the probability that
    a new link stays inside its source's community. ``activity_dispersion`` is
    the coefficient of variation of node activity and ``hazard_exponent``
    controls how sharply dissolution concentrates on links between active
    nodes.
    """

    num_nodes: int = 200
    num_communities: int = 4
    snapshots: int = 8
    p_in: float = 0.08
    p_out: float = 0.01
    rewire_rate: float = 0.15
    churn_asymmetry: float = 0.8
    activity_dispersion: float = 1.5
    hazard_exponent: float = 1.5
    seed: int = 0

    def __post_init__(self):
        for name in ("p_in", "p_out", "churn_asymmetry"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SynthConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 < self.rewire_rate < 1.0:
            raise SynthConfigError("rewire_rate must lie in (0, 1)")
        if self.snapshots < 3:
            raise SynthConfigError("snapshots must be >= 3")
        if self.num_communities < 1 or self.num_nodes < 2 * self.num_communities:
            raise SynthConfigError("need at least two nodes per community")
        if self.activity_dispersion < 0 or self.hazard_exponent < 0:
            raise SynthConfigError("activity_dispersion and hazard_exponent must be >= 0")
        if self.expected_initial_edges() < 1.0:
            raise SynthConfigError(
                f"expected initial edge count {self.expected_initial_edges():.3g} < 1"
            )

    def communities(self) -> np.ndarray:
        """Contiguous, near-equal community blocks."""
        return np.arange(self.num_nodes) * self.num_communities // self.num_nodes

    def expected_initial_edges(self) -> float:
        # activity has unit mean, so it leaves this expectation unchanged
        sizes = np.bincount(self.communities(), minlength=self.num_communities)
        within = float((sizes * (sizes - 1)).sum())
        total = self.num_nodes * (self.num_nodes - 1)
        return self.p_in * within + self.p_out * (total - within)


def _activity(cfg: SynthConfig, rng) -> np.ndarray:
    if cfg.activity_dispersion == 0:
        return np.ones(cfg.num_nodes)
    shape = 1.0 / cfg.activity_dispersion**2
    return rng.gamma(shape, 1.0 / shape, size=cfg.num_nodes)


def _initial_adjacency(cfg: SynthConfig, comm, act, rng) -> np.ndarray:
    same = comm[:, None] == comm[None, :]
    prob = np.where(same, cfg.p_in, cfg.p_out) * np.outer(act, act)
    adj = rng.random(prob.shape) < np.clip(prob, 0.0, 1.0)
    np.fill_diagonal(adj, False)
    return adj


def _step(adj: np.ndarray, cfg: SynthConfig, comm, act, rng):
    """One rewiring step; returns the new adjacency plus formed/dissolved sets."""
    n = cfg.num_nodes
    edges = np.argwhere(adj)
    m = min(max(1, int(round(cfg.rewire_rate * len(edges)))), len(edges))
    hazard = (act[edges[:, 0]] * act[edges[:, 1]]) ** cfg.hazard_exponent
    drop = edges[rng.choice(len(edges), size=m, replace=False, p=hazard / hazard.sum())]

    taken = adj.copy()
    np.fill_diagonal(taken, True)
    src_p = act / act.sum()
    formed = []
    for _ in range(100 * m):
        if len(formed) == m:
            break
        i = int(rng.choice(n, p=src_p))
        inside = comm == comm[i] if rng.random() < cfg.churn_asymmetry else comm != comm[i]
        cand = np.flatnonzero(inside & ~taken[i])
        if len(cand) == 0:
            continue
        w = act[cand]
        j = int(cand[rng.choice(len(cand), p=w / w.sum())])
        taken[i, j] = True
        formed.append((i, j))

    nxt = adj.copy()
    nxt[drop[:, 0], drop[:, 1]] = False
    for i, j in formed:
        nxt[i, j] = True
    return nxt, set(formed), {(int(i), int(j)) for i, j in drop}


def _edge_set(adj: np.ndarray) -> frozenset:
    return frozenset((int(i), int(j)) for i, j in np.argwhere(adj))


def generate(cfg: SynthConfig, *, return_truth: bool = False):
    """Draw a :class:`TemporalNetwork`; deterministic in ``cfg.seed``.

    With ``return_truth`` also returns a dict holding the community labels,
    node activities and the per-step formed and dissolved edge sets.
    """
    rng = np.random.default_rng(cfg.seed)
    comm = cfg.communities()
    act = _activity(cfg, rng)
    for _ in range(100):
        adj = _initial_adjacency(cfg, comm, act, rng)
        if adj.sum() >= 2:
            break
    else:
        raise SynthConfigError("could not draw a non-trivial initial graph")

    snaps = [Snapshot(0, _edge_set(adj))]
    formed_log, dissolved_log = [], []
    for t in range(1, cfg.snapshots):
        for _ in range(100):
            nxt, formed, dissolved = _step(adj, cfg, comm, act, rng)
            if formed and dissolved:
                break
        else:
            raise SynthConfigError(f"step {t} produced a degenerate transition")
        adj = nxt
        formed_log.append(formed)
        dissolved_log.append(dissolved)
        snaps.append(Snapshot(t, _edge_set(adj)))
    net = TemporalNetwork(tuple(snaps), cfg.num_nodes)
    if return_truth:
        truth = {
            "communities": comm,
            "activity": act,
            "formed": formed_log,
            "dissolved": dissolved_log,
        }
        return net, truth
    return net
