"""Neighborhood and recency heuristics used as reference predictors."""

from __future__ import annotations

import math

import numpy as np
from scipy import sparse

from .prediction import RankedPrediction, candidate_pairs, check_pairs, check_task, ranked
from .temporal_graph import Snapshot, TemporalNetwork, union_graph

BASELINE_KINDS = ("AA", "PA", "AA-all", "PA-all", "LastTime")
NEVER_LINKED = -np.inf


def _undirected(graph: Snapshot, n: int) -> sparse.csr_matrix:
    e = graph.edge_array()
    a = sparse.coo_matrix(
        (np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)
    ).tocsr()
    a = ((a + a.T) > 0).astype(np.float64)
    return a.tocsr()


def _n(graph: Snapshot, *ids) -> int:
    e = graph.edge_array()
    return int(max([e.max() + 1 if len(e) else 0, *[k + 1 for k in ids]]))


def degrees(graph: Snapshot, n: int) -> np.ndarray:
    """Distinct-neighbor counts in the undirected view."""
    return np.asarray(_undirected(graph, n).sum(axis=1)).ravel()


def adamic_adar_scores(graph: Snapshot, pairs, n: int) -> np.ndarray:
    pairs = check_pairs(pairs, n)
    a = _undirected(graph, n)
    deg = np.asarray(a.sum(axis=1)).ravel()
    # neighbors of degree <= 1 cannot be common to two distinct nodes, but guard anyway
    w = np.zeros(n)
    ok = deg > 1
    w[ok] = 1.0 / np.log(deg[ok])
    aw = a @ sparse.diags(w)
    common = (aw[pairs[:, 0]].multiply(a[pairs[:, 1]])).tocsr()
    # fsum rounds correctly, so the result does not depend on summation order
    ptr, data = common.indptr, common.data
    return np.array([math.fsum(data[ptr[k]:ptr[k + 1]]) for k in range(len(pairs))])


def adamic_adar(graph: Snapshot, i: int, j: int, n: int | None = None) -> float:
    if i == j:
        raise ValueError("adamic_adar requires i != j")
    n = n if n is not None else _n(graph, i, j)
    return float(adamic_adar_scores(graph, [[i, j]], n)[0])


def pref_attach_scores(graph: Snapshot, pairs, n: int) -> np.ndarray:
    pairs = check_pairs(pairs, n)
    deg = degrees(graph, n)
    return deg[pairs[:, 0]] * deg[pairs[:, 1]]


def pref_attach(graph: Snapshot, i: int, j: int, n: int | None = None) -> float:
    if i == j:
        raise ValueError("pref_attach requires i != j")
    n = n if n is not None else _n(graph, i, j)
    return float(pref_attach_scores(graph, [[i, j]], n)[0])


def last_link_times(net: TemporalNetwork, t: int) -> np.ndarray:
    """``(n, n)`` matrix of the latest ``s <= t`` with ``G_ijs = 1``."""
    net[t]
    n = net.node_count
    last = np.full((n, n), NEVER_LINKED)
    for s in range(t + 1):
        e = net[s].edge_array()
        last[e[:, 0], e[:, 1]] = s
    return last


def last_time_score(net: TemporalNetwork, t: int, i: int, j: int) -> float:
    return float(last_link_times(net, t)[i, j])


def baseline_scores(
    net: TemporalNetwork,
    t: int,
    pairs,
    task: str,
    kind: str,
    complementary: bool = True,
) -> np.ndarray:
    """Ranking scores of ``kind`` for ``pairs``; higher means more likely.

    With ``complementary`` the dissolution score is the negated raw score.
    """
    check_task(task)
    n = net.node_count
    pairs = check_pairs(pairs, n)
    if kind in ("AA", "PA"):
        graph = net[t]
    elif kind in ("AA-all", "PA-all"):
        graph = union_graph(net, t)
    elif kind != "LastTime":
        raise ValueError(f"unknown baseline {kind!r}; expected one of {BASELINE_KINDS}")
    if kind.startswith("AA"):
        raw = adamic_adar_scores(graph, pairs, n)
    elif kind.startswith("PA"):
        raw = pref_attach_scores(graph, pairs, n)
    else:
        raw = last_link_times(net, t)[pairs[:, 0], pairs[:, 1]]
    raw = raw.astype(np.float64)
    if task == "dissolution" and complementary:
        return -raw
    return raw


def baseline_rank(
    net: TemporalNetwork,
    t: int,
    task: str,
    kind: str,
    complementary: bool = True,
    labels=None,
) -> list[RankedPrediction]:
    pairs = candidate_pairs(net, t, task)
    scores = baseline_scores(net, t, pairs, task, kind, complementary)
    return ranked(pairs, scores, task, labels)
