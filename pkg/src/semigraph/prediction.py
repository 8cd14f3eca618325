"""Scoring candidate pairs for the next formation and dissolution."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedding import EmbeddingState, hermitian_score, sigmoid
from .temporal_graph import TemporalNetwork

TASKS = ("formation", "dissolution")
PREDICTION_MODES = ("simple", "additive", "subtractive")


def check_task(task: str) -> str:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")
    return task


def check_pairs(pairs, num_nodes: int | None = None) -> np.ndarray:
    """Validate candidate pairs into an ``(m, 2)`` int64 array."""
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim == 1 and arr.shape[0] == 2:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"pairs must have shape (m, 2), got {arr.shape}")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise ValueError("pairs must satisfy i != j")
    if np.any(arr < 0) or (num_nodes is not None and np.any(arr >= num_nodes)):
        raise ValueError("pair index outside node range")
    return arr


def raw_scores(
    state: EmbeddingState, pairs, task: str, mode: str = "additive"
) -> np.ndarray:
    """Pre-sigmoid scores of ``pairs`` for ``task`` under ``mode``."""
    check_task(task)
    if mode not in PREDICTION_MODES:
        raise ValueError(f"unknown prediction mode {mode!r}")
    pairs = check_pairs(pairs, state.num_nodes)
    i, j = pairs[:, 0], pairs[:, 1]
    s_f = hermitian_score(state.v_f[i], state.theta_f, state.v_f[j])
    s_d = hermitian_score(state.v_d[i], state.theta_d, state.v_d[j])
    if mode == "simple":
        return s_f if task == "formation" else s_d
    if mode == "additive":
        return s_f + s_d
    return s_f - s_d if task == "formation" else s_d - s_f


def score_pair(
    state: EmbeddingState, i: int, j: int, task: str, mode: str = "additive"
) -> float:
    if i == j:
        raise ValueError("score_pair requires i != j")
    return float(sigmoid(raw_scores(state, [[i, j]], task, mode)[0]))


def candidate_pairs(net: TemporalNetwork, t: int, task: str) -> np.ndarray:
    """Non-edges of ``G_t`` (formation) or edges of ``G_t`` (dissolution)."""
    check_task(task)
    snap = net[t]
    if task == "dissolution":
        return snap.edge_array()
    free = ~snap.adjacency(net.node_count)
    np.fill_diagonal(free, False)
    return np.argwhere(free).astype(np.int64)


@dataclass(frozen=True)
class RankedPrediction:
    i: int
    j: int
    score: float
    task: str
    label: int | None = None


def rank_order(pairs: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """Indices sorting by score descending, ties by ``(i, j)`` ascending."""
    scores = np.asarray(scores, dtype=np.float64)
    return np.lexsort((pairs[:, 1], pairs[:, 0], -scores))


def ranked(pairs, scores, task: str, labels=None) -> list[RankedPrediction]:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    order = rank_order(pairs, scores)
    out = []
    for k in order:
        lab = None if labels is None else int(labels[k])
        out.append(RankedPrediction(int(pairs[k, 0]), int(pairs[k, 1]), float(scores[k]), task, lab))
    return out


def rank_predictions(
    state: EmbeddingState,
    net: TemporalNetwork,
    t: int,
    task: str,
    mode: str = "additive",
    labels=None,
) -> list[RankedPrediction]:
    if state.num_nodes != net.node_count:
        raise ValueError(
            f"model has {state.num_nodes} nodes but the network has {net.node_count}"
        )
    pairs = candidate_pairs(net, t, task)
    scores = sigmoid(raw_scores(state, pairs, task, mode)) if len(pairs) else np.empty(0)
    return ranked(pairs, np.atleast_1d(scores), task, labels)


def write_predictions_csv(
    preds: Sequence[RankedPrediction],
    path: str | os.PathLike,
    node_labels: Sequence[str] | None = None,
) -> None:
    """``task,i,j,score,label`` rows; ``label`` is empty when unknown."""
    name = (lambda k: node_labels[k]) if node_labels is not None else str
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["task", "i", "j", "score", "label"])
        for p in preds:
            w.writerow([p.task, name(p.i), name(p.j), repr(p.score), "" if p.label is None else p.label])
