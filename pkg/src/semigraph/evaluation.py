"""Next-transition prediction tasks and rank-based AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .prediction import candidate_pairs, check_task
from .temporal_graph import TemporalNetwork, derive_transition


class DegenerateTaskError(ValueError):
    """An evaluation task with only one label class."""


@dataclass(frozen=True)
class EvalTask:
    origin: int
    task: str
    pairs: np.ndarray
    labels: np.ndarray

    @property
    def positives(self) -> int:
        return int(self.labels.sum())

    @property
    def negatives(self) -> int:
        return int(len(self.labels) - self.labels.sum())


@dataclass(frozen=True)
class AucResult:
    auc: float
    positives: int
    negatives: int


def build_task(net: TemporalNetwork, t: int, task: str) -> EvalTask:
    """Candidates at ``t`` labelled by what changed between ``t`` and ``t+1``."""
    check_task(task)
    if t + 1 > net.last:
        raise IndexError(f"origin {t} has no following snapshot (last is {net.last})")
    pairs = candidate_pairs(net, t, task)
    tr = derive_transition(net, t + 1)
    truth = tr.formed if task == "formation" else tr.dissolved
    labels = np.array([(int(i), int(j)) in truth for i, j in pairs], dtype=np.int64)
    result = EvalTask(t, task, pairs, labels)
    if result.positives == 0 or result.negatives == 0:
        raise DegenerateTaskError(
            f"{task} task at origin {t} has {result.positives} positives and "
            f"{result.negatives} negatives"
        )
    return result


def auc(scores, labels=None) -> AucResult:
    """Mann-Whitney AUC with average ranks for ties.

    ``scores`` is either a sequence of ``(score, label)`` rows or, when
    ``labels`` is given, a flat score array.
    """
    if labels is None:
        arr = np.asarray(scores, dtype=np.float64).reshape(-1, 2)
        scores, labels = arr[:, 0], arr[:, 1]
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    P = int(labels.sum())
    N = int(len(labels) - P)
    if P == 0 or N == 0:
        raise DegenerateTaskError(f"AUC undefined with {P} positives and {N} negatives")
    ranks = rankdata(scores, method="average")
    value = (ranks[labels].sum() - P * (P + 1) / 2.0) / (P * N)
    return AucResult(float(value), P, N)


def evaluate(predictor, net: TemporalNetwork, t: int, task: str) -> AucResult:
    """AUC of ``predictor`` on the ``t -> t+1`` transition.

    ``predictor`` is either an object with ``decision_function(pairs, task)``
    or a callable ``(pairs, task) -> scores``.
    """
    et = build_task(net, t, task)
    if hasattr(predictor, "decision_function"):
        scores = predictor.decision_function(et.pairs, task)
    else:
        scores = predictor(et.pairs, task)
    return auc(np.asarray(scores, dtype=np.float64), et.labels)
