"""scikit-learn style wrappers around the trainer and the heuristics.

The estimators are fitted on a :class:`TemporalNetwork` and an origin time
``t`` rather than on a design matrix; once fitted they score arrays of
``(i, j)`` node pairs for either task.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted

from .baselines import BASELINE_KINDS, baseline_scores
from .embedding import load_state, save_state, sigmoid
from .prediction import PREDICTION_MODES, RankedPrediction, candidate_pairs, check_pairs, check_task, ranked, raw_scores
from .sampling import WalkConfig
from .temporal_graph import TemporalNetwork
from .training import MODES, TrainConfig, train


def check_network(net) -> TemporalNetwork:
    if not isinstance(net, TemporalNetwork):
        raise TypeError(f"expected a TemporalNetwork, got {type(net).__name__}")
    return net


def check_origin(net: TemporalNetwork, t: int | None, *, minimum: int = 0) -> int:
    """Resolve ``t`` (default: last snapshot) and check it is in range."""
    t = net.last if t is None else int(t)
    if not minimum <= t <= net.last:
        raise ValueError(f"origin t={t} outside {minimum}..{net.last}")
    return t


class SemiGraph(BaseEstimator):
    """Complex-embedding link formation and dissolution predictor.

    ``mode`` selects the full semi-supervised model (``"semigraph"``) or one
    of its ablations (``"supervised"``, ``"embedding"``). Hyperparameters
    default to the published settings except for walk length and window,
    which follow common Skipgram practice.
    """

    def __init__(
        self,
        d=3,
        lambda_f=0.05,
        lambda_d=0.05,
        eta1=0.05,
        eta2=5e-6,
        p=None,
        epochs=50,
        k_neg=5,
        walks_per_node=5,
        walk_length=40,
        window=5,
        mode="semigraph",
        prediction_mode="additive",
        random_state=0,
    ):
        self.d = d
        self.lambda_f = lambda_f
        self.lambda_d = lambda_d
        self.eta1 = eta1
        self.eta2 = eta2
        self.p = p
        self.epochs = epochs
        self.k_neg = k_neg
        self.walks_per_node = walks_per_node
        self.walk_length = walk_length
        self.window = window
        self.mode = mode
        self.prediction_mode = prediction_mode
        self.random_state = random_state

    def train_config(self) -> TrainConfig:
        walk = WalkConfig(self.walks_per_node, self.walk_length, self.window)
        return TrainConfig(
            d=self.d,
            lambda_f=self.lambda_f,
            lambda_d=self.lambda_d,
            eta1=self.eta1,
            eta2=self.eta2,
            p=self.p,
            epochs=self.epochs,
            k_neg=self.k_neg,
            walk=walk,
            seed=int(self.random_state),
        )

    def fit(self, net, t=None):
        """Train on snapshots ``0 .. t`` (default: all of ``net``)."""
        net = check_network(net)
        t = check_origin(net, t, minimum=1)
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.prediction_mode not in PREDICTION_MODES:
            raise ValueError(f"unknown prediction_mode {self.prediction_mode!r}")
        self.state_, self.loss_report_ = train(net.truncate(t), t, self.train_config(), self.mode)
        self.origin_ = t
        self.n_nodes_ = net.node_count
        return self

    def decision_function(self, pairs, task="formation"):
        """Raw bilinear scores; higher means the change is more likely."""
        check_is_fitted(self, "state_")
        check_task(task)
        pairs = check_pairs(pairs, self.n_nodes_)
        return raw_scores(self.state_, pairs, task, self.prediction_mode)

    def predict_proba(self, pairs, task="formation"):
        """``(m, 2)`` array of ``[P(no change), P(change)]``."""
        p = np.atleast_1d(sigmoid(self.decision_function(pairs, task)))
        return np.column_stack([1.0 - p, p])

    def rank(self, net, task="formation", t=None, labels=None) -> list[RankedPrediction]:
        check_is_fitted(self, "state_")
        net = check_network(net)
        if net.node_count != self.n_nodes_:
            raise ValueError(f"model has {self.n_nodes_} nodes, network has {net.node_count}")
        t = check_origin(net, self.origin_ if t is None else t)
        pairs = candidate_pairs(net, t, task)
        scores = self.predict_proba(pairs, task)[:, 1] if len(pairs) else np.empty(0)
        return ranked(pairs, scores, task, labels)

    def save(self, path) -> None:
        check_is_fitted(self, "state_")
        save_state(self.state_, path)

    @classmethod
    def from_model_file(cls, path, **params) -> "SemiGraph":
        """Rebuild a fitted estimator from a saved model file."""
        est = cls(**params)
        est.state_ = load_state(path)
        est.n_nodes_ = est.state_.num_nodes
        est.origin_ = None
        return est


class HeuristicPredictor(BaseEstimator):
    """One of the neighborhood or recency heuristics behind the same API."""

    def __init__(self, kind="PA", complementary=True):
        self.kind = kind
        self.complementary = complementary

    def fit(self, net, t=None):
        net = check_network(net)
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {BASELINE_KINDS}")
        t = check_origin(net, t)
        self.network_ = net.truncate(t)
        self.origin_ = t
        return self

    def decision_function(self, pairs, task="formation"):
        if not hasattr(self, "network_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")
        return baseline_scores(self.network_, self.origin_, pairs, task, self.kind, self.complementary)
