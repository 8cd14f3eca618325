"""Semi-supervised objectives and their stochastic gradient ascent.

Two independent parameter sets are trained: ``(v_f, u_f, theta_f)`` for link
formation and ``(v_d, u_d, theta_d)`` for link dissolution. Each receives a
supervised term over past transitions and a Skipgram context term over the
current network, the latter weighted by ``lambda_f`` / ``lambda_d``.
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .embedding import EmbeddingState, context_score, hermitian_score, init_state, log_sigmoid, sigmoid
from .sampling import (
    SampleBatch,
    Term,
    TrainingSample,
    WalkConfig,
    deep_walk_contexts,
    negative_samples,
    positive_transition_pairs,
)
from .temporal_graph import TemporalNetwork, window_transitions

logger = logging.getLogger(__name__)

MODES = ("semigraph", "supervised", "embedding")
DECAY_FLOOR = 1e-4
DIVERGENCE_LIMIT = 1e6


class DivergedTrainingError(RuntimeError):
    def __init__(self, epoch: int, reason: str):
        super().__init__(f"training diverged at epoch {epoch}: {reason}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    d: int = 3
    lambda_f: float = 0.05
    lambda_d: float = 0.05
    eta1: float = 0.05
    eta2: float = 5e-6
    p: int | None = None
    epochs: int = 50
    k_neg: int = 5
    walk: WalkConfig = field(default_factory=WalkConfig)
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.lambda_f < 0 or self.lambda_d < 0:
            raise ValueError("lambda_f and lambda_d must be non-negative")
        if self.eta1 <= 0 or self.eta2 <= 0:
            raise ValueError("learning rates must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.k_neg < 1:
            raise ValueError("k_neg must be >= 1")
        if self.p is not None and self.p < 1:
            raise ValueError("p must be >= 1")


@dataclass
class LossReport:
    """Per-epoch mean log-likelihood of every term (NaN when inactive)."""

    rows: list[dict] = field(default_factory=list)

    COLUMNS = ("epoch", "L_fs", "L_fu", "L_f", "L_ds", "L_du", "L_d")

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=np.float64)

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=self.COLUMNS)
            w.writeheader()
            for r in self.rows:
                w.writerow({k: (r[k] if k == "epoch" else repr(float(r[k]))) for k in self.COLUMNS})


# -- per-sample objective ---------------------------------------------------

def _blocks(state: EmbeddingState, term: Term):
    if term == Term.FORMATION_SUPERVISED:
        return state.v_f, state.v_f, state.theta_f
    if term == Term.DISSOLUTION_SUPERVISED:
        return state.v_d, state.v_d, state.theta_d
    if term == Term.FORMATION_CONTEXT:
        return state.v_f, state.u_f, None
    return state.v_d, state.u_d, None


def sample_score(state: EmbeddingState, s: TrainingSample) -> float:
    left, right, theta = _blocks(state, s.term)
    if theta is None:
        return float(context_score(left[s.i], right[s.j]))
    return float(hermitian_score(left[s.i], theta, right[s.j]))


def sample_loglik(state: EmbeddingState, s: TrainingSample) -> float:
    """``log sigmoid(gamma * score)`` for one sample."""
    return log_sigmoid(s.gamma * sample_score(state, s))


@dataclass
class SampleGradient:
    """Gradient of one sample's log-likelihood.

    Complex entries pack ``d/dRe + 1j * d/dIm``. ``left`` belongs to row ``i``
    of ``v_*``; ``right`` to row ``j`` of ``v_*`` (supervised) or ``u_*``
    (context). ``theta`` is ``None`` for context terms.
    """

    term: Term
    i: int
    j: int
    left: np.ndarray
    right: np.ndarray
    theta: np.ndarray | None


def _score_partials(vi, vj, theta):
    a, b = vi.real, vi.imag
    c, e = vj.real, vj.imag
    if theta is None:
        cs, sn = np.ones_like(a), np.zeros_like(a)
    else:
        cs, sn = np.cos(theta), np.sin(theta)
    d_left = (cs * c - sn * e) + 1j * (cs * e + sn * c)
    d_right = (cs * a + sn * b) + 1j * (cs * b - sn * a)
    d_theta = None if theta is None else -sn * (a * c + b * e) + cs * (b * c - a * e)
    return d_left, d_right, d_theta


def sample_gradient(state: EmbeddingState, s: TrainingSample) -> SampleGradient:
    left, right, theta = _blocks(state, s.term)
    score = sample_score(state, s)
    g = s.gamma * sigmoid(-s.gamma * score)
    d_left, d_right, d_theta = _score_partials(left[s.i], right[s.j], theta)
    return SampleGradient(
        s.term, s.i, s.j, g * d_left, g * d_right, None if d_theta is None else g * d_theta
    )


def apply_gradient(state: EmbeddingState, grad: SampleGradient, lr_vec: float, lr_phase: float) -> None:
    """In-place ascent step for one sample."""
    left, right, theta = _blocks(state, grad.term)
    left[grad.i] += lr_vec * grad.left
    right[grad.j] += lr_vec * grad.right
    if theta is not None:
        theta += lr_phase * grad.theta


# -- full-batch helpers -------------------------------------------------------

def batch_loglik(state: EmbeddingState, batch: SampleBatch) -> dict[Term, float]:
    """Mean log-likelihood per term present in ``batch``."""
    out = {}
    for term in map(Term, np.unique(batch.term)):
        m = batch.term == term
        left, right, theta = _blocks(state, term)
        vi, vj = left[batch.i[m]], right[batch.j[m]]
        score = context_score(vi, vj) if theta is None else hermitian_score(vi, theta, vj)
        out[term] = float(np.mean(log_sigmoid(batch.gamma[m] * score)))
    return out


def full_batch_step(
    state: EmbeddingState,
    batch: SampleBatch,
    eta1: float,
    eta2: float,
    weights=(1.0, 1.0, 1.0, 1.0),
) -> None:
    """One gradient-ascent step on the mean log-likelihood of each term."""
    updates = []
    for term in map(Term, np.unique(batch.term)):
        m = batch.term == term
        left, right, theta = _blocks(state, term)
        ii, jj, gam = batch.i[m], batch.j[m], batch.gamma[m]
        vi, vj = left[ii], right[jj]
        score = context_score(vi, vj) if theta is None else hermitian_score(vi, theta, vj)
        g = (gam * sigmoid(-gam * score))[:, None] / m.sum()
        d_left, d_right, d_theta = _score_partials(vi, vj, theta)
        gl = np.zeros_like(left)
        gr = np.zeros_like(right)
        np.add.at(gl, ii, g * d_left)
        np.add.at(gr, jj, g * d_right)
        gt = None if theta is None else (g * d_theta).sum(axis=0)
        updates.append((left, right, theta, gl, gr, gt, weights[term]))
    for left, right, theta, gl, gr, gt, w in updates:
        left += eta1 * w * gl
        right += eta1 * w * gr
        if theta is not None:
            theta += eta2 * gt


# -- training loop ------------------------------------------------------------

def active_terms(cfg: TrainConfig, mode: str) -> dict[Term, float]:
    """Loss terms that take part in training, mapped to their gradient weight.

    A context term whose weight is zero is dropped from the sample stream, so
    ``lambda = 0`` reproduces supervised-only training exactly.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    terms = {}
    if mode in ("semigraph", "supervised"):
        terms[Term.FORMATION_SUPERVISED] = 1.0
        terms[Term.DISSOLUTION_SUPERVISED] = 1.0
    if mode == "semigraph":
        if cfg.lambda_f > 0:
            terms[Term.FORMATION_CONTEXT] = cfg.lambda_f
        if cfg.lambda_d > 0:
            terms[Term.DISSOLUTION_CONTEXT] = cfg.lambda_d
    elif mode == "embedding":
        terms[Term.FORMATION_CONTEXT] = 1.0
        terms[Term.DISSOLUTION_CONTEXT] = 1.0
    return terms


def _streams(seed: int):
    return [np.random.default_rng([seed, k]) for k in (1, 2, 3)]


def train(
    net: TemporalNetwork, t: int, cfg: TrainConfig, mode: str = "semigraph"
) -> tuple[EmbeddingState, LossReport]:
    """Fit embeddings using snapshots ``0 .. t`` of ``net`` only."""
    if t < 1:
        raise ValueError("training needs at least one past transition (t >= 1)")
    if t > net.last:
        raise IndexError(f"origin {t} out of range 1..{net.last}")
    terms = active_terms(cfg, mode)
    n = net.node_count
    p = t if cfg.p is None else min(cfg.p, t)
    walk_rng, neg_rng, shuffle_rng = _streams(cfg.seed)

    positives: dict[Term, np.ndarray] = {}
    if Term.FORMATION_SUPERVISED in terms or Term.DISSOLUTION_SUPERVISED in terms:
        window = window_transitions(net, t, p)
        positives[Term.FORMATION_SUPERVISED] = positive_transition_pairs(window, "formation")
        positives[Term.DISSOLUTION_SUPERVISED] = positive_transition_pairs(window, "dissolution")
    if Term.FORMATION_CONTEXT in terms or Term.DISSOLUTION_CONTEXT in terms:
        walk_cfg = replace(cfg.walk, seed=int(walk_rng.integers(2**63)))
        contexts = deep_walk_contexts(net[t], walk_cfg, n)
        positives[Term.FORMATION_CONTEXT] = contexts
        positives[Term.DISSOLUTION_CONTEXT] = contexts
    positives = {k: v for k, v in positives.items() if k in terms and len(v)}

    state = init_state(n, cfg.d, cfg.seed)
    report = LossReport()
    if not positives:
        logger.warning("no training samples at origin %d; returning initial state", t)
        return state, report

    pos_batches = {k: SampleBatch.from_pairs(v, 1, k) for k, v in positives.items()}
    per_epoch = sum(len(v) * (1 + cfg.k_neg) for v in positives.values())
    total = float(per_epoch * cfg.epochs)
    weights = np.zeros(4)
    for k, w in terms.items():
        weights[k] = w

    P = np.stack([state.v_f, state.v_d, state.u_f, state.u_d])
    TH = np.stack([state.theta_f, state.theta_d])
    tau = 0.0
    for epoch in range(1, cfg.epochs + 1):
        parts = []
        for term in sorted(positives):
            parts.append(pos_batches[term])
            parts.append(
                negative_samples(positives[term], n, cfg.k_neg, neg_rng, term=term)
            )
        stream = SampleBatch.concat(parts).take(shuffle_rng.permutation(sum(map(len, parts))))
        loss_sum = np.zeros(4)
        loss_cnt = np.zeros(4)
        tau = _kernels.sgd_pass(
            P, TH, stream.i, stream.j, stream.gamma.astype(np.float64), stream.term,
            weights, cfg.eta1, cfg.eta2, tau, total, DECAY_FLOOR,
            loss_sum, loss_cnt,
        )
        state.v_f[:], state.v_d[:], state.u_f[:], state.u_d[:] = P
        state.theta_f[:], state.theta_d[:] = TH
        means = np.where(loss_cnt > 0, loss_sum / np.maximum(loss_cnt, 1), np.nan)
        row = _report_row(epoch, means, weights)
        if not all(np.isfinite(means[k]) for k in positives):
            raise DivergedTrainingError(epoch, "non-finite loss")
        if state.max_abs() > DIVERGENCE_LIMIT or not state.is_finite():
            raise DivergedTrainingError(epoch, "parameter magnitude exceeded limit")
        assert np.allclose(np.abs(state.W_f), 1.0, rtol=0, atol=1e-15)
        assert np.allclose(np.abs(state.W_d), 1.0, rtol=0, atol=1e-15)
        report.rows.append(row)
        logger.debug("epoch %d: %s", epoch, row)
    return state, report


def _report_row(epoch: int, means: np.ndarray, weights: np.ndarray) -> dict:
    def combined(sup: int, ctx: int) -> float:
        total = 0.0
        for k in (sup, ctx):
            if np.isfinite(means[k]):
                total += weights[k] * means[k]
        return total

    return {
        "epoch": epoch,
        "L_fs": means[Term.FORMATION_SUPERVISED],
        "L_fu": means[Term.FORMATION_CONTEXT],
        "L_f": combined(Term.FORMATION_SUPERVISED, Term.FORMATION_CONTEXT),
        "L_ds": means[Term.DISSOLUTION_SUPERVISED],
        "L_du": means[Term.DISSOLUTION_CONTEXT],
        "L_d": combined(Term.DISSOLUTION_SUPERVISED, Term.DISSOLUTION_CONTEXT),
    }
