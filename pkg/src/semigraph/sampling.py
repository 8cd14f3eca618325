"""Positive and negative training pairs for the four loss terms."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .temporal_graph import Snapshot, TransitionPair

MAX_REJECTIONS = 100


class Term(enum.IntEnum):
    FORMATION_SUPERVISED = 0
    DISSOLUTION_SUPERVISED = 1
    FORMATION_CONTEXT = 2
    DISSOLUTION_CONTEXT = 3

    @property
    def is_context(self) -> bool:
        return self >= Term.FORMATION_CONTEXT

    @property
    def is_formation(self) -> bool:
        return self in (Term.FORMATION_SUPERVISED, Term.FORMATION_CONTEXT)


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 5
    walk_length: int = 40
    window: int = 5
    seed: int | None = None
    directed: bool = False

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.walk_length < 2:
            raise ValueError("walk_length must be >= 2")
        if not 1 <= self.window < self.walk_length:
            raise ValueError("window must satisfy 1 <= window < walk_length")


@dataclass(frozen=True)
class TrainingSample:
    i: int
    j: int
    gamma: int
    term: Term

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("training samples require i != j")
        if self.gamma not in (1, -1):
            raise ValueError("gamma must be +1 or -1")
        object.__setattr__(self, "term", Term(self.term))


@dataclass
class SampleBatch:
    """Column-wise store of many :class:`TrainingSample` rows."""

    i: np.ndarray
    j: np.ndarray
    gamma: np.ndarray
    term: np.ndarray

    def __len__(self):
        return len(self.i)

    def __iter__(self) -> Iterator[TrainingSample]:
        for a, b, g, t in zip(self.i, self.j, self.gamma, self.term):
            yield TrainingSample(int(a), int(b), int(g), Term(int(t)))

    @classmethod
    def from_pairs(cls, pairs: np.ndarray, gamma: int, term: Term) -> "SampleBatch":
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        m = len(pairs)
        return cls(
            pairs[:, 0].copy(),
            pairs[:, 1].copy(),
            np.full(m, gamma, dtype=np.int64),
            np.full(m, int(term), dtype=np.int64),
        )

    @classmethod
    def concat(cls, batches: Sequence["SampleBatch"]) -> "SampleBatch":
        if not batches:
            empty = np.empty(0, dtype=np.int64)
            return cls(empty, empty.copy(), empty.copy(), empty.copy())
        return cls(
            *(np.concatenate([getattr(b, k) for b in batches]) for k in ("i", "j", "gamma", "term"))
        )

    def take(self, idx: np.ndarray) -> "SampleBatch":
        return SampleBatch(self.i[idx], self.j[idx], self.gamma[idx], self.term[idx])


def _csr(current: Snapshot, num_nodes: int, directed: bool):
    edges = current.edge_array()
    if not directed and len(edges):
        edges = np.unique(np.vstack([edges, edges[:, ::-1]]), axis=0)
    counts = np.bincount(edges[:, 0], minlength=num_nodes) if len(edges) else np.zeros(num_nodes, np.int64)
    indptr = np.concatenate([[0], np.cumsum(counts)])
    return indptr, edges[:, 1].copy()


def random_walks(current: Snapshot, cfg: WalkConfig, num_nodes: int | None = None) -> np.ndarray:
    """Uniform truncated walks, one row per walk, padded with ``-1``.

    Starts are the nodes with at least one neighbor, ``walks_per_node`` each,
    in ascending node order.
    """
    n = num_nodes if num_nodes is not None else _infer_nodes(current)
    indptr, nbrs = _csr(current, n, cfg.directed)
    deg = np.diff(indptr)
    starts = np.repeat(np.flatnonzero(deg > 0), cfg.walks_per_node)
    walks = np.full((len(starts), cfg.walk_length), -1, dtype=np.int64)
    if len(starts) == 0:
        return walks
    rng = np.random.default_rng(cfg.seed)
    walks[:, 0] = starts
    cur = starts.copy()
    alive = np.ones(len(starts), dtype=bool)
    for step in range(1, cfg.walk_length):
        u = rng.random(len(starts))
        alive &= deg[np.maximum(cur, 0)] > 0
        pick = indptr[cur] + np.floor(u * deg[cur]).astype(np.int64)
        nxt = np.where(alive, nbrs[np.minimum(pick, len(nbrs) - 1)], -1)
        walks[:, step] = nxt
        cur = np.where(alive, nxt, 0)
    return walks


def _infer_nodes(current: Snapshot) -> int:
    e = current.edge_array()
    return int(e.max()) + 1 if len(e) else 0


def walk_context_pairs(walks: np.ndarray, window: int) -> np.ndarray:
    """All ``(node, context)`` pairs at distance ``1..window`` inside each walk."""
    chunks = []
    L = walks.shape[1]
    for off in range(1, min(window, L - 1) + 1):
        a, b = walks[:, :-off].ravel(), walks[:, off:].ravel()
        ok = (a >= 0) & (b >= 0) & (a != b)
        fwd = np.stack([a[ok], b[ok]], axis=1)
        chunks.append(fwd)
        chunks.append(fwd[:, ::-1])
    if not chunks:
        return np.empty((0, 2), dtype=np.int64)
    return np.ascontiguousarray(np.concatenate(chunks), dtype=np.int64)


def deep_walk_contexts(
    current: Snapshot, cfg: WalkConfig, num_nodes: int | None = None
) -> np.ndarray:
    """Skipgram ``(node, context)`` pairs from deep walks on ``current``.

    Walks follow the undirected view unless ``cfg.directed`` is set.
    """
    return walk_context_pairs(random_walks(current, cfg, num_nodes), cfg.window)


def positive_transition_pairs(
    transitions: Sequence[TransitionPair], kind: str
) -> np.ndarray:
    """Concatenated formed (or dissolved) edges across ``transitions``.

    A pair appearing in several transitions is repeated once per appearance.
    """
    if not transitions:
        raise ValueError("at least one transition is required")
    if kind not in ("formation", "dissolution"):
        raise ValueError(f"unknown kind {kind!r}")
    chunks = []
    for tr in transitions:
        edges = tr.formed if kind == "formation" else tr.dissolved
        if edges:
            chunks.append(np.array(sorted(edges), dtype=np.int64))
    if not chunks:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(chunks)


def pair_keys(pairs: np.ndarray, num_nodes: int) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return np.unique(pairs[:, 0] * num_nodes + pairs[:, 1])


DENSE_MEMBERSHIP_LIMIT = 4096


def _membership(pairs: np.ndarray, num_nodes: int):
    """Vectorised ``(i, j) in pairs`` test."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if num_nodes <= DENSE_MEMBERSHIP_LIMIT:
        mask = np.zeros((num_nodes, num_nodes), dtype=bool)
        mask[pairs[:, 0], pairs[:, 1]] = True
        return lambda i, j: mask[i, j]
    keys = pair_keys(pairs, num_nodes)
    if len(keys) == 0:
        return lambda i, j: np.zeros(len(i), dtype=bool)

    def lookup(i, j):
        cand = i * num_nodes + j
        pos = np.minimum(np.searchsorted(keys, cand), len(keys) - 1)
        return keys[pos] == cand

    return lookup


def negative_samples(
    positives: np.ndarray,
    num_nodes: int,
    k: int,
    seed=None,
    *,
    term: Term = Term.FORMATION_SUPERVISED,
    exclude: np.ndarray | None = None,
) -> SampleBatch:
    """Corrupt the target of each positive pair ``k`` times.

    Replacement targets are uniform over ``V \\ {i}``. A draw that hits a
    positive pair (``exclude``, defaulting to ``positives``) is redrawn; after
    ``MAX_REJECTIONS`` attempts the slot is dropped. ``seed`` may be an int or
    a ``numpy.random.Generator``.
    """
    if num_nodes < 2:
        raise ValueError("negative sampling needs at least two nodes")
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 2)
    is_positive = _membership(positives if exclude is None else exclude, num_nodes)

    src = np.repeat(positives[:, 0], k)
    dst = np.empty_like(src)
    pending = np.arange(len(src))
    for _ in range(MAX_REJECTIONS):
        if len(pending) == 0:
            break
        s = src[pending]
        draw = rng.integers(0, num_nodes - 1, size=len(pending))
        draw += draw >= s
        dst[pending] = draw
        pending = pending[is_positive(s, draw)]
    keep = np.ones(len(src), dtype=bool)
    keep[pending] = False
    pairs = np.stack([src[keep], dst[keep]], axis=1)
    return SampleBatch.from_pairs(pairs, -1, term)
