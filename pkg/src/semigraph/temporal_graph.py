"""Discrete-time directed networks and their formation/dissolution transitions.

Snapshots are indexed ``0 .. T-1``. The transition at index ``t`` (``t >= 1``)
compares snapshot ``t - 1`` with snapshot ``t``.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


class EdgeListError(ValueError):
    """Raised for malformed or empty temporal edge lists."""


@dataclass(frozen=True)
class Snapshot:
    time: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop ({i}, {j}) in snapshot {self.time}")
        object.__setattr__(self, "edges", edges)

    def __len__(self):
        return len(self.edges)

    def __contains__(self, edge):
        return tuple(edge) in self.edges

    def edge_array(self) -> np.ndarray:
        """Edges as a lexicographically sorted ``(m, 2)`` int64 array."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    def adjacency(self, n: int) -> np.ndarray:
        a = np.zeros((n, n), dtype=bool)
        e = self.edge_array()
        a[e[:, 0], e[:, 1]] = True
        return a

    def neighbors(self, n: int) -> list[np.ndarray]:
        """Sorted neighbor lists of the undirected view."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        return [np.array(sorted(s), dtype=np.int64) for s in nbrs]


@dataclass(frozen=True)
class TransitionPair:
    time: int
    formed: frozenset[Edge]
    dissolved: frozenset[Edge]


@dataclass(frozen=True)
class TemporalNetwork:
    snapshots: tuple[Snapshot, ...]
    node_count: int
    labels: tuple[str, ...] | None = None
    time_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        snaps = tuple(self.snapshots)
        object.__setattr__(self, "snapshots", snaps)
        if not snaps:
            raise ValueError("a temporal network needs at least one snapshot")
        times = [s.time for s in snaps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("snapshot times must be strictly increasing")
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        for s in snaps:
            for i, j in s.edges:
                if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                    raise ValueError(
                        f"edge ({i}, {j}) at time {s.time} outside node range "
                        f"0..{self.node_count - 1}"
                    )
        if self.labels is None:
            object.__setattr__(
                self, "labels", tuple(str(k) for k in range(self.node_count))
            )
        elif len(self.labels) != self.node_count:
            raise ValueError("labels must have one entry per node")
        if self.time_labels is None:
            object.__setattr__(self, "time_labels", tuple(str(s.time) for s in snaps))
        elif len(self.time_labels) != len(snaps):
            raise ValueError("time_labels must have one entry per snapshot")

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, t: int) -> Snapshot:
        if not 0 <= t < len(self.snapshots):
            raise IndexError(f"snapshot {t} out of range 0..{len(self.snapshots) - 1}")
        return self.snapshots[t]

    @property
    def last(self) -> int:
        return len(self.snapshots) - 1

    def truncate(self, up_to: int) -> "TemporalNetwork":
        """Copy holding snapshots ``0 .. up_to`` over the same node set."""
        self[up_to]
        return TemporalNetwork(
            self.snapshots[: up_to + 1],
            self.node_count,
            self.labels,
            self.time_labels[: up_to + 1],
        )

    def symmetrized(self) -> "TemporalNetwork":
        snaps = tuple(
            Snapshot(s.time, s.edges | {(j, i) for i, j in s.edges}) for s in self.snapshots
        )
        return TemporalNetwork(snaps, self.node_count, self.labels, self.time_labels)


def _natural_key(label: str):
    try:
        return (0, int(label), label)
    except ValueError:
        pass
    try:
        return (1, float(label), label)
    except ValueError:
        return (2, 0, label)


def ingest_edge_list(
    rows: Iterable[Sequence], *, undirected: bool = False
) -> TemporalNetwork:
    """Build a :class:`TemporalNetwork` from ``(source, target, time)`` rows.

    Node and time labels are converted to strings and ordered naturally
    (numerically when every label parses as a number). Self-loops are dropped
    and repeated edges within one snapshot collapse.
    """
    parsed: list[tuple[str, str, str]] = []
    n_rows = 0
    for n_rows, row in enumerate(rows, start=1):
        if row is None or len(row) < 3 or any(
            x is None or str(x).strip() == "" for x in row[:3]
        ):
            raise EdgeListError(f"row {n_rows}: expected source,target,time; got {row!r}")
        if len(row) > 3:
            raise EdgeListError(f"row {n_rows}: too many fields in {row!r}")
        parsed.append(tuple(str(x).strip() for x in row))
    if n_rows == 0:
        raise EdgeListError("empty edge list")

    kept = [(s, d, t) for s, d, t in parsed if s != d]
    if not kept:
        raise EdgeListError("no valid edges after dropping self-loops")

    labels = sorted({x for s, d, _ in kept for x in (s, d)}, key=_natural_key)
    times = sorted({t for _, _, t in kept}, key=_natural_key)
    node_id = {lab: k for k, lab in enumerate(labels)}
    time_id = {lab: k for k, lab in enumerate(times)}

    edges: list[set[Edge]] = [set() for _ in times]
    for s, d, t in kept:
        i, j = node_id[s], node_id[d]
        edges[time_id[t]].add((i, j))
        if undirected:
            edges[time_id[t]].add((j, i))
    snaps = tuple(Snapshot(k, frozenset(e)) for k, e in enumerate(edges))
    return TemporalNetwork(snaps, len(labels), tuple(labels), tuple(times))


def parse_edge_list(text: str, *, undirected: bool = False) -> TemporalNetwork:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in stripped.split(",")]
        if len(fields) != 3 or any(f == "" for f in fields):
            raise EdgeListError(f"line {lineno}: expected source,target,time; got {line!r}")
        rows.append(fields)
    return ingest_edge_list(rows, undirected=undirected)


def read_edge_list(path: str | os.PathLike, *, undirected: bool = False) -> TemporalNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), undirected=undirected)


def serialize_edge_list(net: TemporalNetwork) -> str:
    """Render ``net`` in the ``source,target,time`` text format.

    Rows are sorted by (time index, source id, target id).
    """
    buf = io.StringIO()
    for snap, tlab in zip(net.snapshots, net.time_labels):
        for i, j in sorted(snap.edges):
            buf.write(f"{net.labels[i]},{net.labels[j]},{tlab}\n")
    return buf.getvalue()


def write_edge_list(net: TemporalNetwork, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_edge_list(net))


def derive_transition(net: TemporalNetwork, t: int) -> TransitionPair:
    if not 1 <= t <= net.last:
        raise IndexError(f"transition {t} out of range 1..{net.last}")
    prev, cur = net.snapshots[t - 1].edges, net.snapshots[t].edges
    return TransitionPair(t, cur - prev, prev - cur)


def window_transitions(net: TemporalNetwork, t: int, p: int) -> list[TransitionPair]:
    """Transitions at ``t, t-1, ..., t-p+1`` (newest first)."""
    if not 1 <= t <= net.last:
        raise IndexError(f"origin {t} out of range 1..{net.last}")
    if not 1 <= p <= t:
        raise IndexError(f"window length {p} out of range 1..{t}")
    return [derive_transition(net, s) for s in range(t, t - p, -1)]


def union_graph(net: TemporalNetwork, up_to: int) -> Snapshot:
    net[up_to]
    edges: set[Edge] = set()
    for s in net.snapshots[: up_to + 1]:
        edges |= s.edges
    return Snapshot(up_to, frozenset(edges))
