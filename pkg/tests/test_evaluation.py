import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigraph.evaluation import DegenerateTaskError, auc, build_task, evaluate
from semigraph.temporal_graph import Snapshot, TemporalNetwork

from .conftest import random_network


def pairwise_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def random_instance(rng):
    m = int(rng.integers(2, 101))
    labels = rng.integers(0, 2, size=m)
    labels[0], labels[1] = 0, 1
    # few distinct values so ties are common
    scores = rng.integers(0, int(rng.integers(1, 8)), size=m).astype(float) if rng.random() < 0.5 else rng.normal(size=m)
    return scores, labels


def test_auc_matches_pairwise_oracle(rng):
    for _ in range(200):
        s, y = random_instance(rng)
        assert auc(s, y).auc == pairwise_auc(s, y)


def test_auc_examples():
    assert auc([3.0, 2.0, 1.0, 0.0], [1, 1, 0, 0]).auc == 1.0
    assert auc([1.0] * 5, [1, 0, 0, 1, 0]).auc == 0.5
    r = auc([(0.9, 1), (0.1, 0), (0.4, 0)])
    assert (r.auc, r.positives, r.negatives) == (1.0, 1, 2)


def test_auc_reversal_identity(rng):
    for _ in range(100):
        s, y = random_instance(rng)
        assert auc(s, y).auc + auc(-s, y).auc == 1.0


def test_auc_monotone_transform_and_duplicated_negatives(rng):
    s, y = rng.normal(size=60), rng.integers(0, 2, size=60)
    y[:2] = [0, 1]
    base = auc(s, y).auc
    assert auc(np.exp(3 * s) + 1, y).auc == pytest.approx(base, abs=1e-15)
    neg = y == 0
    s2 = np.concatenate([s, s[neg]])
    y2 = np.concatenate([y, y[neg]])
    assert auc(s2, y2).auc == pytest.approx(base, abs=1e-15)


def test_auc_single_class_rejected():
    with pytest.raises(DegenerateTaskError):
        auc([0.1, 0.2], [1, 1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.booleans()), min_size=2, max_size=40))
def test_auc_property_matches_oracle(rows):
    ys = [y for _, y in rows]
    if all(ys) or not any(ys):
        return
    s = [float(v) for v, _ in rows]
    assert auc(s, ys).auc == pairwise_auc(s, ys)


def test_build_task_single_formation():
    net = TemporalNetwork((Snapshot(0), Snapshot(1, frozenset({(0, 1)}))), 3)
    et = build_task(net, 0, "formation")
    assert len(et.pairs) == 6 and et.positives == 1 and et.negatives == 5
    assert tuple(et.pairs[et.labels == 1][0]) == (0, 1)


def test_build_task_unchanged_is_degenerate():
    e = frozenset({(0, 1), (1, 2)})
    net = TemporalNetwork((Snapshot(0, e), Snapshot(1, e)), 3)
    for task in ("formation", "dissolution"):
        with pytest.raises(DegenerateTaskError, match=task):
            build_task(net, 0, task)


def test_build_task_requires_next_snapshot(small_net):
    with pytest.raises(IndexError):
        build_task(small_net, 2, "formation")


def test_build_task_labels_match_bruteforce(rng):
    n = 15
    net = random_network(rng, n=n, snapshots=2, density=0.2)
    a, b = net[0].edges, net[1].edges
    for task in ("formation", "dissolution"):
        et = build_task(net, 0, task)
        for (i, j), y in zip(et.pairs.tolist(), et.labels.tolist()):
            if task == "formation":
                assert (i, j) not in a and y == ((i, j) in b)
            else:
                assert (i, j) in a and y == ((i, j) not in b)


def test_evaluate_with_oracle_constant_and_negation(rng):
    net = random_network(rng, n=12, snapshots=2, density=0.2)
    truth = net[1].edges

    def oracle(pairs, task):
        return np.array([(i, j) in truth for i, j in pairs.tolist()], dtype=float)

    assert evaluate(oracle, net, 0, "formation").auc == 1.0
    assert evaluate(lambda p, t: np.zeros(len(p)), net, 0, "formation").auc == 0.5
    noisy = lambda p, t: rng.normal(size=len(p))
    fixed = noisy(build_task(net, 0, "dissolution").pairs, "dissolution")
    a = evaluate(lambda p, t: fixed, net, 0, "dissolution").auc
    b = evaluate(lambda p, t: -fixed, net, 0, "dissolution").auc
    assert a + b == 1.0


def test_evaluate_accepts_decision_function(small_net):
    class Const:
        def decision_function(self, pairs, task):
            return np.ones(len(pairs))

    net = TemporalNetwork(
        small_net.snapshots + (Snapshot(3, frozenset({(0, 1)})),), 3
    )
    assert evaluate(Const(), net, 2, "formation").auc == 0.5
