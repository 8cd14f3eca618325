import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigraph.temporal_graph import (
    EdgeListError,
    Snapshot,
    TemporalNetwork,
    derive_transition,
    ingest_edge_list,
    parse_edge_list,
    read_edge_list,
    serialize_edge_list,
    union_graph,
    window_transitions,
    write_edge_list,
)

from .conftest import random_network


def test_ingest_basic():
    net = ingest_edge_list([("a", "b", 1), ("b", "c", 2)])
    assert net.node_count == 3
    assert len(net) == 2
    assert net.labels == ("a", "b", "c")
    assert net[0].edges == {(0, 1)}
    assert net[1].edges == {(1, 2)}


def test_ingest_only_self_loop_is_empty():
    with pytest.raises(EdgeListError):
        ingest_edge_list([("a", "a", 1)])


def test_ingest_no_rows():
    with pytest.raises(EdgeListError):
        ingest_edge_list([])


def test_ingest_malformed_row_names_row():
    with pytest.raises(EdgeListError, match="row 2"):
        ingest_edge_list([("a", "b", 1), ("a", "b")])


def test_ingest_collapses_duplicates_and_drops_self_loops():
    net = ingest_edge_list([("a", "b", 1), ("a", "b", 1), ("b", "b", 1), ("b", "a", 1)])
    assert net[0].edges == {(0, 1), (1, 0)}


def test_numeric_labels_sort_numerically():
    net = ingest_edge_list([("10", "2", "5"), ("2", "1", "10")])
    assert net.labels == ("1", "2", "10")
    assert net.time_labels == ("5", "10")


def test_undirected_flag_symmetrizes():
    net = ingest_edge_list([("a", "b", 1)], undirected=True)
    assert net[0].edges == {(0, 1), (1, 0)}


def test_parse_skips_comments_and_reports_line():
    net = parse_edge_list("# header\na,b,1\n\nb,c,2\n")
    assert net.node_count == 3
    with pytest.raises(EdgeListError, match="line 2"):
        parse_edge_list("a,b,1\na,b\n")


def test_roundtrip_1000_rows(tmp_path, rng):
    rows = [
        (f"n{rng.integers(60)}", f"n{rng.integers(60)}", int(rng.integers(1, 9)))
        for _ in range(1000)
    ]
    net = ingest_edge_list(rows)
    path = tmp_path / "edges.csv"
    write_edge_list(net, path)
    again = read_edge_list(path)
    assert again == net
    assert serialize_edge_list(again) == serialize_edge_list(net)


def test_serialization_sorted_by_time_source_target():
    net = ingest_edge_list([("c", "a", 2), ("b", "a", 1), ("a", "c", 1)])
    assert serialize_edge_list(net).splitlines() == ["a,c,1", "b,a,1", "c,a,2"]


def test_snapshot_rejects_self_loop():
    with pytest.raises(ValueError):
        Snapshot(0, frozenset({(1, 1)}))


def test_network_rejects_out_of_range_node():
    with pytest.raises(ValueError):
        TemporalNetwork((Snapshot(0, frozenset({(0, 5)})),), 3)


def test_derive_transition_single_appearance():
    net = TemporalNetwork((Snapshot(0), Snapshot(1, frozenset({(0, 1)}))), 2)
    tr = derive_transition(net, 1)
    assert tr.formed == {(0, 1)} and tr.dissolved == frozenset()


def test_derive_transition_unchanged():
    e = frozenset({(0, 1)})
    net = TemporalNetwork((Snapshot(0, e), Snapshot(1, e)), 2)
    tr = derive_transition(net, 1)
    assert not tr.formed and not tr.dissolved


@pytest.mark.parametrize("t", [0, 3, -1])
def test_derive_transition_out_of_range(small_net, t):
    with pytest.raises(IndexError):
        derive_transition(small_net, t)


def test_derive_transition_matches_adjacency_bruteforce(rng):
    n = 50
    net = random_network(rng, n=n, snapshots=2, density=0.05)
    prev = net[0].adjacency(n).astype(int)
    cur = net[1].adjacency(n).astype(int)
    diff = cur - prev
    formed = {(i, j) for i in range(n) for j in range(n) if diff[i, j] == 1}
    dissolved = {(i, j) for i in range(n) for j in range(n) if diff[i, j] == -1}
    tr = derive_transition(net, 1)
    assert tr.formed == formed
    assert tr.dissolved == dissolved


def test_window_transitions(small_net):
    w = window_transitions(small_net, 2, 2)
    assert [tr.time for tr in w] == [2, 1]
    assert window_transitions(small_net, 2, 1) == [derive_transition(small_net, 2)]
    with pytest.raises(IndexError):
        window_transitions(small_net, 2, 3)
    with pytest.raises(IndexError):
        window_transitions(small_net, 2, 0)


def test_window_union_matches_scan(rng):
    net = random_network(rng, n=15, snapshots=6)
    t, p = 5, 3
    got = set().union(*(tr.formed for tr in window_transitions(net, t, p)))
    want = set()
    for s in range(t - p + 1, t + 1):
        want |= {e for e in net[s].edges if e not in net[s - 1].edges}
    assert got == want


def test_union_graph(small_net, rng):
    assert union_graph(small_net, 0).edges == small_net[0].edges
    net = TemporalNetwork(
        (Snapshot(0, frozenset({(0, 1)})), Snapshot(1, frozenset({(1, 2)}))), 3
    )
    assert union_graph(net, 1).edges == {(0, 1), (1, 2)}
    rnet = random_network(rng, n=12, snapshots=5)
    acc = set()
    for s in range(5):
        acc = acc | rnet[s].edges
    assert union_graph(rnet, 4).edges == acc


def test_truncate_keeps_node_set(rng):
    net = random_network(rng, n=10, snapshots=5)
    tr = net.truncate(2)
    assert len(tr) == 3 and tr.node_count == 10 and tr.labels == net.labels
    assert tr.snapshots == net.snapshots[:3]


@st.composite
def snapshot_pairs(draw):
    n = draw(st.integers(2, 12))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])
    a = draw(st.frozensets(pair, max_size=40))
    b = draw(st.frozensets(pair, max_size=40))
    return n, a, b


@settings(max_examples=100, deadline=None)
@given(snapshot_pairs())
def test_transition_reconstructs_current(data):
    n, a, b = data
    net = TemporalNetwork((Snapshot(0, a), Snapshot(1, b)), n)
    tr = derive_transition(net, 1)
    assert not (tr.formed & tr.dissolved)
    assert (a | tr.formed) - tr.dissolved == b
    assert tr.formed.isdisjoint(a) and tr.dissolved <= a


@settings(max_examples=50, deadline=None)
@given(snapshot_pairs())
def test_transition_antisymmetric_under_swap(data):
    n, a, b = data
    fwd = derive_transition(TemporalNetwork((Snapshot(0, a), Snapshot(1, b)), n), 1)
    rev = derive_transition(TemporalNetwork((Snapshot(0, b), Snapshot(1, a)), n), 1)
    assert fwd.formed == rev.dissolved and fwd.dissolved == rev.formed


def test_edge_array_sorted(rng):
    net = random_network(rng, n=10, snapshots=1, density=0.3)
    e = net[0].edge_array()
    assert np.array_equal(e, np.array(sorted(net[0].edges)))
