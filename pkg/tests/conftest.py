import numpy as np
import pytest

from semigraph.temporal_graph import Snapshot, TemporalNetwork


def random_network(rng, n=20, snapshots=4, density=0.1):
    snaps = []
    for t in range(snapshots):
        a = rng.random((n, n)) < density
        np.fill_diagonal(a, False)
        snaps.append(Snapshot(t, frozenset(map(tuple, np.argwhere(a).tolist()))))
    return TemporalNetwork(tuple(snaps), n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_net():
    # a=0, b=1, c=2
    return TemporalNetwork(
        (
            Snapshot(0, frozenset({(0, 1)})),
            Snapshot(1, frozenset({(0, 1), (1, 2)})),
            Snapshot(2, frozenset({(1, 2), (2, 0)})),
        ),
        3,
    )


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, title: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] #{number} {title}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("#")[1].split()[0])):
            terminalreporter.write_line(line)
