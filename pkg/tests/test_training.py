import math
from dataclasses import replace

import numpy as np
import pytest

from semigraph import _kernels
from semigraph.embedding import EmbeddingState, init_state
from semigraph.sampling import SampleBatch, Term, TrainingSample, WalkConfig
from semigraph.synth import SynthConfig, generate
from semigraph.temporal_graph import Snapshot, TemporalNetwork
from semigraph.training import (
    DivergedTrainingError,
    LossReport,
    TrainConfig,
    active_terms,
    apply_gradient,
    batch_loglik,
    full_batch_step,
    sample_gradient,
    sample_loglik,
    train,
)

BLOCKS = ("v_f", "v_d", "u_f", "u_d", "theta_f", "theta_d")


def random_state(rng, n, d, scale=1.0):
    def c():
        return scale * (rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d)))

    return EmbeddingState(c(), c(), c(), c(), rng.uniform(0, 2 * np.pi, d), rng.uniform(0, 2 * np.pi, d))


def random_sample(rng, n, term=None):
    i, j = rng.choice(n, size=2, replace=False)
    term = Term(rng.integers(4)) if term is None else term
    return TrainingSample(int(i), int(j), int(rng.choice([-1, 1])), term)


def numeric_gradient(state, s, h=1e-6):
    """Central differences over every real coordinate of every block."""
    out = {}
    for name in BLOCKS:
        arr = getattr(state, name)
        g = np.zeros(arr.shape, dtype=arr.dtype)
        for idx in np.ndindex(arr.shape):
            parts = (1.0, 1j) if np.iscomplexobj(arr) else (1.0,)
            for unit in parts:
                orig = arr[idx]
                arr[idx] = orig + h * unit
                up = sample_loglik(state, s)
                arr[idx] = orig - h * unit
                dn = sample_loglik(state, s)
                arr[idx] = orig
                g[idx] += unit * (up - dn) / (2 * h)
        out[name] = g
    return out


def analytic_dense(state, s):
    grad = sample_gradient(state, s)
    out = {name: np.zeros_like(getattr(state, name)) for name in BLOCKS}
    sfx = "f" if s.term.is_formation else "d"
    right = f"u_{sfx}" if s.term.is_context else f"v_{sfx}"
    out[f"v_{sfx}"][s.i] += grad.left
    out[right][s.j] += grad.right
    if grad.theta is not None:
        out[f"theta_{sfx}"] += grad.theta
    return out


def assert_close(num, ana, rel=1e-4, floor=1e-7):
    for name in BLOCKS:
        a, b = np.asarray(ana[name]), np.asarray(num[name])
        for x, y in ((a.real, b.real), (a.imag, b.imag)):
            err = np.abs(x - y)
            tol = np.maximum(rel * np.maximum(np.abs(x), np.abs(y)), floor)
            assert np.all(err <= tol), (name, float(err.max()))


@pytest.mark.parametrize("d", [1, 3, 8])
def test_gradient_matches_finite_differences(rng, d):
    for term in Term:
        for _ in range(3):
            state = random_state(rng, 5, d, scale=0.7)
            s = random_sample(rng, 5, term)
            assert_close(numeric_gradient(state, s), analytic_dense(state, s))


def test_zero_vectors_give_zero_phase_gradient():
    z = np.zeros((3, 2), dtype=complex)
    state = EmbeddingState(z, z, z, z, np.array([0.3, 1.0]), np.array([2.0, 0.1]))
    g = sample_gradient(state, TrainingSample(0, 1, 1, Term.FORMATION_SUPERVISED))
    assert np.all(g.theta == 0)


def test_context_sample_has_no_phase_gradient(rng):
    state = random_state(rng, 4, 3)
    g = sample_gradient(state, TrainingSample(0, 1, -1, Term.DISSOLUTION_CONTEXT))
    assert g.theta is None


def test_loglik_values(rng):
    z = np.zeros((3, 2), dtype=complex)
    state = EmbeddingState(z, z, z, z, np.zeros(2), np.zeros(2))
    assert sample_loglik(state, TrainingSample(0, 1, 1, Term.FORMATION_SUPERVISED)) == pytest.approx(-0.6931471805599453)
    big = np.full((3, 1), 100.0 + 0j)
    sat = EmbeddingState(big, big, big, big, np.zeros(1), np.zeros(1))
    assert sample_loglik(sat, TrainingSample(0, 1, 1, Term.FORMATION_SUPERVISED)) == 0.0
    for _ in range(100):
        st = random_state(rng, 5, 3, scale=0.8)
        s = random_sample(rng, 5)
        from semigraph.training import sample_score

        naive = math.log(1.0 / (1.0 + math.exp(-s.gamma * sample_score(st, s))))
        assert abs(sample_loglik(st, s) - naive) < 1e-12


def test_kernel_matches_reference_steps(rng):
    """The compiled pass equals repeated sample_gradient/apply_gradient."""
    n, d = 6, 3
    state = random_state(rng, n, d, scale=0.5)
    samples = [random_sample(rng, n) for _ in range(200)]
    weights = np.array([1.0, 1.0, 0.3, 0.7])
    eta1, eta2, total, floor = 0.05, 0.01, 150.0, 1e-4

    ref = state.copy()
    for tau, s in enumerate(samples):
        decay = max(1 - tau / total, floor)
        apply_gradient(ref, sample_gradient(ref, s), eta1 * decay * weights[s.term], eta2 * decay)

    batch = SampleBatch(
        np.array([s.i for s in samples]),
        np.array([s.j for s in samples]),
        np.array([s.gamma for s in samples], dtype=np.float64),
        np.array([int(s.term) for s in samples]),
    )
    P = np.stack([state.v_f, state.v_d, state.u_f, state.u_d])
    TH = np.stack([state.theta_f, state.theta_d])
    tau = _kernels.sgd_pass(
        P, TH, batch.i, batch.j, batch.gamma, batch.term,
        weights, eta1, eta2, 0.0, total, floor, np.zeros(4), np.zeros(4),
    )
    assert tau == len(samples)
    for k, name in enumerate(("v_f", "v_d", "u_f", "u_d")):
        np.testing.assert_allclose(P[k], getattr(ref, name), rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(TH[0], ref.theta_f, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(TH[1], ref.theta_d, rtol=1e-12, atol=1e-14)


def test_dissolution_samples_leave_formation_parameters_untouched(rng):
    state = random_state(rng, 6, 2)
    before = state.copy()
    for term in (Term.DISSOLUTION_SUPERVISED, Term.DISSOLUTION_CONTEXT):
        s = TrainingSample(1, 4, 1, term)
        apply_gradient(state, sample_gradient(state, s), 0.5, 0.5)
    for name in ("v_f", "u_f", "theta_f"):
        assert np.array_equal(getattr(state, name), getattr(before, name))
    for term in (Term.FORMATION_SUPERVISED, Term.FORMATION_CONTEXT):
        s = TrainingSample(2, 3, -1, term)
        apply_gradient(state, sample_gradient(state, s), 0.5, 0.5)
    for name in ("v_d", "u_d", "theta_d"):
        assert not np.array_equal(getattr(state, name), getattr(before, name)) or name == "theta_d"


def test_single_positive_full_batch_monotone():
    state = init_state(4, 2, seed=1)
    batch = SampleBatch.from_pairs(np.array([[0, 1]]), 1, Term.FORMATION_SUPERVISED)
    values = []
    for _ in range(200):
        values.append(batch_loglik(state, batch)[Term.FORMATION_SUPERVISED])
        full_batch_step(state, batch, 0.1, 0.1)
    assert np.all(np.diff(values) > 0)


def test_full_batch_terms_non_decreasing():
    """Tiny 10-node dataset with fixed negatives; each term improves per step."""
    rng = np.random.default_rng(4)
    n = 10
    pos_f = np.array([[0, 1], [1, 2], [2, 3], [5, 6]])
    pos_d = np.array([[3, 4], [6, 7], [8, 9]])
    ctx = np.array([[0, 1], [1, 0], [1, 2], [2, 1], [7, 8], [8, 7]])
    parts = []
    for term, pos in (
        (Term.FORMATION_SUPERVISED, pos_f),
        (Term.DISSOLUTION_SUPERVISED, pos_d),
        (Term.FORMATION_CONTEXT, ctx),
        (Term.DISSOLUTION_CONTEXT, ctx),
    ):
        from semigraph.sampling import negative_samples

        parts.append(SampleBatch.from_pairs(pos, 1, term))
        parts.append(negative_samples(pos, n, 3, rng, term=term))
    batch = SampleBatch.concat(parts)
    state = init_state(n, 3, seed=2)
    history = []
    for _ in range(100):
        history.append(batch_loglik(state, batch))
        full_batch_step(state, batch, 0.05, 0.05)
    for term in Term:
        series = np.array([h[term] for h in history])
        assert np.all(np.diff(series) >= -1e-12), term


@pytest.fixture(scope="module")
def synth_net():
    return generate(SynthConfig(num_nodes=40, num_communities=2, snapshots=4, p_in=0.2, p_out=0.02, seed=3))


FAST = TrainConfig(epochs=3, walk=WalkConfig(walk_length=10, window=2))


def test_train_deterministic(synth_net):
    a, ra = train(synth_net, 2, FAST, "semigraph")
    b, rb = train(synth_net, 2, FAST, "semigraph")
    assert a.equals(b)
    assert ra.rows == rb.rows or np.allclose(
        [list(r.values()) for r in ra.rows], [list(r.values()) for r in rb.rows], equal_nan=True
    )


def test_lambda_zero_equals_supervised(synth_net):
    cfg = replace(FAST, lambda_f=0.0, lambda_d=0.0)
    a, _ = train(synth_net, 2, cfg, "semigraph")
    b, _ = train(synth_net, 2, cfg, "supervised")
    assert a.equals(b)


def test_modes_select_terms():
    cfg = TrainConfig()
    assert set(active_terms(cfg, "semigraph")) == set(Term)
    assert set(active_terms(cfg, "supervised")) == {Term.FORMATION_SUPERVISED, Term.DISSOLUTION_SUPERVISED}
    assert set(active_terms(cfg, "embedding")) == {Term.FORMATION_CONTEXT, Term.DISSOLUTION_CONTEXT}
    assert active_terms(replace(cfg, lambda_f=0.0), "semigraph").keys() == {
        Term.FORMATION_SUPERVISED, Term.DISSOLUTION_SUPERVISED, Term.DISSOLUTION_CONTEXT
    }
    with pytest.raises(ValueError):
        active_terms(cfg, "bogus")


def test_supervised_mode_leaves_context_vectors_alone(synth_net):
    state, report = train(synth_net, 2, FAST, "supervised")
    init = init_state(synth_net.node_count, FAST.d, FAST.seed)
    assert np.array_equal(state.u_f, init.u_f) and np.array_equal(state.u_d, init.u_d)
    assert np.all(np.isnan(report.column("L_fu")))
    assert np.all(report.column("L_f") == report.column("L_fs"))


def test_report_rows_and_csv(synth_net, tmp_path):
    _, report = train(synth_net, 2, FAST, "semigraph")
    assert len(report) == FAST.epochs
    for name in ("L_fs", "L_fu", "L_ds", "L_du"):
        col = report.column(name)
        assert np.all(col <= 0) and np.all(np.isfinite(col))
    np.testing.assert_allclose(
        report.column("L_f"), report.column("L_fs") + FAST.lambda_f * report.column("L_fu")
    )
    path = tmp_path / "metrics.csv"
    report.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "epoch,L_fs,L_fu,L_f,L_ds,L_du,L_d"
    assert len(lines) == FAST.epochs + 1


def test_phase_modulus_preserved(synth_net):
    state, _ = train(synth_net, 2, replace(FAST, eta2=0.5), "semigraph")
    assert np.allclose(np.abs(state.W_f), 1.0, atol=1e-15, rtol=0)


def test_train_rejects_origin_zero(synth_net):
    with pytest.raises(ValueError):
        train(synth_net, 0, FAST)


def test_divergence_detected(synth_net):
    with pytest.raises(DivergedTrainingError) as err:
        train(synth_net, 2, replace(FAST, eta1=1e6), "supervised")
    assert err.value.epoch >= 1


def test_no_samples_returns_initial_state():
    net = TemporalNetwork((Snapshot(0), Snapshot(1)), 3)
    state, report = train(net, 1, FAST, "semigraph")
    assert state.equals(init_state(3, FAST.d, FAST.seed)) and len(report) == 0


def test_config_validation():
    for bad in (dict(d=0), dict(lambda_f=-1), dict(eta1=0), dict(epochs=0), dict(k_neg=0), dict(p=0)):
        with pytest.raises(ValueError):
            TrainConfig(**bad)
