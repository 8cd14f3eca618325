"""Command line interface: ``semigraph <command> --help`` for details."""

from __future__ import annotations

import functools
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import harness
from .embedding import load_state, save_state
from .evaluation import build_task, auc as auc_of
from .prediction import PREDICTION_MODES, TASKS, rank_predictions, write_predictions_csv
from .synth import SynthConfig, generate
from .temporal_graph import EdgeListError, read_edge_list, write_edge_list
from .training import MODES, train

_TRAIN_OPTIONS = [
    click.option("--d", type=int, help="Embedding dimension."),
    click.option("--lambda", "lam", type=float, help="Sets both context weights."),
    click.option("--lambda-f", type=float, help="Formation context weight."),
    click.option("--lambda-d", type=float, help="Dissolution context weight."),
    click.option("--eta1", type=float, help="Vector learning rate."),
    click.option("--eta2", type=float, help="Phase learning rate."),
    click.option("--p", type=int, help="Number of past transitions used for supervision."),
    click.option("--epochs", type=int),
    click.option("--k-neg", type=int, help="Negatives per positive."),
    click.option("--walks-per-node", type=int),
    click.option("--walk-length", type=int),
    click.option("--window", type=int),
    click.option("--directed-walks/--undirected-walks", default=None),
]

_EXPERIMENT_OPTIONS = [
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                 help="Flat key = value file; command-line flags take precedence."),
    click.option("--dataset", type=click.Path(exists=True, dir_okay=False),
                 help="Edge list (source,target,time). Omit to use synthetic data."),
    click.option("--name", help="Dataset name written to the results."),
    click.option("--methods", help="Comma separated subset of: " + ",".join(harness.METHODS)),
    click.option("--seeds", help="Comma separated run seeds."),
    click.option("--prediction-mode", type=click.Choice(PREDICTION_MODES)),
    click.option("--complementary/--no-complementary", default=None,
                 help="Negate heuristic scores for dissolution."),
    click.option("--out-dir", type=click.Path(file_okay=False), help="Output directory."),
    click.option("--num-nodes", type=int),
    click.option("--num-communities", type=int),
    click.option("--snapshots", type=int),
    click.option("--rewire-rate", type=float),
    click.option("--synth-seed", type=int),
]


def _apply(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return deco


def _fail_cleanly(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (ValueError, IndexError, OSError, EdgeListError) as exc:
            raise click.ClickException(str(exc)) from exc
    return wrapper


def _settings(config_path, flags: dict) -> dict:
    merged = dict(harness.read_config_file(config_path)) if config_path else {}
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def _experiment_config(kwargs) -> harness.ExperimentConfig:
    kwargs = dict(kwargs)
    config_path = kwargs.pop("config_path", None)
    lam = kwargs.pop("lam", None)
    settings = _settings(config_path, kwargs)
    if lam is not None:
        settings["lambda"] = lam
    return harness.config_from_mapping(settings)


def _finish(cfg, rows, out_dir, **extra):
    if out_dir is None:
        cols = harness.SWEEP_COLUMNS if any(r.param is not None for r in rows) else harness.RESULT_COLUMNS
        click.echo(",".join(cols))
        for r in (row.as_dict() for row in rows):
            click.echo(",".join("" if r[c] is None else str(r[c]) for c in cols))
        return
    out = harness.save_outputs(cfg, rows, out_dir, command=" ".join(sys.argv[1:]), **extra)
    click.echo(f"wrote {len(rows)} rows to {out / 'results.csv'}")


@click.group()
@click.version_option(harness.tool_version(), prog_name="semigraph")
def main():
    """Predict link formation and dissolution in evolving networks."""


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--undirected", is_flag=True, help="Store every link in both directions.")
@_fail_cleanly
def ingest(source, output, undirected):
    """Validate an edge list and write it in canonical order."""
    net = read_edge_list(source, undirected=undirected)
    write_edge_list(net, output)
    edges = sum(len(s.edges) for s in net.snapshots)
    click.echo(f"{net.node_count} nodes, {len(net)} snapshots, {edges} timed edges -> {output}")


@main.command()
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--num-nodes", type=int, default=SynthConfig.num_nodes, show_default=True)
@click.option("--num-communities", type=int, default=SynthConfig.num_communities, show_default=True)
@click.option("--snapshots", type=int, default=SynthConfig.snapshots, show_default=True)
@click.option("--p-in", type=float, default=SynthConfig.p_in, show_default=True)
@click.option("--p-out", type=float, default=SynthConfig.p_out, show_default=True)
@click.option("--rewire-rate", type=float, default=SynthConfig.rewire_rate, show_default=True)
@click.option("--churn-asymmetry", type=float, default=SynthConfig.churn_asymmetry, show_default=True)
@click.option("--activity-dispersion", type=float, default=SynthConfig.activity_dispersion, show_default=True)
@click.option("--hazard-exponent", type=float, default=SynthConfig.hazard_exponent, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_fail_cleanly
def synth(output, **kw):
    """Generate a synthetic evolving network."""
    net = generate(SynthConfig(**kw))
    write_edge_list(net, output)
    click.echo(f"{net.node_count} nodes, {len(net)} snapshots -> {output}")


@main.command(name="train")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Model file.")
@click.option("--t", type=int, help="Origin snapshot index (default: last).")
@click.option("--mode", type=click.Choice(MODES), default="semigraph", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--metrics", type=click.Path(dir_okay=False), help="Per-epoch loss CSV.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@_apply(_TRAIN_OPTIONS)
@_fail_cleanly
def train_cmd(dataset, output, t, mode, seed, metrics, config_path, lam, **flags):
    """Fit embeddings on snapshots 0..t and save the model."""
    settings = _settings(config_path, flags)
    if lam is not None:
        settings["lambda"] = lam
    settings["dataset"] = dataset
    tc = replace(harness.config_from_mapping(settings).train, seed=seed)
    net = read_edge_list(dataset)
    t = net.last if t is None else t
    state, report = train(net.truncate(t), t, tc, mode)
    save_state(state, output)
    if metrics:
        report.write_csv(metrics)
    click.echo(f"trained {mode} on snapshots 0..{t} ({len(report)} epochs) -> {output}")


@main.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--task", type=click.Choice(TASKS), default="formation", show_default=True)
@click.option("--t", type=int, help="Origin snapshot index (default: last).")
@click.option("--mode", "prediction_mode", type=click.Choice(PREDICTION_MODES), default="additive", show_default=True)
@_fail_cleanly
def predict(dataset, model, output, task, t, prediction_mode):
    """Rank candidate pairs at origin t and write task,i,j,score,label."""
    net = read_edge_list(dataset)
    t = net.last if t is None else t
    labels = None
    if t + 1 <= net.last:
        labels = build_task(net, t, task).labels
    preds = rank_predictions(load_state(model), net, t, task, prediction_mode, labels)
    write_predictions_csv(preds, output, net.labels)
    msg = f"{len(preds)} {task} candidates -> {output}"
    if labels is not None:
        msg += f" (AUC {auc_of([p.score for p in preds], [p.label for p in preds]).auc:.4f})"
    click.echo(msg)


@main.command()
@click.option("--t", type=int, help="Origin (default: last transition).")
@_apply(_EXPERIMENT_OPTIONS + _TRAIN_OPTIONS)
@_fail_cleanly
def evaluate(t, **kwargs):
    """Evaluate every selected method at one origin."""
    cfg = _experiment_config(kwargs)
    if t is not None:
        cfg = replace(cfg, t=t)
    rows = harness.run_experiment(cfg)
    _finish(cfg, rows, cfg.out_dir)


@main.command()
@click.option("--t-start", type=int, required=True)
@click.option("--t-end", type=int, required=True)
@click.option("--verify", is_flag=True, help="Re-run each origin on truncated data and compare.")
@_apply(_EXPERIMENT_OPTIONS + _TRAIN_OPTIONS)
@_fail_cleanly
def rolling(t_start, t_end, verify, **kwargs):
    """Evaluate every origin from t-start to t-end."""
    cfg = _experiment_config(kwargs)
    rows = harness.run_rolling(cfg, t_start, t_end, verify=verify)
    _finish(cfg, rows, cfg.out_dir, t_start=t_start, t_end=t_end)


@main.command()
@click.option("--param", type=click.Choice(harness.SWEEP_PARAMS), required=True)
@click.option("--values", required=True, help="Comma separated values.")
@click.option("--t", type=int, help="Origin (default: last transition).")
@_apply(_EXPERIMENT_OPTIONS + _TRAIN_OPTIONS)
@_fail_cleanly
def sweep(param, values, t, **kwargs):
    """Run SemiGraph over a list of lambda or d values."""
    cfg = _experiment_config(kwargs)
    if t is not None:
        cfg = replace(cfg, t=t)
    cast = int if param == "d" else float
    vals = [cast(v) for v in values.split(",") if v.strip()]
    rows = harness.run_sweep(cfg, param, vals)
    _finish(cfg, rows, cfg.out_dir, param=param, values=vals)


if __name__ == "__main__":
    main()
