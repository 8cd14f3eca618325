"""Experiment runner: method grids, rolling origins, sweeps and result files."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import platform
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from .baselines import BASELINE_KINDS
from .estimators import HeuristicPredictor, SemiGraph
from .evaluation import DegenerateTaskError, auc, build_task
from .prediction import PREDICTION_MODES, TASKS
from .sampling import WalkConfig
from .synth import SynthConfig, generate
from .temporal_graph import TemporalNetwork, read_edge_list
from .training import DivergedTrainingError, TrainConfig

LEARNED_METHODS = {"semigraph": "semigraph", "supervised": "supervised", "graphemb": "embedding"}
METHODS = (*LEARNED_METHODS, *BASELINE_KINDS)
RESULT_COLUMNS = (
    "dataset", "method", "task", "origin_t", "auc", "positives", "negatives",
    "seed", "config_hash", "note",
)
SWEEP_COLUMNS = RESULT_COLUMNS + ("param", "value")
SWEEP_PARAMS = ("lambda", "d")


class LeakageError(RuntimeError):
    """Results changed when the future beyond ``t + 1`` was removed."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a results table.

    Either ``dataset`` (an edge-list path) or ``synth`` describes the data;
    with neither, the default synthetic generator is used. For synthetic data
    each run seed ``s`` draws its own network with generator seed
    ``synth.seed + s``.
    """

    dataset: str | None = None
    synth: SynthConfig | None = None
    t: int | None = None
    methods: tuple[str, ...] = METHODS
    train: TrainConfig = field(default_factory=TrainConfig)
    prediction_mode: str = "additive"
    complementary: bool = True
    out_dir: str | None = None
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; expected a subset of {METHODS}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.dataset is not None and self.synth is not None:
            raise ValueError("give either a dataset path or a synthetic config, not both")
        if self.dataset is None and self.synth is None:
            object.__setattr__(self, "synth", SynthConfig())
        if self.prediction_mode not in PREDICTION_MODES:
            raise ValueError(f"unknown prediction mode {self.prediction_mode!r}")

    @property
    def dataset_name(self) -> str:
        if self.name:
            return self.name
        if self.dataset is not None:
            return Path(self.dataset).stem
        return "synth"

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=str))


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    method: str
    task: str
    origin_t: int
    auc: float
    positives: int
    negatives: int
    seed: int | str
    config_hash: str
    note: str = ""
    param: str | None = None
    value: float | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["auc"] = "" if math.isnan(self.auc) else repr(self.auc)
        return d


def config_hash(payload: Mapping[str, Any]) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


def _cell_payload(cfg: ExperimentConfig, method: str, seed: int, t: int) -> dict:
    payload = {
        "dataset": cfg.dataset,
        "synth": None if cfg.synth is None else asdict(cfg.synth),
        "method": method,
        "seed": seed,
        "origin_t": t,
    }
    if method in LEARNED_METHODS:
        payload["train"] = asdict(cfg.train)
        payload["prediction_mode"] = cfg.prediction_mode
    else:
        payload["complementary"] = cfg.complementary
    return payload


def load_networks(cfg: ExperimentConfig) -> dict[int, TemporalNetwork]:
    """One network per run seed (shared when reading from a file)."""
    if cfg.dataset is not None:
        net = read_edge_list(cfg.dataset)
        return {s: net for s in cfg.seeds}
    return {s: generate(replace(cfg.synth, seed=cfg.synth.seed + s)) for s in cfg.seeds}


def default_origin(net: TemporalNetwork) -> int:
    """Latest origin whose next snapshot exists."""
    if net.last < 1:
        raise ValueError("need at least two snapshots to evaluate a transition")
    return net.last - 1


def make_predictor(cfg: ExperimentConfig, method: str, seed: int):
    if method in LEARNED_METHODS:
        tc = replace(cfg.train, seed=seed)
        return SemiGraph(
            d=tc.d, lambda_f=tc.lambda_f, lambda_d=tc.lambda_d, eta1=tc.eta1, eta2=tc.eta2,
            p=tc.p, epochs=tc.epochs, k_neg=tc.k_neg, walks_per_node=tc.walk.walks_per_node,
            walk_length=tc.walk.walk_length, window=tc.walk.window,
            mode=LEARNED_METHODS[method], prediction_mode=cfg.prediction_mode, random_state=seed,
        )
    return HeuristicPredictor(kind=method, complementary=cfg.complementary)


def _run_cells(
    cfg: ExperimentConfig,
    networks: Mapping[int, TemporalNetwork],
    methods: Iterable[str],
    tag: dict | None = None,
) -> list[ResultRow]:
    rows: list[ResultRow] = []
    tag = tag or {}
    for seed in cfg.seeds:
        net = networks[seed]
        t = default_origin(net) if cfg.t is None else cfg.t
        tasks = {}
        for task in TASKS:
            try:
                tasks[task] = build_task(net, t, task)
            except DegenerateTaskError as exc:
                tasks[task] = exc
        for method in methods:
            h = config_hash(_cell_payload(cfg, method, seed, t) | tag)
            note, model = "", None
            try:
                model = make_predictor(cfg, method, seed).fit(net.truncate(t), t)
            except (ValueError, DivergedTrainingError) as exc:
                note = f"training skipped: {exc}"
            for task in TASKS:
                et = tasks[task]
                if isinstance(et, Exception):
                    rows.append(ResultRow(cfg.dataset_name, method, task, t, math.nan, 0, 0, seed, h, f"skipped: {et}", **tag))
                    continue
                if model is None:
                    rows.append(ResultRow(cfg.dataset_name, method, task, t, math.nan, et.positives, et.negatives, seed, h, note, **tag))
                    continue
                res = auc(model.decision_function(et.pairs, task), et.labels)
                rows.append(ResultRow(cfg.dataset_name, method, task, t, res.auc, res.positives, res.negatives, seed, h, "", **tag))
    return rows


def run_experiment(
    cfg: ExperimentConfig,
    networks: Mapping[int, TemporalNetwork] | None = None,
    transform: Callable[[TemporalNetwork], TemporalNetwork] | None = None,
) -> list[ResultRow]:
    """One row per method x task x seed at origin ``cfg.t``.

    Learned methods train on the network truncated at ``t`` and are scored
    on the ``t -> t+1`` transition. Degenerate tasks and failed training runs
    become rows with an empty AUC and the reason in ``note``.
    """
    networks = networks if networks is not None else load_networks(cfg)
    if transform is not None:
        networks = {s: transform(n) for s, n in networks.items()}
    return _run_cells(cfg, networks, cfg.methods)


def run_rolling(
    cfg: ExperimentConfig, t_start: int, t_end: int, *, verify: bool = False
) -> list[ResultRow]:
    """Repeat :func:`run_experiment` for every origin in ``t_start..t_end``.

    With ``verify`` each origin is re-run on copies of the data truncated at
    ``t + 1``; any difference raises :class:`LeakageError`.
    """
    if t_end < t_start:
        raise ValueError("t_end must be >= t_start")
    networks = load_networks(cfg)
    last = min(n.last for n in networks.values())
    if t_start < 0 or t_end + 1 > last:
        raise ValueError(f"origins must lie in 0..{last - 1}")
    rows = []
    for t in range(t_start, t_end + 1):
        at = replace(cfg, t=t)
        got = run_experiment(at, networks)
        if verify:
            cut = run_experiment(at, networks, transform=lambda n, t=t: n.truncate(t + 1))
            if [r.as_dict() for r in got] != [r.as_dict() for r in cut]:
                raise LeakageError(f"origin {t}: results depend on data after t+1")
        rows.extend(got)
    return rows


def run_sweep(cfg: ExperimentConfig, parameter: str, values: Iterable[float]) -> list[ResultRow]:
    """SemiGraph rows for each value of ``lambda`` (both weights) or ``d``."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if parameter not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMS}")
    networks = load_networks(cfg)
    rows = []
    for v in values:
        if parameter == "lambda":
            tc = replace(cfg.train, lambda_f=float(v), lambda_d=float(v))
        else:
            tc = replace(cfg.train, d=int(v))
        at = replace(cfg, train=tc, methods=("semigraph",))
        rows.extend(_run_cells(at, networks, at.methods, {"param": parameter, "value": v}))
    return rows


def summarize(rows: Iterable[ResultRow]) -> list[dict]:
    """Seed-averaged AUC per dataset, method, task, origin (and sweep value)."""
    groups: dict[tuple, list[ResultRow]] = {}
    for r in rows:
        groups.setdefault((r.dataset, r.method, r.task, r.origin_t, r.param, r.value), []).append(r)
    out = []
    for (ds, method, task, t, param, value), rs in groups.items():
        vals = [r.auc for r in rs if not math.isnan(r.auc)]
        row = {
            "dataset": ds, "method": method, "task": task, "origin_t": t,
            "auc_mean": repr(float(np.mean(vals))) if vals else "",
            "auc_std": repr(float(np.std(vals))) if vals else "",
            "runs": len(vals), "skipped": len(rs) - len(vals),
        }
        if param is not None:
            row |= {"param": param, "value": value}
        out.append(row)
    return out


def write_rows(rows: list[ResultRow], path: str | os.PathLike) -> None:
    sweep = any(r.param is not None for r in rows)
    cols = SWEEP_COLUMNS if sweep else RESULT_COLUMNS
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r.as_dict())


def write_summary(rows: list[ResultRow], path: str | os.PathLike) -> None:
    summary = summarize(rows)
    cols = list(summary[0]) if summary else ["dataset", "method", "task", "origin_t", "auc_mean"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        w.writerows(summary)


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def write_manifest(cfg: ExperimentConfig, path: str | os.PathLike, **extra) -> None:
    manifest = {
        "config": cfg.to_dict(),
        "seeds": list(cfg.seeds),
        "tool_version": tool_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    manifest |= extra
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def save_outputs(cfg: ExperimentConfig, rows: list[ResultRow], out_dir, **extra) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(rows, out / "results.csv")
    write_summary(rows, out / "summary.csv")
    write_manifest(cfg, out / "manifest.json", **extra)
    return out


# flat key=value configuration --------------------------------------------

_TRAIN_KEYS = {f.name for f in fields(TrainConfig)} - {"walk", "seed"}
_WALK_KEYS = {"walks_per_node", "walk_length", "window", "directed_walks"}
_SYNTH_KEYS = {f.name for f in fields(SynthConfig)} - {"seed"}
_TOP_KEYS = {"dataset", "name", "t", "methods", "seeds", "prediction_mode", "complementary", "out_dir", "synth_seed", "lambda"}
CONFIG_KEYS = frozenset(_TRAIN_KEYS | _WALK_KEYS | _SYNTH_KEYS | _TOP_KEYS)


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(template, value):
    if isinstance(value, str):
        if isinstance(template, bool):
            low = value.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"not a boolean: {value!r}")
            return low in ("true", "1", "yes")
        if isinstance(template, int) and not isinstance(template, bool):
            return int(value)
        if isinstance(template, float):
            return float(value)
    return value


def _split(value) -> tuple:
    if isinstance(value, str):
        return tuple(v.strip() for v in value.split(",") if v.strip())
    return tuple(value)


def config_from_mapping(settings: Mapping[str, Any]) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from flat keys (strings allowed)."""
    unknown = set(settings) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown configuration keys {sorted(unknown)}")
    s = {k: v for k, v in settings.items() if v is not None}

    base_walk = WalkConfig()
    walk = WalkConfig(
        walks_per_node=int(s.get("walks_per_node", base_walk.walks_per_node)),
        walk_length=int(s.get("walk_length", base_walk.walk_length)),
        window=int(s.get("window", base_walk.window)),
        directed=_coerce(False, s.get("directed_walks", False)),
    )
    base = TrainConfig()
    train_kw = {}
    for k in _TRAIN_KEYS:
        if k in s:
            train_kw[k] = int(s[k]) if k == "p" else _coerce(getattr(base, k), s[k])
    if "lambda" in s:
        lam = float(s["lambda"])
        train_kw.setdefault("lambda_f", lam)
        train_kw.setdefault("lambda_d", lam)
    train = TrainConfig(walk=walk, **train_kw)

    synth = None
    if "dataset" not in s:
        sbase = SynthConfig()
        synth_kw = {k: _coerce(getattr(sbase, k), s[k]) for k in _SYNTH_KEYS if k in s}
        synth = SynthConfig(seed=int(s.get("synth_seed", 0)), **synth_kw)

    kw: dict[str, Any] = {"train": train, "synth": synth}
    if "dataset" in s:
        kw["dataset"] = str(s["dataset"])
    if "t" in s:
        kw["t"] = int(s["t"])
    if "methods" in s:
        kw["methods"] = _split(s["methods"])
    if "seeds" in s:
        kw["seeds"] = tuple(int(x) for x in _split(s["seeds"]))
    if "prediction_mode" in s:
        kw["prediction_mode"] = str(s["prediction_mode"])
    if "complementary" in s:
        kw["complementary"] = _coerce(True, s["complementary"])
    for k in ("out_dir", "name"):
        if k in s:
            kw[k] = str(s[k])
    return ExperimentConfig(**kw)
