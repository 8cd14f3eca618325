"""Semi-supervised complex embeddings for predicting link formation and dissolution."""

from .baselines import BASELINE_KINDS, baseline_rank, baseline_scores
from .embedding import EmbeddingState, hermitian_score, init_state, load_state, save_state
from .estimators import HeuristicPredictor, SemiGraph
from .evaluation import AucResult, DegenerateTaskError, EvalTask, auc, build_task, evaluate
from .harness import ExperimentConfig, run_experiment, run_rolling, run_sweep
from .prediction import candidate_pairs, rank_predictions, raw_scores, score_pair
from .sampling import Term, TrainingSample, WalkConfig
from .synth import SynthConfig, generate
from .temporal_graph import (
    Snapshot,
    TemporalNetwork,
    TransitionPair,
    derive_transition,
    ingest_edge_list,
    read_edge_list,
    union_graph,
    window_transitions,
    write_edge_list,
)
from .training import LossReport, TrainConfig, train

__all__ = [
    "AucResult", "BASELINE_KINDS", "DegenerateTaskError", "EmbeddingState", "EvalTask",
    "ExperimentConfig", "HeuristicPredictor", "LossReport", "SemiGraph", "Snapshot",
    "SynthConfig", "TemporalNetwork", "Term", "TrainConfig", "TrainingSample",
    "TransitionPair", "WalkConfig", "auc", "baseline_rank", "baseline_scores", "build_task",
    "candidate_pairs", "derive_transition", "evaluate", "generate", "hermitian_score",
    "ingest_edge_list", "init_state", "load_state", "rank_predictions", "raw_scores",
    "read_edge_list", "run_experiment", "run_rolling", "run_sweep", "save_state",
    "score_pair", "train", "union_graph", "window_transitions", "write_edge_list",
]
