"""Multi-level dense-layer neural network toolkit for tabular regression.

A from-scratch training stack: a deterministic matrix kernel (compiled with
a pure-python fallback), layer primitives with analytic gradients, a
multi-branch layer graph, Adam, z-score data preparation, regression
metrics, an OLS baseline, and CSV/SVG report artifacts.
"""

from .backend import active_backend, available_backends, set_backend
from .data import Dataset, Normalizer, SplitDataset, load_csv, prepare_split
from .graph import ModelGraph, build_default, build_from_spec, checkpoint_load, checkpoint_save
from .metrics import EvalPair, MetricsReport, metrics_report
from .modelspec import ArchitectureSpec, default_spec, parse_spec, render_spec, validate_spec
from .optim import AdamHyper, AdamState, adam_init, adam_step
from .train import GradCheckResult, History, TrainConfig, evaluate, grad_check, train_loop

__version__ = "0.1.0"

__all__ = [
    "ArchitectureSpec",
    "AdamHyper",
    "AdamState",
    "Dataset",
    "EvalPair",
    "GradCheckResult",
    "History",
    "MetricsReport",
    "ModelGraph",
    "Normalizer",
    "SplitDataset",
    "TrainConfig",
    "active_backend",
    "adam_init",
    "adam_step",
    "available_backends",
    "build_default",
    "build_from_spec",
    "checkpoint_load",
    "checkpoint_save",
    "default_spec",
    "evaluate",
    "grad_check",
    "load_csv",
    "metrics_report",
    "parse_spec",
    "prepare_split",
    "render_spec",
    "set_backend",
    "train_loop",
    "validate_spec",
]
