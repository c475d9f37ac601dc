"""Training loop, evaluation entry point, and the finite-difference
gradient-check harness.

Training is mini-batch Adam on MSE over raw (unscaled) targets; epoch-end
train/validation MAE+MSE are computed on the full partitions in infer mode,
so the history is comparable across batch sizes. Runs are bit-reproducible
per (seed, config, data).
"""

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .data import SplitDataset
from .errors import ConfigError
from .layers import mse_loss
from .metrics import EvalPair, MetricsReport, mae, metrics_report, mse
from .optim import AdamHyper, AdamState, adam_init, adam_step


@dataclass
class TrainConfig:
    epochs: int = 1000
    learning_rate: float = 0.001
    batch_size: int = 32
    validation_fraction: float = 0.2
    seed: int = 0
    shuffle_each_epoch: bool = True

    def validate(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 2:
            raise ConfigError(
                f"batch size must be >= 2 (batch norm needs it), got {self.batch_size}"
            )
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(
                f"validation fraction must be in [0, 1), got {self.validation_fraction}"
            )
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_mae: float
    train_mse: float
    val_mae: float
    val_mse: float


@dataclass
class History:
    records: list[EpochRecord] = field(default_factory=list)
    duration_seconds: float = 0.0

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["epoch", "train_mae", "train_mse", "val_mae", "val_mse"])
            for r in self.records:
                writer.writerow(
                    [r.epoch, repr(r.train_mae), repr(r.train_mse),
                     repr(r.val_mae), repr(r.val_mse)]
                )


def batch_slices(n: int, batch_size: int):
    """Consecutive index ranges; a trailing fragment of one row is folded
    into the previous batch (batch norm needs at least two rows)."""
    bounds = list(range(0, n, batch_size)) + [n]
    if len(bounds) > 2 and bounds[-1] - bounds[-2] < 2:
        del bounds[-2]
    return [(lo, hi) for lo, hi in zip(bounds, bounds[1:])]


def _partition_errors(g, features, targets):
    if features.shape[0] == 0:
        return math.nan, math.nan
    pair = EvalPair(targets, g.forward(features, mode="infer"))
    return mae(pair), mse(pair)


def train_loop(g, data: SplitDataset, cfg: TrainConfig):
    """Train the graph on data.train, tracking data.validation per epoch.

    Features must already be normalized. Returns (g, History).
    """
    cfg.validate()
    fit_x, fit_y = data.train.features, data.train.targets
    val_x, val_y = data.validation.features, data.validation.targets
    if fit_x.shape[0] < 2:
        raise ConfigError(f"need at least 2 training rows, got {fit_x.shape[0]}")
    if fit_x.shape[1] != g.input_width:
        raise ConfigError(
            f"graph expects {g.input_width} features, data has {fit_x.shape[1]}"
        )

    rng = np.random.default_rng(cfg.seed)
    state = adam_init(g, AdamHyper(learning_rate=cfg.learning_rate))
    params = dict(g.trainable_tensors())
    slices = batch_slices(fit_x.shape[0], cfg.batch_size)

    history = History()
    start = time.perf_counter()
    for epoch in range(1, cfg.epochs + 1):
        if cfg.shuffle_each_epoch:
            order = rng.permutation(fit_x.shape[0])
        else:
            order = np.arange(fit_x.shape[0])
        for lo, hi in slices:
            idx = order[lo:hi]
            pred = g.forward(fit_x[idx], mode="train")
            _, grad = mse_loss(pred, fit_y[idx])
            g.backward(grad)
            adam_step(params, g.gradient_tensors(), state)
        train_mae, train_mse = _partition_errors(g, fit_x, fit_y)
        val_mae, val_mse = _partition_errors(g, val_x, val_y)
        history.records.append(
            EpochRecord(epoch, train_mae, train_mse, val_mae, val_mse)
        )
    history.duration_seconds = time.perf_counter() - start
    return g, history


def evaluate(g, features, targets) -> MetricsReport:
    """Infer-mode predictions scored with all four metrics."""
    return metrics_report(targets, g.forward(features, mode="infer"))


@dataclass(frozen=True)
class GradCheckResult:
    max_relative_error: float
    passed: bool
    worst_tensor: str


# tensors with fewer elements are probed exhaustively; larger ones sampled
EXHAUSTIVE_LIMIT = 500
SAMPLE_COUNT = 200


def grad_check(g, x, y, h: float = 1e-5, tolerance: float = 1e-4) -> GradCheckResult:
    """Compare analytic gradients against central finite differences.

    Loss is MSE of a train-mode forward with running statistics frozen.
    Relative error is |a-n| / max(|a|, |n|, 1e-8); a scalar that fails at h
    is retried once at h/10 before counting (ReLU kinks inflate the
    difference quotient when a net input sits within h of zero).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)

    def loss_at():
        pred = g.forward(x, mode="train", update_running=False)
        return mse_loss(pred, y)[0]

    _, grad = mse_loss(g.forward(x, mode="train", update_running=False), y)
    g.backward(grad)
    analytic = {name: arr.copy() for name, arr in g.gradient_tensors().items()}

    rng = np.random.default_rng(0)
    worst = 0.0
    worst_name = ""
    for name, param in g.trainable_tensors():
        if param.size <= EXHAUSTIVE_LIMIT:
            indices = range(param.size)
        else:
            indices = rng.choice(param.size, size=SAMPLE_COUNT, replace=False)
        flat = param.reshape(-1)
        a_flat = analytic[name].reshape(-1)
        for i in indices:
            rel = _probe(flat, i, a_flat[i], h, loss_at)
            if rel > tolerance:
                rel = min(rel, _probe(flat, i, a_flat[i], h / 10.0, loss_at))
            if rel > worst:
                worst = rel
                worst_name = name
    return GradCheckResult(float(worst), bool(worst <= tolerance), worst_name)


def _probe(flat, i, analytic_value, h, loss_at):
    original = flat[i]
    flat[i] = original + h
    loss_plus = loss_at()
    flat[i] = original - h
    loss_minus = loss_at()
    flat[i] = original
    numeric = (loss_plus - loss_minus) / (2.0 * h)
    return abs(analytic_value - numeric) / max(abs(analytic_value), abs(numeric), 1e-8)
