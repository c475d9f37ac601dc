"""Regression evaluation metrics over (actual, predicted) column vectors.

r2 is 1 - SS_res/SS_tot (may be negative for models worse than the mean),
mae and rmse are in target units, mse in squared units.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MetricError, ShapeError


class EvalPair:
    """Validated pair of N x 1 vectors: actual targets and predictions."""

    def __init__(self, actual, predicted):
        actual = np.asarray(actual, dtype=np.float64).reshape(-1, 1)
        predicted = np.asarray(predicted, dtype=np.float64).reshape(-1, 1)
        if actual.shape != predicted.shape:
            raise ShapeError(
                f"eval pair: {actual.shape} actuals vs {predicted.shape} predictions"
            )
        if actual.shape[0] < 1:
            raise ShapeError("eval pair: empty vectors")
        self.actual = actual
        self.predicted = predicted

    @property
    def n(self) -> int:
        return self.actual.shape[0]


@dataclass(frozen=True)
class MetricsReport:
    r2: float
    mae: float
    mse: float
    rmse: float

    def __str__(self):
        return (
            f"r2={self.r2:.4f} mae={self.mae:.4f} "
            f"mse={self.mse:.4f} rmse={self.rmse:.4f}"
        )


def r2(p: EvalPair) -> float:
    mean = p.actual.mean()
    ss_tot = float(np.sum((p.actual - mean) ** 2))
    if p.n < 2 or ss_tot <= 0.0:
        raise MetricError("R^2 undefined: actual values have zero total variance")
    ss_res = float(np.sum((p.actual - p.predicted) ** 2))
    return 1.0 - ss_res / ss_tot


def mae(p: EvalPair) -> float:
    return float(np.mean(np.abs(p.actual - p.predicted)))


def mse(p: EvalPair) -> float:
    diff = p.actual - p.predicted
    return float(np.mean(diff * diff))


def rmse(p: EvalPair) -> float:
    return float(np.sqrt(mse(p)))


def metrics_report(actual, predicted) -> MetricsReport:
    p = EvalPair(actual, predicted)
    return MetricsReport(r2=r2(p), mae=mae(p), mse=mse(p), rmse=rmse(p))
