"""Closed-form ordinary least squares, the deterministic linear-regression
comparison row and an independent sanity anchor for the network.

The fit solves the normal equations through a Householder QR factorization
of the [1 | X] design matrix (numpy's LAPACK binding), which is numerically
stable and deterministic. Rank deficiency is reported as an error naming the
dependent column; there is no silent pseudo-inverse fallback.
"""

from dataclasses import dataclass

import numpy as np

from .data import FEATURE_NAMES
from .errors import FitError, ShapeError

# |R[j,j]| below this fraction of the largest diagonal marks column j dependent
RANK_TOLERANCE = 1e-8


@dataclass
class LinearModel:
    coefficients: np.ndarray  # p x 1
    intercept: float

    def predict(self, x) -> np.ndarray:
        return x @ self.coefficients + self.intercept


def _column_name(j: int, p: int) -> str:
    if j == 0:
        return "intercept"
    if p == len(FEATURE_NAMES):
        return FEATURE_NAMES[j - 1]
    return f"column {j - 1}"


def ols_fit_predict(x_train, y_train, x_eval):
    """Fit intercept + coefficients by QR and predict on x_eval.

    Returns (LinearModel, predictions as N x 1).
    """
    x_train = np.asarray(x_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64).reshape(-1, 1)
    x_eval = np.asarray(x_eval, dtype=np.float64)
    n, p = x_train.shape
    if y_train.shape[0] != n:
        raise ShapeError(f"{n} feature rows but {y_train.shape[0]} targets")
    if x_eval.ndim != 2 or x_eval.shape[1] != p:
        raise ShapeError(f"eval features must be N x {p}, got {x_eval.shape}")
    if n <= p + 1:
        raise FitError(f"need more than {p + 1} rows to fit {p} features, got {n}")

    design = np.hstack([np.ones((n, 1)), x_train])
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    limit = RANK_TOLERANCE * diag.max()
    deficient = np.nonzero(diag <= limit)[0]
    if deficient.size:
        j = int(deficient[0])
        raise FitError(
            f"design matrix is rank deficient: {_column_name(j, p)} is linearly "
            f"dependent on earlier columns"
        )
    beta = np.linalg.solve(r, q.T @ y_train)
    model = LinearModel(coefficients=beta[1:], intercept=float(beta[0, 0]))
    return model, model.predict(x_eval)
