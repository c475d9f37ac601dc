"""Boston-housing CSV loading, deterministic splitting, and z-score
normalization.

The canonical pipeline: 506 rows split 405/101 into train/test by a seeded
shuffle, the last 20% of the shuffled training rows held out for validation,
and features scaled to mean 0 / population std 1 using training rows only.
Targets (MEDV, in $1000s) are never scaled.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DatasetError, ShapeError

FEATURE_NAMES = (
    "CRIM", "ZN", "INDUS", "CHAS", "NOX", "RM", "AGE",
    "DIS", "RAD", "TAX", "PTRATIO", "B", "LSTAT",
)
TARGET_NAME = "MEDV"
COLUMN_NAMES = FEATURE_NAMES + (TARGET_NAME,)


@dataclass
class Dataset:
    features: np.ndarray  # n x 13, FEATURE_NAMES order
    targets: np.ndarray  # n x 1, $1000s
    row_ids: np.ndarray  # original file row indices

    @property
    def n(self) -> int:
        return self.features.shape[0]

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            features=self.features[idx].copy(),
            targets=self.targets[idx].copy(),
            row_ids=self.row_ids[idx].copy(),
        )

    def with_features(self, features) -> "Dataset":
        return Dataset(features=features, targets=self.targets, row_ids=self.row_ids)


@dataclass
class SplitDataset:
    train: Dataset
    validation: Dataset
    test: Dataset
    seed: int


def load_csv(path) -> Dataset:
    """Parse a feature CSV; columns may be in any order but all 14 must exist."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        missing = [name for name in COLUMN_NAMES if name not in header]
        if missing:
            raise DatasetError(f"{path}: missing column(s) {', '.join(missing)}")
        order = [header.index(name) for name in COLUMN_NAMES]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            values = []
            for name, col in zip(COLUMN_NAMES, order):
                cell = row[col].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {lineno}, column {name}: "
                        f"cannot parse {cell!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise DatasetError(
                        f"{path}: row {lineno}, column {name}: non-finite value"
                    )
                values.append(value)
            rows.append(values)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    table = np.array(rows, dtype=np.float64)
    features = np.ascontiguousarray(table[:, :-1])
    chas = features[:, FEATURE_NAMES.index("CHAS")]
    bad = np.nonzero((chas != 0.0) & (chas != 1.0))[0]
    if bad.size:
        raise DatasetError(
            f"{path}: row {bad[0] + 2}, column CHAS: expected 0 or 1, got {chas[bad[0]]}"
        )
    return Dataset(
        features=features,
        targets=np.ascontiguousarray(table[:, -1:]),
        row_ids=np.arange(table.shape[0]),
    )


def write_csv(d: Dataset, path) -> None:
    """Inverse of load_csv: values are written in round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(COLUMN_NAMES)
        for i in range(d.n):
            writer.writerow(
                [repr(float(v)) for v in d.features[i]] + [repr(float(d.targets[i, 0]))]
            )


def train_test_split(d: Dataset, seed: int, n_train: int = 405):
    """Seeded shuffle of row indices; first n_train rows become training data."""
    if n_train >= d.n:
        raise DatasetError(f"n_train {n_train} must be smaller than the {d.n} rows")
    if n_train < 1:
        raise DatasetError(f"n_train must be positive, got {n_train}")
    perm = np.random.default_rng(seed).permutation(d.n)
    return d.take(perm[:n_train]), d.take(perm[n_train:])


def validation_split(train: Dataset, fraction: float = 0.2):
    """Hold out the final floor(fraction*n) rows (post-shuffle order)."""
    if not 0.0 <= fraction < 1.0:
        raise DatasetError(f"validation fraction must be in [0, 1), got {fraction}")
    n_val = int(fraction * train.n)
    n_fit = train.n - n_val
    return train.take(np.arange(n_fit)), train.take(np.arange(n_fit, train.n))


@dataclass
class Normalizer:
    mu: np.ndarray  # 1 x 13
    sigma: np.ndarray  # 1 x 13
    sigma_floor: float = 1e-12


def fit_normalizer(train_features, sigma_floor: float = 1e-12) -> Normalizer:
    """Per-column mean and population (1/n) standard deviation.

    Columns with no spread get sigma 1 so they transform to exactly 0.
    """
    x = np.asarray(train_features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DatasetError("normalizer needs at least 2 rows of features")
    mu = x.mean(axis=0, keepdims=True)
    sigma = np.sqrt(np.mean((x - mu) ** 2, axis=0, keepdims=True))
    sigma = np.where(sigma < sigma_floor, 1.0, sigma)
    return Normalizer(mu=mu, sigma=sigma, sigma_floor=sigma_floor)


def transform(nz: Normalizer, x) -> np.ndarray:
    """(x - mu) / sigma with the fitted statistics; never refits."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != nz.mu.shape[1]:
        raise ShapeError(
            f"transform: expected N x {nz.mu.shape[1]} features, got {x.shape}"
        )
    return (x - nz.mu) / nz.sigma


def prepare_split(
    d: Dataset, seed: int, n_train: int = 405, validation_fraction: float = 0.2
):
    """Full canonical pipeline: split, fit normalizer on the training rows,
    transform every partition, carve out validation. Returns
    (SplitDataset with normalized features, Normalizer)."""
    train, test = train_test_split(d, seed, n_train)
    nz = fit_normalizer(train.features)
    train = train.with_features(transform(nz, train.features))
    test = test.with_features(transform(nz, test.features))
    fit, validation = validation_split(train, validation_fraction)
    return SplitDataset(train=fit, validation=validation, test=test, seed=seed), nz
