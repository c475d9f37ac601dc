"""Dense 2-D float64 matrix operations.

Matrices are C-contiguous (row-major) numpy arrays: rows are samples, columns
are features. All operations are pure and reduce in a fixed order, so results
are bit-reproducible for fixed inputs regardless of backend.
"""

import numpy as np

from .backend import matmul_kernel
from .errors import ShapeError

_ELEMENTWISE = {"add": np.add, "sub": np.subtract, "mul": np.multiply}


def as_matrix(values) -> np.ndarray:
    """Coerce nested sequences (or an array) to a C-contiguous float64 2-D array."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def _check_matrix(a, name):
    if not (isinstance(a, np.ndarray) and a.ndim == 2 and a.dtype == np.float64):
        raise ShapeError(f"{name} must be a 2-D float64 array")
    return np.ascontiguousarray(a)


def matmul(a, b, transpose_a=False, transpose_b=False) -> np.ndarray:
    """Matrix product with optional transposes, deterministic reduction order.

    Each output element sums its products along the shared dimension from
    first to last index, so the result is bitwise reproducible and
    matmul(a, b).T equals matmul(b, a, transpose_a=True, transpose_b=True)
    to the last bit.
    """
    a = _check_matrix(a, "a")
    b = _check_matrix(b, "b")
    inner_a = a.shape[0] if transpose_a else a.shape[1]
    inner_b = b.shape[1] if transpose_b else b.shape[0]
    if inner_a != inner_b:
        raise ShapeError(
            f"matmul: shapes {a.shape} x {b.shape} with "
            f"transpose_a={transpose_a}, transpose_b={transpose_b}: "
            f"inner dimensions {inner_a} and {inner_b} differ"
        )
    return matmul_kernel(a, b, transpose_a, transpose_b)


def elementwise(a, b, op: str) -> np.ndarray:
    """Elementwise add/sub/mul; b may be 1 x cols and is then applied per row."""
    a = _check_matrix(a, "a")
    b = _check_matrix(b, "b")
    if op not in _ELEMENTWISE:
        raise ValueError(f"unknown elementwise op {op!r}")
    if a.shape != b.shape and not (b.shape == (1, a.shape[1])):
        raise ShapeError(
            f"elementwise {op}: shapes {a.shape} and {b.shape} are neither "
            f"equal nor broadcastable as (1, cols)"
        )
    return _ELEMENTWISE[op](a, b)
