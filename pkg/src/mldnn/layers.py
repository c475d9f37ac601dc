"""Layer primitives with analytic gradients: dense, ReLU, batch
normalization, column-wise concatenation, and MSE loss.

Forward passes in "train" mode return a cache that the matching backward
consumes; "infer" mode returns no cache and mutates nothing.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .tensor import matmul

ACTIVATIONS = ("relu", "linear")


@dataclass
class DenseParams:
    """Weights (in_dim x out_dim) and bias (1 x out_dim) of one dense layer."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.weights.ndim != 2 or self.bias.shape != (1, self.weights.shape[1]):
            raise ShapeError(
                f"dense params: weights {self.weights.shape} need bias "
                f"(1, {self.weights.shape[1]}), got {self.bias.shape}"
            )


@dataclass
class BatchNormState:
    """Learnable scale/shift plus running statistics for inference."""

    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.99
    epsilon: float = 1e-3

    @classmethod
    def create(cls, width: int, momentum: float = 0.99, epsilon: float = 1e-3):
        if not 0.0 < momentum < 1.0:
            raise ValueError(f"momentum must be in (0, 1), got {momentum}")
        if epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {epsilon}")
        return cls(
            gamma=np.ones((1, width)),
            beta=np.zeros((1, width)),
            running_mean=np.zeros((1, width)),
            running_var=np.ones((1, width)),
            momentum=momentum,
            epsilon=epsilon,
        )


@dataclass
class ActivationCache:
    """Values a forward pass saves for the backward pass."""

    input: np.ndarray
    net_input: np.ndarray | None = None
    output: np.ndarray | None = None
    # batchnorm extras
    x_hat: np.ndarray | None = None
    inv_std: np.ndarray | None = None


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(net_input: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    # subgradient at 0 is 0: strictly-positive gate
    return upstream * (net_input > 0.0)


def dense(x, p: DenseParams, activation: str, mode: str):
    """g(x W + b). Returns (output, cache); cache is None in infer mode."""
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    if x.shape[1] != p.weights.shape[0]:
        raise ShapeError(
            f"dense: input width {x.shape[1]} != weight rows {p.weights.shape[0]}"
        )
    z = matmul(x, p.weights) + p.bias
    out = relu(z) if activation == "relu" else z
    if mode == "train":
        return out, ActivationCache(input=x, net_input=z, output=out)
    return out, None


def dense_backward(cache: ActivationCache, p: DenseParams, activation: str, upstream):
    """Chain rule through g(x W + b): returns (dx, dw, db) in fresh buffers."""
    dz = relu_backward(cache.net_input, upstream) if activation == "relu" else upstream
    dw = matmul(cache.input, dz, transpose_a=True)
    db = dz.sum(axis=0, keepdims=True)
    dx = matmul(dz, p.weights, transpose_b=True)
    return dx, dw, db


def batchnorm(x, s: BatchNormState, mode: str, update_running: bool = True):
    """Normalize columns by batch statistics (train) or running statistics
    (infer), then scale by gamma and shift by beta.

    Train mode uses population (1/N) variance and needs a batch of at least
    two rows; running stats move as running <- m*running + (1-m)*batch.
    """
    if x.shape[1] != s.gamma.shape[1]:
        raise ShapeError(
            f"batchnorm: input width {x.shape[1]} != state width {s.gamma.shape[1]}"
        )
    if mode == "train":
        if x.shape[0] < 2:
            raise ShapeError(
                f"batchnorm train mode needs a batch of >= 2 rows, got {x.shape[0]}"
            )
        mean = x.mean(axis=0, keepdims=True)
        var = x.var(axis=0, keepdims=True)
        if update_running:
            s.running_mean *= s.momentum
            s.running_mean += (1.0 - s.momentum) * mean
            s.running_var *= s.momentum
            s.running_var += (1.0 - s.momentum) * var
        inv_std = 1.0 / np.sqrt(var + s.epsilon)
        x_hat = (x - mean) * inv_std
        out = s.gamma * x_hat + s.beta
        return out, ActivationCache(input=x, output=out, x_hat=x_hat, inv_std=inv_std)
    x_hat = (x - s.running_mean) / np.sqrt(s.running_var + s.epsilon)
    return s.gamma * x_hat + s.beta, None


def batchnorm_backward(cache: ActivationCache, s: BatchNormState, upstream):
    """Full batch-norm gradient (mean and variance terms included).

    Returns (dx, dgamma, dbeta).
    """
    n = cache.input.shape[0]
    x_hat = cache.x_hat
    dgamma = (upstream * x_hat).sum(axis=0, keepdims=True)
    dbeta = upstream.sum(axis=0, keepdims=True)
    dx_hat = upstream * s.gamma
    dx = (
        cache.inv_std
        / n
        * (
            n * dx_hat
            - dx_hat.sum(axis=0, keepdims=True)
            - x_hat * (dx_hat * x_hat).sum(axis=0, keepdims=True)
        )
    )
    return dx, dgamma, dbeta


def concat(parts) -> np.ndarray:
    """Column-wise concatenation in list order; parts must share row counts."""
    parts = list(parts)
    if not parts:
        raise ShapeError("concat: empty list of parts")
    rows = parts[0].shape[0]
    for i, part in enumerate(parts):
        if part.shape[0] != rows:
            raise ShapeError(
                f"concat: part 0 has {rows} rows but part {i} has {part.shape[0]}"
            )
    return np.concatenate(parts, axis=1)


def concat_backward(upstream, widths):
    """Slice the upstream gradient back into per-part gradients."""
    if sum(widths) != upstream.shape[1]:
        raise ShapeError(
            f"concat backward: widths {widths} sum to {sum(widths)}, "
            f"upstream has {upstream.shape[1]} columns"
        )
    grads = []
    start = 0
    for w in widths:
        grads.append(upstream[:, start : start + w])
        start += w
    return grads


def mse_loss(pred, target):
    """Mean squared error over N x 1 vectors: returns (loss, dloss/dpred)."""
    if pred.shape != target.shape:
        raise ShapeError(f"mse: shapes {pred.shape} and {target.shape} differ")
    if pred.shape[0] < 1:
        raise ShapeError("mse: empty prediction")
    diff = pred - target
    loss = float(np.mean(diff * diff))
    grad = (2.0 / pred.shape[0]) * diff
    return loss, grad
