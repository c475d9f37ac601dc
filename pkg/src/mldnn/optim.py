"""Adam optimizer with bias-corrected moment estimates.

Update rule per step t:
    m <- b1*m + (1-b1)*g        v <- b2*v + (1-b2)*g^2
    m_hat = m/(1-b1^t)          v_hat = v/(1-b2^t)
    param <- param - lr * m_hat / (sqrt(v_hat) + eps)

Epsilon sits outside the square root; the two placements differ numerically.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class AdamHyper:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-7

    def validate(self):
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")
        if self.epsilon <= 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ConfigError(
                f"betas must lie in [0, 1), got {self.beta1}, {self.beta2}"
            )


class AdamState:
    """First/second moment buffers mirroring a graph's trainable tensors."""

    def __init__(self, m, v, hyper: AdamHyper):
        self.m = m
        self.v = v
        self.t = 0
        self.hyper = hyper


def adam_init(g, hyper: AdamHyper = AdamHyper()) -> AdamState:
    hyper.validate()
    m = {name: np.zeros_like(arr) for name, arr in g.trainable_tensors()}
    v = {name: np.zeros_like(arr) for name, arr in g.trainable_tensors()}
    return AdamState(m, v, hyper)


def adam_step(params: dict, grads: dict, s: AdamState) -> None:
    """Apply one bias-corrected update in place; t advances once per call."""
    h = s.hyper
    s.t += 1
    bc1 = 1.0 - h.beta1**s.t
    bc2 = 1.0 - h.beta2**s.t
    for name, m in s.m.items():
        g = grads[name]
        p = params[name]
        if g.shape != p.shape:
            raise ShapeError(
                f"adam: gradient for {name!r} has shape {g.shape}, "
                f"parameter has {p.shape}"
            )
        v = s.v[name]
        m *= h.beta1
        m += (1.0 - h.beta1) * g
        v *= h.beta2
        v += (1.0 - h.beta2) * (g * g)
        p -= h.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + h.epsilon)
