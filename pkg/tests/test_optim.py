import numpy as np
import pytest

from mldnn.errors import ConfigError, ShapeError
from mldnn.graph import build_default
from mldnn.optim import AdamHyper, adam_init, adam_step


def test_default_hyperparameters():
    h = AdamHyper()
    assert (h.learning_rate, h.beta1, h.beta2, h.epsilon) == (0.001, 0.9, 0.999, 1e-7)


def test_init_moment_sizes_match_trainable_count():
    state = adam_init(build_default())
    assert sum(a.size for a in state.m.values()) == 158875
    assert sum(a.size for a in state.v.values()) == 158875
    assert state.t == 0
    assert all((a == 0).all() for a in state.m.values())


def test_invalid_hyperparameters_rejected():
    g = build_default()
    with pytest.raises(ConfigError):
        adam_init(g, AdamHyper(learning_rate=0.0))
    with pytest.raises(ConfigError):
        adam_init(g, AdamHyper(learning_rate=-1.0))
    with pytest.raises(ConfigError):
        adam_init(g, AdamHyper(epsilon=0.0))
    with pytest.raises(ConfigError):
        adam_init(g, AdamHyper(beta1=1.0))


class _Scalar:
    """Tiny stand-in exposing one 1x1 trainable tensor."""

    def __init__(self, value=0.0):
        self.w = np.array([[value]])

    def trainable_tensors(self):
        return [("w", self.w)]


def test_scalar_hand_step():
    model = _Scalar(0.0)
    state = adam_init(model)
    params = dict(model.trainable_tensors())
    adam_step(params, {"w": np.array([[1.0]])}, state)
    # m_hat = 1, v_hat = 1 after one unit-gradient step from zero state
    assert state.t == 1
    expected = -0.001 / (1.0 + 1e-7)
    assert model.w[0, 0] == pytest.approx(expected, rel=1e-12)
    assert model.w[0, 0] == pytest.approx(-0.0009999999, abs=1e-9)


def test_zero_gradient_keeps_parameters_but_advances_t():
    model = _Scalar(1.5)
    state = adam_init(model)
    params = dict(model.trainable_tensors())
    adam_step(params, {"w": np.array([[0.0]])}, state)
    assert model.w[0, 0] == 1.5
    assert state.t == 1


@pytest.mark.parametrize("g", [1e-4, 1.0, 37.5, 1e4])
def test_first_step_magnitude_is_learning_rate(g):
    # bias correction makes m_hat=g and v_hat=g^2, so |step| = lr*|g|/(|g|+eps)
    model = _Scalar(0.0)
    state = adam_init(model)
    params = dict(model.trainable_tensors())
    adam_step(params, {"w": np.array([[g]])}, state)
    assert abs(model.w[0, 0]) == pytest.approx(0.001, rel=1e-3)
    assert np.sign(model.w[0, 0]) == -np.sign(g)


def test_update_magnitude_bounded_after_warmup():
    rng = np.random.default_rng(0)
    model = _Scalar(0.0)
    state = adam_init(model)
    params = dict(model.trainable_tensors())
    lr = state.hyper.learning_rate
    for step in range(1, 51):
        before = model.w.copy()
        adam_step(params, {"w": rng.normal(size=(1, 1))}, state)
        if step >= 5:
            assert abs(model.w[0, 0] - before[0, 0]) <= 2 * lr


def test_no_nan_after_steps_with_finite_gradients():
    rng = np.random.default_rng(1)
    g = build_default(seed=0)
    state = adam_init(g)
    params = dict(g.trainable_tensors())
    x = rng.normal(size=(8, 13))
    y = rng.normal(size=(8, 1))
    from mldnn.layers import mse_loss

    for _ in range(3):
        pred = g.forward(x, mode="train")
        _, grad = mse_loss(pred, y)
        g.backward(grad)
        adam_step(params, g.gradient_tensors(), state)
    for name, arr in params.items():
        assert np.isfinite(arr).all(), name
    for name, arr in state.m.items():
        assert np.isfinite(arr).all() and np.isfinite(state.v[name]).all()
        assert (state.v[name] >= 0).all()


def test_identical_inputs_give_bitwise_identical_updates():
    results = []
    for _ in range(2):
        model = _Scalar(0.25)
        state = adam_init(model)
        params = dict(model.trainable_tensors())
        rng = np.random.default_rng(42)
        for _ in range(10):
            adam_step(params, {"w": rng.normal(size=(1, 1))}, state)
        results.append(model.w.copy())
    assert (results[0] == results[1]).all()


def test_shape_mismatch_rejected():
    model = _Scalar(0.0)
    state = adam_init(model)
    params = dict(model.trainable_tensors())
    with pytest.raises(ShapeError):
        adam_step(params, {"w": np.zeros((2, 1))}, state)
