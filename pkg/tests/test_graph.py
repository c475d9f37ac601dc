import hashlib

import numpy as np
import pytest

from mldnn.errors import CheckpointError, GraphStateError, ShapeError
from mldnn.graph import (
    LayerNode,
    ModelGraph,
    build_default,
    build_from_spec,
    checkpoint_load,
    checkpoint_save,
    param_count,
)
from mldnn.layers import BatchNormState
from mldnn.modelspec import (
    DEFAULT_ARCHITECTURE,
    ArchitectureSpec,
    LevelSpec,
    SpecError,
    parse_spec,
)


def state_digest(g: ModelGraph) -> str:
    h = hashlib.sha256()
    for name, arr in g.state_tensors():
        h.update(name.encode())
        h.update(arr.tobytes())
    return h.hexdigest()


def test_default_census_17_nodes_4_concats():
    g = build_default()
    kinds = [n.kind for n in g.nodes]
    assert len(kinds) == 17
    assert kinds.count("concat") == 4
    assert kinds.count("dense") == 11
    assert kinds.count("batchnorm") == 1
    assert kinds.count("input") == 1


def test_default_concat_widths():
    g = build_default()
    g.forward(np.random.default_rng(0).normal(size=(3, 13)), mode="train")
    widths = [sum(n.cache) for n in g.nodes if n.kind == "concat"]
    assert widths == [256, 256, 256, 384]


def test_topological_order_is_valid():
    g = build_default()
    for node in g.nodes:
        for pred in node.predecessors:
            assert pred < node.id


def test_forward_shape_contract():
    g = build_default()
    out = g.forward(np.zeros((5, 13)), mode="infer")
    assert out.shape == (5, 1)
    assert np.isfinite(out).all()


def test_forward_rejects_wrong_width():
    g = build_default()
    with pytest.raises(ShapeError):
        g.forward(np.zeros((5, 12)))


def test_forward_finite_on_random_input(rng):
    g = build_default(seed=3)
    out = g.forward(rng.normal(size=(5, 13)), mode="infer")
    assert out.shape == (5, 1) and np.isfinite(out).all()


def test_infer_mode_is_pure():
    g = build_default(seed=1)
    x = np.random.default_rng(2).normal(size=(6, 13))
    before = state_digest(g)
    out1 = g.forward(x, mode="infer")
    out2 = g.forward(x, mode="infer")
    assert state_digest(g) == before
    assert (out1 == out2).all()


def test_zero_weights_give_bias_output():
    g = build_default()
    for node in g.nodes:
        if node.kind == "dense":
            node.params.weights[:] = 0.0
    g.nodes[-1].params.bias[:] = 7.5
    out = g.forward(np.random.default_rng(0).normal(size=(4, 13)), mode="infer")
    assert (out == 7.5).all()


def test_param_count_default():
    assert param_count(build_default()) == (158875, 26)


def test_param_count_single_dense():
    lone = ArchitectureSpec(13, False, [], 1, "linear")
    assert param_count(build_from_spec(lone)) == (14, 0)


def test_param_count_batchnorm_alone():
    nodes = [
        LayerNode(id=0, kind="input", predecessors=[]),
        LayerNode(id=1, kind="batchnorm", predecessors=[0], params=BatchNormState.create(13)),
    ]
    g = ModelGraph(nodes, input_width=13, output_width=13, architecture=None)
    assert g.param_count() == (26, 26)


def test_small_spec_param_count():
    spec = ArchitectureSpec(13, False, [LevelSpec(1, 4, "relu")], 1, "linear")
    g = build_from_spec(spec)
    assert param_count(g) == (4 * 13 + 4 + 4 + 1, 0)


def test_build_from_spec_matches_build_default_bitwise():
    g1 = build_default(seed=5)
    g2 = build_from_spec(parse_spec(DEFAULT_ARCHITECTURE), seed=5)
    t1, t2 = dict(g1.state_tensors()), dict(g2.state_tensors())
    assert t1.keys() == t2.keys()
    for name in t1:
        assert (t1[name] == t2[name]).all()


def test_build_rejects_invalid_spec():
    spec = ArchitectureSpec(13, False, [LevelSpec(3, 8, "relu", "pairs")], 1, "linear")
    with pytest.raises(SpecError):
        build_from_spec(spec)


def test_backward_requires_train_forward():
    g = build_default()
    g.forward(np.zeros((4, 13)), mode="infer")
    with pytest.raises(GraphStateError):
        g.backward(np.ones((4, 1)))


def test_backward_twice_requires_fresh_forward():
    g = build_default()
    x = np.random.default_rng(0).normal(size=(4, 13))
    g.forward(x, mode="train")
    g.backward(np.ones((4, 1)))
    with pytest.raises(GraphStateError):
        g.backward(np.ones((4, 1)))


def test_zero_loss_grad_zeroes_all_gradients():
    g = build_default(seed=2)
    x = np.random.default_rng(1).normal(size=(4, 13))
    g.forward(x, mode="train")
    g.backward(np.zeros((4, 1)))
    for name, arr in g.gradient_tensors().items():
        assert (arr == 0.0).all(), name


def test_loss_grad_scaling_is_exactly_linear():
    # chain rule is linear in the upstream gradient; scaling by a power of
    # two is exact in floating point
    g1 = build_default(seed=4)
    g2 = build_default(seed=4)
    x = np.random.default_rng(3).normal(size=(4, 13))
    up = np.random.default_rng(4).normal(size=(4, 1))
    g1.forward(x, mode="train")
    g1.backward(up)
    g2.forward(x, mode="train")
    g2.backward(2.0 * up)
    grads1, grads2 = g1.gradient_tensors(), g2.gradient_tensors()
    for name in grads1:
        assert (2.0 * grads1[name] == grads2[name]).all(), name


def test_whole_graph_gradient_check():
    from mldnn.train import grad_check

    rng = np.random.default_rng(0)
    g = build_default(seed=0)
    x = rng.normal(size=(4, 13))
    y = rng.normal(size=(4, 1))
    result = grad_check(g, x, y)
    assert result.passed, result


# -- checkpoints -----------------------------------------------------------------


def test_checkpoint_round_trip_bitwise(tmp_path):
    g = build_default(seed=9)
    # give the state a history so running stats are nontrivial
    g.forward(np.random.default_rng(5).normal(size=(8, 13)), mode="train")
    path1 = tmp_path / "model.mldnn"
    path2 = tmp_path / "model2.mldnn"
    checkpoint_save(g, path1)
    loaded, extras = checkpoint_load(path1)
    assert extras == {}
    checkpoint_save(loaded, path2)
    assert path1.read_bytes() == path2.read_bytes()


def test_checkpoint_predictions_bitwise_equal(tmp_path):
    g = build_default(seed=10)
    x = np.random.default_rng(6).normal(size=(7, 13))
    g.forward(np.random.default_rng(7).normal(size=(16, 13)), mode="train")
    before = g.forward(x, mode="infer")
    path = tmp_path / "model.mldnn"
    checkpoint_save(g, path)
    loaded, _ = checkpoint_load(path)
    after = loaded.forward(x, mode="infer")
    assert (before == after).all()


def test_checkpoint_extras_round_trip(tmp_path):
    g = build_default(seed=0)
    extras = {"normalizer.mu": np.arange(13.0).reshape(1, 13)}
    path = tmp_path / "model.mldnn"
    checkpoint_save(g, path, extras=extras)
    _, loaded_extras = checkpoint_load(path)
    assert set(loaded_extras) == {"normalizer.mu"}
    assert (loaded_extras["normalizer.mu"] == extras["normalizer.mu"]).all()


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "bad.mldnn"
    path.write_bytes(b"NOTMLD" + b"\x00" * 32)
    with pytest.raises(CheckpointError, match="MLDNN1"):
        checkpoint_load(path)


def test_checkpoint_version_mismatch(tmp_path):
    g = build_default(seed=0)
    path = tmp_path / "model.mldnn"
    checkpoint_save(g, path)
    data = bytearray(path.read_bytes())
    data[5] = ord("2")
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointError, match="version"):
        checkpoint_load(path)


def test_checkpoint_truncation(tmp_path):
    g = build_default(seed=0)
    path = tmp_path / "model.mldnn"
    checkpoint_save(g, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(CheckpointError, match="truncated"):
        checkpoint_load(path)
