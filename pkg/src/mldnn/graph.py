"""Layer graph: a DAG of nodes evaluated in topological order.

The default graph normalizes the 13 input features, fans them out to six
parallel 128-unit ReLU layers grouped as three pairs, concatenates each pair,
runs three more 128-unit layers whose outputs merge into one 384-wide stream,
feeds a final 128-unit layer, and ends in a single linear output unit:
17 nodes, 4 concatenations, 11 dense layers (10 hidden plus the output).
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from . import layers
from .errors import CheckpointError, GraphStateError, ShapeError
from .layers import BatchNormState, DenseParams
from .modelspec import (
    ArchitectureSpec,
    SpecError,
    default_spec,
    parse_spec,
    render_spec,
    validate_spec,
)

KINDS = ("input", "batchnorm", "dense", "concat")


@dataclass
class LayerNode:
    id: int
    kind: str
    predecessors: list[int]
    params: DenseParams | BatchNormState | None = None
    activation: str | None = None
    grads: dict = field(default_factory=dict)
    cache: object = None

    @property
    def name(self) -> str:
        return f"node{self.id}.{self.kind}"


def glorot_uniform(rng, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class ModelGraph:
    """Executable layer DAG. Nodes are stored in topological order (a node's
    predecessors always precede it), with node 0 the single input node and
    the last node the single output."""

    def __init__(self, nodes, input_width, output_width, architecture):
        self.nodes = nodes
        self.input_width = input_width
        self.output_width = output_width
        self.architecture = architecture
        self._train_ready = False

    # -- execution ---------------------------------------------------------

    def forward(self, x, mode: str = "infer", update_running: bool = True):
        """Evaluate the graph on an N x input_width batch.

        Train mode fills per-node caches and (unless update_running=False,
        used by the gradient checker) advances batch-norm running statistics.
        Infer mode touches no state at all.
        """
        if mode not in ("train", "infer"):
            raise ValueError(f"unknown mode {mode!r}")
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_width:
            raise ShapeError(
                f"graph input must be N x {self.input_width}, got {x.shape}"
            )
        train = mode == "train"
        values = {}
        out = None
        for node in self.nodes:
            if node.kind == "input":
                out = x
            elif node.kind == "dense":
                src = values[node.predecessors[0]]
                out, cache = layers.dense(src, node.params, node.activation, mode)
                if train:
                    node.cache = cache
            elif node.kind == "batchnorm":
                src = values[node.predecessors[0]]
                out, cache = layers.batchnorm(
                    src, node.params, mode, update_running=update_running
                )
                if train:
                    node.cache = cache
            elif node.kind == "concat":
                parts = [values[p] for p in node.predecessors]
                out = layers.concat(parts)
                if train:
                    node.cache = [p.shape[1] for p in parts]
            values[node.id] = out
        if train:
            self._train_ready = True
        return out

    def backward(self, loss_grad):
        """Reverse sweep filling every parameter's gradient buffer.

        Requires a train-mode forward on the same batch immediately before;
        grads land in fresh buffers (no accumulation across calls).
        """
        if not self._train_ready:
            raise GraphStateError(
                "backward requires a train-mode forward immediately before"
            )
        self._train_ready = False
        acc = {self.nodes[-1].id: loss_grad}
        for node in reversed(self.nodes):
            upstream = acc.pop(node.id, None)
            if upstream is None or node.kind == "input":
                continue
            if node.kind == "dense":
                dx, dw, db = layers.dense_backward(
                    node.cache, node.params, node.activation, upstream
                )
                node.grads = {"weights": dw, "bias": db}
                self._send(acc, node.predecessors[0], dx)
            elif node.kind == "batchnorm":
                dx, dgamma, dbeta = layers.batchnorm_backward(
                    node.cache, node.params, upstream
                )
                node.grads = {"gamma": dgamma, "beta": dbeta}
                self._send(acc, node.predecessors[0], dx)
            elif node.kind == "concat":
                parts = layers.concat_backward(upstream, node.cache)
                for pred, part in zip(node.predecessors, parts):
                    self._send(acc, pred, part)

    @staticmethod
    def _send(acc, pred, grad):
        if pred in acc:
            acc[pred] = acc[pred] + grad
        else:
            acc[pred] = grad

    # -- parameter access ----------------------------------------------------

    def trainable_tensors(self):
        """(name, array) pairs for every learnable tensor, in node order."""
        out = []
        for node in self.nodes:
            if node.kind == "dense":
                out.append((f"{node.name}.weights", node.params.weights))
                out.append((f"{node.name}.bias", node.params.bias))
            elif node.kind == "batchnorm":
                out.append((f"{node.name}.gamma", node.params.gamma))
                out.append((f"{node.name}.beta", node.params.beta))
        return out

    def gradient_tensors(self):
        """name -> gradient array, mirroring trainable_tensors()."""
        out = {}
        for node in self.nodes:
            for key, arr in node.grads.items():
                out[f"{node.name}.{key}"] = arr
        return out

    def state_tensors(self):
        """All persistent tensors: trainable plus batch-norm running stats."""
        out = list(self.trainable_tensors())
        for node in self.nodes:
            if node.kind == "batchnorm":
                out.append((f"{node.name}.running_mean", node.params.running_mean))
                out.append((f"{node.name}.running_var", node.params.running_var))
        return out

    def param_count(self):
        """(trainable, non_trainable) scalar counts."""
        trainable = sum(arr.size for _, arr in self.trainable_tensors())
        non_trainable = sum(
            node.params.running_mean.size + node.params.running_var.size
            for node in self.nodes
            if node.kind == "batchnorm"
        )
        return trainable, non_trainable


def param_count(g: ModelGraph):
    return g.param_count()


# -- construction ------------------------------------------------------------


def build_from_spec(spec: ArchitectureSpec, seed: int = 0) -> ModelGraph:
    """Realize an architecture spec; weights are Glorot-uniform from the seed."""
    violations = validate_spec(spec)
    if violations:
        raise SpecError("; ".join(violations))
    rng = np.random.default_rng(seed)
    nodes = []
    width = {}

    def add(kind, predecessors, out_width, params=None, activation=None):
        node = LayerNode(
            id=len(nodes),
            kind=kind,
            predecessors=list(predecessors),
            params=params,
            activation=activation,
        )
        nodes.append(node)
        width[node.id] = out_width
        return node.id

    streams = [add("input", [], spec.input_width)]
    if spec.use_batchnorm:
        streams = [
            add(
                "batchnorm",
                streams,
                spec.input_width,
                params=BatchNormState.create(spec.input_width),
            )
        ]

    for level in spec.levels:
        sources = streams * level.branches if len(streams) == 1 else streams
        branch_ids = []
        for src in sources:
            w = glorot_uniform(rng, width[src], level.units)
            params = DenseParams(weights=w, bias=np.zeros((1, level.units)))
            branch_ids.append(
                add("dense", [src], level.units, params=params, activation=level.activation)
            )
        if level.merge == "pairs":
            merged = []
            for i in range(0, len(branch_ids), 2):
                pair = branch_ids[i : i + 2]
                merged.append(add("concat", pair, sum(width[p] for p in pair)))
            streams = merged
        elif level.merge == "all" and len(branch_ids) > 1:
            streams = [
                add("concat", branch_ids, sum(width[p] for p in branch_ids))
            ]
        else:
            streams = branch_ids

    w = glorot_uniform(rng, width[streams[0]], spec.output_units)
    params = DenseParams(weights=w, bias=np.zeros((1, spec.output_units)))
    add(
        "dense",
        streams,
        spec.output_units,
        params=params,
        activation=spec.output_activation,
    )

    return ModelGraph(
        nodes,
        input_width=spec.input_width,
        output_width=spec.output_units,
        architecture=spec,
    )


def build_default(seed: int = 0) -> ModelGraph:
    return build_from_spec(default_spec(), seed=seed)


# -- checkpoint format ---------------------------------------------------------
#
# magic "MLDNN1" | u32 spec-text length | spec text (utf-8)
# | u32 tensor count | per tensor: u16 name length | name | u32 rows
# | u32 cols | rows*cols little-endian float64
#
# Tensors: every parameter, batch-norm running stat, momentum and epsilon
# (as 1x1), plus any caller extras. Round trips are bit-exact.

MAGIC = b"MLDNN1"


def _graph_tensor_map(g: ModelGraph) -> dict:
    tensors = dict(g.state_tensors())
    for node in g.nodes:
        if node.kind == "batchnorm":
            tensors[f"{node.name}.momentum"] = np.array([[node.params.momentum]])
            tensors[f"{node.name}.epsilon"] = np.array([[node.params.epsilon]])
    return tensors


def checkpoint_save(g: ModelGraph, path, extras: dict | None = None) -> None:
    """Write graph state (and optional named extras) to a checkpoint file."""
    tensors = _graph_tensor_map(g)
    for name in sorted(extras or {}):
        tensors[name] = np.ascontiguousarray(extras[name], dtype=np.float64)
    spec_text = render_spec(g.architecture).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(spec_text)))
        f.write(spec_text)
        f.write(struct.pack("<I", len(tensors)))
        for name, arr in tensors.items():
            if arr.ndim != 2:
                raise CheckpointError(f"tensor {name!r} is not 2-D")
            encoded = name.encode("utf-8")
            f.write(struct.pack("<H", len(encoded)))
            f.write(encoded)
            f.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def _read_exact(f, count, what):
    data = f.read(count)
    if len(data) != count:
        raise CheckpointError(f"truncated checkpoint while reading {what}")
    return data


def checkpoint_load(path):
    """Read a checkpoint back: returns (graph, extras dict)."""
    with open(path, "rb") as f:
        magic = _read_exact(f, len(MAGIC), "magic")
        if magic[:5] != MAGIC[:5]:
            raise CheckpointError(
                f"bad magic {magic!r}: expected {MAGIC!r}"
            )
        if magic != MAGIC:
            raise CheckpointError(
                f"checkpoint version {magic[5:]!r} not supported (expected {MAGIC[5:]!r})"
            )
        (spec_len,) = struct.unpack("<I", _read_exact(f, 4, "spec length"))
        spec_text = _read_exact(f, spec_len, "architecture text").decode("utf-8")
        (count,) = struct.unpack("<I", _read_exact(f, 4, "tensor count"))
        tensors = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", _read_exact(f, 2, "tensor name length"))
            name = _read_exact(f, name_len, "tensor name").decode("utf-8")
            rows, cols = struct.unpack("<II", _read_exact(f, 8, "tensor shape"))
            raw = _read_exact(f, rows * cols * 8, f"tensor {name!r}")
            tensors[name] = np.frombuffer(raw, dtype="<f8").reshape(rows, cols).copy()
        if f.read(1):
            raise CheckpointError("trailing bytes after the declared tensors")

    g = build_from_spec(parse_spec(spec_text), seed=0)
    for node in g.nodes:
        if node.kind == "batchnorm":
            for attr in ("momentum", "epsilon"):
                key = f"{node.name}.{attr}"
                if key not in tensors:
                    raise CheckpointError(f"checkpoint is missing tensor {key!r}")
                setattr(node.params, attr, float(tensors.pop(key)[0, 0]))
    for name, arr in _graph_tensor_map(g).items():
        if name.endswith((".momentum", ".epsilon")):
            continue
        if name not in tensors:
            raise CheckpointError(f"checkpoint is missing tensor {name!r}")
        stored = tensors.pop(name)
        if stored.shape != arr.shape:
            raise CheckpointError(
                f"tensor {name!r} has shape {stored.shape}, expected {arr.shape}"
            )
        arr[...] = stored
    return g, tensors
