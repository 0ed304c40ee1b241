"""Inductive GNN layer kernels, two-layer models, training, and k-hop queries.

All four kernels read the neighborhood off the given (sub)graph after a
self-loop has been added to every node, so a 0-hop query (one node plus
its self-loop) flows through the same code path as whole-graph training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import checkpoint
from . import nn
from .graph import Graph, Subgraph
from .nn import Parameter, Tensor
from .rng import stream

ARCHITECTURES = ("gcn", "sage", "gat", "gin")

HIDDEN_UNITS = 128
GAT_HEADS = (2, 1)
LEAKY_SLOPE = 0.2


class MessageStructure:
    """Precomputed aggregation operators for one fixed node set.

    Built from an edge set with a self-loop forced onto every node:
    ``mean_mat`` row-normalizes over the neighborhood, ``sum_mat`` sums it,
    and ``mask`` marks admissible attention cells.
    """

    def __init__(self, num_nodes: int, edges):
        adj = np.zeros((num_nodes, num_nodes), dtype=bool)
        for u, v in edges:
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(f"edge ({u}, {v}) outside node range")
            adj[u, v] = True
            adj[v, u] = True
        np.fill_diagonal(adj, True)
        deg = adj.sum(axis=1, keepdims=True).astype(np.float64)
        if (deg == 0).any():
            raise ValueError("node with empty neighborhood and no self-loop")
        dense = adj.astype(np.float64)
        self.num_nodes = num_nodes
        self.mask = adj
        self.mean_mat = Tensor(dense / deg)
        self.sum_mat = Tensor(dense)

    @classmethod
    def from_graph(cls, g: Graph) -> "MessageStructure":
        return cls(g.num_nodes, g.edges)

    @classmethod
    def from_subgraph(cls, sub: Subgraph) -> "MessageStructure":
        return cls(sub.num_nodes, sub.local_edges())


@dataclass
class GnnLayer:
    """One message-passing layer; ``params`` holds its named weights."""

    kind: str
    in_dim: int
    out_dim: int
    heads: int
    params: dict[str, Parameter]

    def parameters(self) -> list[Parameter]:
        return [self.params[name] for name in sorted(self.params)]


def _make_layer(kind: str, in_dim: int, out_dim: int, heads: int, rng: np.random.Generator) -> GnnLayer:
    if kind not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {kind!r}")
    params: dict[str, Parameter] = {}
    if kind == "gcn":
        params["w"] = Parameter(nn.glorot_uniform(rng, in_dim, out_dim, (in_dim, out_dim)))
    elif kind == "sage":
        params["w"] = Parameter(nn.glorot_uniform(rng, 2 * in_dim, out_dim, (2 * in_dim, out_dim)))
    elif kind == "gat":
        if out_dim % heads != 0:
            raise ValueError(f"out_dim {out_dim} not divisible by {heads} heads")
        head_dim = out_dim // heads
        for h in range(heads):
            params[f"w{h}"] = Parameter(nn.glorot_uniform(rng, in_dim, head_dim, (in_dim, head_dim)))
            params[f"a_dst{h}"] = Parameter(nn.glorot_uniform(rng, head_dim, 1, (head_dim, 1)))
            params[f"a_src{h}"] = Parameter(nn.glorot_uniform(rng, head_dim, 1, (head_dim, 1)))
    elif kind == "gin":
        params["eps"] = Parameter(np.zeros(1))
        params["w1"] = Parameter(nn.glorot_uniform(rng, in_dim, out_dim, (in_dim, out_dim)))
        params["b1"] = Parameter(np.zeros(out_dim))
        params["w2"] = Parameter(nn.glorot_uniform(rng, out_dim, out_dim, (out_dim, out_dim)))
        params["b2"] = Parameter(np.zeros(out_dim))
    return GnnLayer(kind=kind, in_dim=in_dim, out_dim=out_dim, heads=heads, params=params)


def layer_forward(layer: GnnLayer, h: Tensor, structure, training: bool = False,
                  rng: np.random.Generator | None = None, dropout_rate: float = 0.5) -> Tensor:
    """Run one layer over the nodes described by ``structure``.

    ``structure`` may be a Subgraph or a prebuilt MessageStructure. ReLU is
    applied after aggregation; dropout only in training mode.
    """
    if isinstance(structure, Subgraph):
        structure = MessageStructure.from_subgraph(structure)
    if h.data.ndim != 2 or h.data.shape[0] != structure.num_nodes:
        raise ValueError(
            f"feature rows {h.data.shape} do not match {structure.num_nodes} nodes"
        )
    if h.data.shape[1] != layer.in_dim:
        raise ValueError(f"feature dim {h.data.shape[1]} != layer in_dim {layer.in_dim}")

    if layer.kind == "gcn":
        out = nn.matmul(nn.matmul(structure.mean_mat, h), layer.params["w"])
    elif layer.kind == "sage":
        agg = nn.matmul(structure.mean_mat, h)
        out = nn.matmul(nn.concat_cols([h, agg]), layer.params["w"])
    elif layer.kind == "gat":
        head_outs = []
        for i in range(layer.heads):
            z = nn.matmul(h, layer.params[f"w{i}"])
            scores = nn.outer_sum(nn.matmul(z, layer.params[f"a_dst{i}"]),
                                  nn.matmul(z, layer.params[f"a_src{i}"]))
            scores = nn.leaky_relu(scores, LEAKY_SLOPE)
            attn = nn.masked_row_softmax(scores, structure.mask)
            head_outs.append(nn.matmul(attn, z))
        out = head_outs[0] if len(head_outs) == 1 else nn.concat_cols(head_outs)
    elif layer.kind == "gin":
        summed = nn.add(nn.matmul(structure.sum_mat, h), nn.scalar_mul(h, layer.params["eps"]))
        hidden = nn.relu(nn.add(nn.matmul(summed, layer.params["w1"]), layer.params["b1"]))
        out = nn.add(nn.matmul(hidden, layer.params["w2"]), layer.params["b2"])
    else:
        raise ValueError(f"unknown layer kind {layer.kind!r}")

    out = nn.relu(out)
    if training and dropout_rate > 0.0:
        out = nn.dropout(out, dropout_rate, training=True, rng=rng)
    return out


@dataclass
class TrainedGnn:
    """A two-layer node classifier; immutable once training finishes."""

    arch: str
    layer1: GnnLayer
    layer2: GnnLayer
    num_classes: int
    in_dim: int

    def parameters(self) -> list[Parameter]:
        return self.layer1.parameters() + self.layer2.parameters()


def init_gnn(arch: str, in_dim: int, num_classes: int, rng: np.random.Generator,
             hidden: int = HIDDEN_UNITS) -> TrainedGnn:
    if arch not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {arch!r}")
    heads1, heads2 = GAT_HEADS if arch == "gat" else (1, 1)
    layer1 = _make_layer(arch, in_dim, hidden, heads1, rng)
    layer2 = _make_layer(arch, hidden, num_classes, heads2, rng)
    return TrainedGnn(arch=arch, layer1=layer1, layer2=layer2,
                      num_classes=num_classes, in_dim=in_dim)


def gnn_forward(model: TrainedGnn, h0: Tensor, structure, training: bool = False,
                rng: np.random.Generator | None = None, dropout_rate: float = 0.5) -> Tensor:
    """Two-layer pass; dropout regularizes only the hidden layer, the class
    scores themselves are never dropped."""
    h1 = layer_forward(model.layer1, h0, structure, training, rng, dropout_rate)
    return layer_forward(model.layer2, h1, structure, training=False)


def train_gnn(train_graph: Graph, arch: str, seed: int, *, num_classes: int | None = None,
              hidden: int = HIDDEN_UNITS, epochs: int = 200, learning_rate: float = 0.001,
              dropout_rate: float = 0.5) -> TrainedGnn:
    """Full-batch training over the whole training graph.

    Every node is a center simultaneously; the k-hop query path is used
    only at inference time.
    """
    classes = train_graph.num_classes if num_classes is None else int(num_classes)
    if classes < 2:
        raise ValueError(f"need at least 2 classes, got {classes}")
    if train_graph.labels.max() >= classes:
        raise ValueError("label outside declared class range")

    init_rng = stream(seed, "init")
    drop_rng = stream(seed, "dropout")
    model = init_gnn(arch, train_graph.feature_dim, classes, init_rng, hidden=hidden)
    structure = MessageStructure.from_graph(train_graph)
    h0 = Tensor(train_graph.features)
    optimizer = nn.Adam(model.parameters(), learning_rate=learning_rate)
    for _ in range(epochs):
        logits = gnn_forward(model, h0, structure, training=True, rng=drop_rng,
                             dropout_rate=dropout_rate)
        loss, _ = nn.softmax_cross_entropy(logits, train_graph.labels)
        loss.backward()
        optimizer.step()
    return model


def khop_query(model: TrainedGnn, sub: Subgraph, temperature: float = 1.0) -> np.ndarray:
    """Posterior of the subgraph's center node under the trained model."""
    if sub.feature_view.shape[1] != model.in_dim:
        raise ValueError(
            f"subgraph feature dim {sub.feature_view.shape[1]} != model in_dim {model.in_dim}"
        )
    structure = MessageStructure.from_subgraph(sub)
    logits = gnn_forward(model, Tensor(sub.feature_view), structure, training=False)
    post = nn.softmax_with_temperature(logits, temperature).data[sub.center_index]
    if abs(post.sum() - 1.0) > 1e-9 or post.min() < 0.0:
        raise FloatingPointError("posterior failed normalization check")
    return np.array(post)


def predict_label(model: TrainedGnn, sub: Subgraph) -> int:
    """Argmax class of the center posterior; ties go to the lowest class id."""
    return int(np.argmax(khop_query(model, sub)))


def evaluate_accuracy(model: TrainedGnn, g: Graph) -> float:
    """Whole-graph classification accuracy (dropout off, self-loops added)."""
    structure = MessageStructure.from_graph(g)
    logits = gnn_forward(model, Tensor(g.features), structure, training=False)
    predictions = np.argmax(logits.data, axis=1)
    return float(np.mean(predictions == g.labels))


def save_gnn(model: TrainedGnn, path: str) -> None:
    meta = {
        "kind": "gnn",
        "arch": model.arch,
        "in_dim": model.in_dim,
        "hidden": model.layer1.out_dim,
        "num_classes": model.num_classes,
        "heads": [model.layer1.heads, model.layer2.heads],
    }
    arrays = []
    for tag, layer in (("layer1", model.layer1), ("layer2", model.layer2)):
        for name in sorted(layer.params):
            arrays.append((f"{tag}.{name}", layer.params[name].data))
    checkpoint.save_container(path, meta, arrays)


def load_gnn(path: str) -> TrainedGnn:
    meta, arrays = checkpoint.load_container(path)
    if meta.get("kind") != "gnn":
        raise ValueError(f"{path} does not hold a GNN checkpoint")
    rng = np.random.default_rng(0)
    model = init_gnn(meta["arch"], meta["in_dim"], meta["num_classes"], rng, hidden=meta["hidden"])
    for tag, layer in (("layer1", model.layer1), ("layer2", model.layer2)):
        for name in sorted(layer.params):
            key = f"{tag}.{name}"
            if key not in arrays:
                raise ValueError(f"checkpoint missing entry {key}")
            if arrays[key].shape != layer.params[name].data.shape:
                raise ValueError(f"checkpoint entry {key} has wrong shape")
            layer.params[name].data = np.array(arrays[key])
    return model
