"""The thirteen link-inference classifiers: Baselines 0-2 and Attacks 0-9.

Each classifier is a (possibly multi-input) MLP over the feature blocks
its threat model grants the adversary. Branch widths follow the published
architectures; the final head is always a two-unit linear layer read
through a softmax.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .data import PairDataset
from .defenses import DefenseConfig, apply_defended_query
from .features import (
    QueryContext,
    graph_block,
    node_attr_block,
    pairwise_concat,
    transfer_block,
)
from .gnn import TrainedGnn
from .graph import Graph
from .nn import Parameter, Tensor
from .rng import stream


@dataclass(frozen=True)
class AttackSpec:
    """One row of the attack taxonomy: query hop plus active feature kinds."""

    attack_id: str
    hop: int | None
    uses_posteriors: bool
    uses_node_attrs: bool
    uses_graph_feats: bool


def _spec(attack_id, hop, p, n, g):
    return AttackSpec(attack_id, hop, p, n, g)


ATTACK_SPECS: dict[str, AttackSpec] = {
    "a0": _spec("a0", 0, True, False, False),
    "a1": _spec("a1", 1, True, False, False),
    "a2": _spec("a2", 2, True, False, False),
    "a3": _spec("a3", 0, True, True, False),
    "a4": _spec("a4", 1, True, True, False),
    "a5": _spec("a5", 2, True, True, False),
    "a6": _spec("a6", 1, True, False, True),
    "a7": _spec("a7", 2, True, False, True),
    "a8": _spec("a8", 1, True, True, True),
    "a9": _spec("a9", 2, True, True, True),
    "b0": _spec("b0", None, False, True, False),
    "b1": _spec("b1", None, False, False, True),
    "b2": _spec("b2", None, False, True, True),
}

ALL_ATTACK_IDS = tuple(ATTACK_SPECS)

# Ordered (input kind, hidden widths) per classifier. The head takes the
# concatenated final widths down to two logits.
_BRANCH_PLANS: dict[str, tuple[tuple[str, tuple[int, ...]], ...]] = {
    "a0": (("posterior", (128, 32)),),
    "a1": (("posterior", (128, 32)),),
    "a2": (("posterior", (128, 32)),),
    "a3": (("node_attr", (128, 64, 16)), ("posterior", (64, 16))),
    "a4": (("node_attr", (128, 64, 16)), ("posterior", (64, 16))),
    "a5": (("node_attr", (128, 64, 16)), ("posterior", (64, 16))),
    "a6": (("graph", (16, 4)), ("posterior", (128, 64, 16))),
    "a7": (("graph", (16, 4)), ("posterior", (128, 64, 16))),
    "a8": (("node_attr", (128, 64, 16)), ("posterior", (128, 64, 16)), ("graph", (4,))),
    "a9": (("node_attr", (128, 64, 16)), ("posterior", (128, 64, 16)), ("graph", (4,))),
    "b0": (("node_attr", (128, 32)),),
    "b1": (("graph", (16,)),),
    "b2": (("node_attr", (256, 64, 8)), ("graph", (1,))),
}

# Width chains for the depth ablation of single-branch classifiers;
# depth counts linear layers including the head.
_DEPTH_CHAIN = (128, 32, 16, 8)


def spec_for(attack_id: str) -> AttackSpec:
    if attack_id not in ATTACK_SPECS:
        raise ValueError(f"unknown attack id {attack_id!r}")
    return ATTACK_SPECS[attack_id]


@dataclass
class MlpBranch:
    kind: str
    widths: tuple[int, ...]
    weights: list[Parameter]
    biases: list[Parameter]


@dataclass
class MultiInputMlp:
    """Per-kind sub-networks whose embeddings feed one linear head."""

    attack_id: str
    branches: list[MlpBranch]
    head_w: Parameter
    head_b: Parameter
    input_dims: dict[str, int]

    def parameters(self) -> list[Parameter]:
        out: list[Parameter] = []
        for br in self.branches:
            out.extend(br.weights)
            out.extend(br.biases)
        out.extend([self.head_w, self.head_b])
        return out


@dataclass(frozen=True)
class LinkVerdict:
    """Probability of a link plus the 0.5-threshold decision."""

    score: float
    decision: int


def build_attack_model(attack_id: str, input_dims: dict[str, int],
                       rng: np.random.Generator, depth: int | None = None) -> MultiInputMlp:
    """Instantiate the classifier for ``attack_id`` given its input widths.

    ``depth`` overrides the layer count of single-branch classifiers for
    the depth ablation; multi-branch classifiers reject it.
    """
    spec = spec_for(attack_id)
    plan = _BRANCH_PLANS[attack_id]
    if depth is not None:
        if len(plan) != 1:
            raise ValueError("depth override only applies to single-branch classifiers")
        if not (2 <= depth <= 1 + len(_DEPTH_CHAIN)):
            raise ValueError(f"depth must be in [2, {1 + len(_DEPTH_CHAIN)}]")
        plan = ((plan[0][0], _DEPTH_CHAIN[: depth - 1]),)

    expected_kinds = {kind for kind, _ in plan}
    if set(input_dims) != expected_kinds:
        raise ValueError(
            f"{attack_id} expects inputs {sorted(expected_kinds)}, got {sorted(input_dims)}"
        )

    branches = []
    for kind, widths in plan:
        dims = (input_dims[kind],) + tuple(widths)
        weights = []
        biases = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            weights.append(Parameter(nn.glorot_uniform(rng, fan_in, fan_out, (fan_in, fan_out))))
            biases.append(Parameter(np.zeros(fan_out)))
        branches.append(MlpBranch(kind=kind, widths=tuple(widths), weights=weights, biases=biases))

    concat_dim = sum(br.widths[-1] for br in branches)
    head_w = Parameter(nn.glorot_uniform(rng, concat_dim, 2, (concat_dim, 2)))
    head_b = Parameter(np.zeros(2))
    return MultiInputMlp(attack_id=spec.attack_id, branches=branches,
                         head_w=head_w, head_b=head_b, input_dims=dict(input_dims))


def mlp_forward(model: MultiInputMlp, inputs: dict[str, np.ndarray], training: bool = False,
                rng: np.random.Generator | None = None, dropout_rate: float = 0.5) -> Tensor:
    """Logits for a batch of feature rows keyed by input kind."""
    if set(inputs) != {br.kind for br in model.branches}:
        raise ValueError(
            f"model expects inputs {sorted(br.kind for br in model.branches)}, "
            f"got {sorted(inputs)}"
        )
    embeddings = []
    for br in model.branches:
        x = np.asarray(inputs[br.kind], dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != model.input_dims[br.kind]:
            raise ValueError(
                f"input {br.kind} has shape {x.shape}, expected width {model.input_dims[br.kind]}"
            )
        h = Tensor(x)
        for w, b in zip(br.weights, br.biases):
            h = nn.relu(nn.add(nn.matmul(h, w), b))
            if training and dropout_rate > 0.0:
                h = nn.dropout(h, dropout_rate, training=True, rng=rng)
        embeddings.append(h)
    joined = embeddings[0] if len(embeddings) == 1 else nn.concat_cols(embeddings)
    return nn.add(nn.matmul(joined, model.head_w), model.head_b)


def assemble_features(spec: AttackSpec, model: TrainedGnn | None, graph: Graph,
                      pair: tuple[int, int], defense: DefenseConfig | None = None,
                      transfer: bool = False, pairwise: str = "all",
                      collect_posteriors: list | None = None) -> dict[str, np.ndarray]:
    """One feature vector per active input kind for a single node pair."""
    u, v = pair
    if spec.uses_graph_feats and spec.hop == 0:
        raise ValueError(f"{spec.attack_id}: graph features unavailable at hop 0")
    ctx = QueryContext.build(graph, u, v, spec.hop)
    out: dict[str, np.ndarray] = {}
    if spec.uses_posteriors:
        if model is None:
            raise ValueError("posterior features need a trained model")
        reply = apply_defended_query(model, ctx, defense)
        if reply.kind == "label_only":
            out["posterior"] = reply.label_feature
        else:
            post_u, post_v = reply.posteriors
            if collect_posteriors is not None:
                collect_posteriors.append(post_u)
                collect_posteriors.append(post_v)
            if transfer:
                out["posterior"] = transfer_block(post_u, post_v)
            else:
                out["posterior"] = pairwise_concat(post_u, post_v, pairwise)
    if spec.uses_node_attrs:
        out["node_attr"] = node_attr_block(graph.features[u], graph.features[v])
    if spec.uses_graph_feats:
        out["graph"] = graph_block(ctx)
    return out


def build_attack_matrix(spec: AttackSpec, model: TrainedGnn | None, graph: Graph,
                        pairs, defense: DefenseConfig | None = None, transfer: bool = False,
                        pairwise: str = "all",
                        collect_posteriors: list | None = None) -> dict[str, np.ndarray]:
    """Stack per-pair feature vectors into one matrix per input kind."""
    rows: dict[str, list[np.ndarray]] = {}
    for pair in pairs:
        vecs = assemble_features(spec, model, graph, (pair[0], pair[1]), defense=defense,
                                 transfer=transfer, pairwise=pairwise,
                                 collect_posteriors=collect_posteriors)
        for kind, vec in vecs.items():
            rows.setdefault(kind, []).append(vec)
    return {kind: np.vstack(vs) for kind, vs in rows.items()}


def train_attack(attack_id: str, inputs: dict[str, np.ndarray], labels: np.ndarray,
                 seed: int, *, epochs: int = 200, learning_rate: float = 0.001,
                 dropout_rate: float = 0.5, depth: int | None = None) -> MultiInputMlp:
    """Full-batch training with cosine-annealed Adam."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        raise ValueError("empty attack dataset")
    pos = int((labels == 1).sum())
    neg = int((labels == 0).sum())
    if pos != neg:
        raise ValueError(f"attack training set must be balanced, got {pos} pos / {neg} neg")

    input_dims = {kind: mat.shape[1] for kind, mat in inputs.items()}
    model = build_attack_model(attack_id, input_dims, stream(seed, "init"), depth=depth)
    drop_rng = stream(seed, "dropout")
    optimizer = nn.Adam(model.parameters(), learning_rate=learning_rate)
    for epoch in range(epochs):
        optimizer.learning_rate = nn.cosine_anneal(learning_rate, epoch, epochs)
        logits = mlp_forward(model, inputs, training=True, rng=drop_rng,
                             dropout_rate=dropout_rate)
        loss, _ = nn.softmax_cross_entropy(logits, labels)
        loss.backward()
        optimizer.step()
    return model


def link_scores(model: MultiInputMlp, inputs: dict[str, np.ndarray]) -> np.ndarray:
    """Per-pair link probability (softmax weight of the link class)."""
    logits = mlp_forward(model, inputs, training=False)
    probs = nn.softmax_with_temperature(logits, 1.0).data
    return np.array(probs[:, 1])


def infer_link(model: MultiInputMlp, features: dict[str, np.ndarray]) -> LinkVerdict:
    """Score a single pair; the decision thresholds the score at one half."""
    batched = {kind: np.atleast_2d(np.asarray(vec, dtype=np.float64))
               for kind, vec in features.items()}
    score = float(link_scores(model, batched)[0])
    return LinkVerdict(score=score, decision=int(score >= 0.5))


def attack_dataset_inputs(spec: AttackSpec, model: TrainedGnn | None, dataset: PairDataset,
                          defense: DefenseConfig | None = None, transfer: bool = False,
                          pairwise: str = "all",
                          collect_posteriors: list | None = None) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Feature matrices plus labels for every pair in a PairDataset."""
    mats = build_attack_matrix(spec, model, dataset.graph, dataset.node_pairs,
                               defense=defense, transfer=transfer, pairwise=pairwise,
                               collect_posteriors=collect_posteriors)
    return mats, dataset.labels
