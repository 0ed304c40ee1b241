"""Attack input feature builders.

Every builder is order-symmetric: swapping the two nodes of a pair yields
bitwise-identical features, which makes the end-to-end attack score
independent of pair orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gnn import TrainedGnn, khop_query
from .graph import Graph, Subgraph, khop_subgraph, neighbors

PAIRWISE_OP_NAMES = ("hadamard", "average", "weighted_l1", "weighted_l2")
GRAPH_FEATURE_NAMES = ("common_neighbors", "jaccard", "preferential_attachment")
TRANSFER_FEATURE_NAMES = (
    "entropy_hadamard", "entropy_average", "entropy_weighted_l1", "entropy_weighted_l2",
    "cosine_similarity", "js_divergence", "correlation_distance",
)


def pairwise_ops(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Hadamard, average, absolute difference, squared difference."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"pairwise length mismatch: {a.shape} vs {b.shape}")
    return (a * b, (a + b) / 2.0, np.abs(a - b), np.abs(a - b) ** 2)


def pairwise_concat(a: np.ndarray, b: np.ndarray, ops: str = "all") -> np.ndarray:
    """Concatenate the selected pairwise operations in their fixed order."""
    blocks = dict(zip(PAIRWISE_OP_NAMES, pairwise_ops(a, b)))
    if ops == "all":
        selected = PAIRWISE_OP_NAMES
    elif ops in PAIRWISE_OP_NAMES:
        selected = (ops,)
    else:
        raise ValueError(f"unknown pairwise op selection {ops!r}")
    return np.concatenate([blocks[name] for name in selected])


@dataclass(frozen=True)
class QueryContext:
    """The adversary's view of one node pair: the hop level and the two
    query subgraphs with the attacked edge removed. Baselines carry
    ``hop=None`` and no subgraphs."""

    graph: Graph
    u: int
    v: int
    hop: int | None
    sub_u: Subgraph | None
    sub_v: Subgraph | None

    @classmethod
    def build(cls, graph: Graph, u: int, v: int, hop: int | None) -> "QueryContext":
        if u == v:
            raise ValueError("a pair needs two distinct nodes")
        if hop is None:
            return cls(graph=graph, u=u, v=v, hop=None, sub_u=None, sub_v=None)
        exclude = (u, v)
        return cls(
            graph=graph, u=u, v=v, hop=hop,
            sub_u=khop_subgraph(graph, u, hop, exclude=exclude),
            sub_v=khop_subgraph(graph, v, hop, exclude=exclude),
        )


def require_distribution(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("posterior must be a non-empty vector")
    if p.min() < -1e-9 or abs(p.sum() - 1.0) > 1e-6:
        raise ValueError("posterior is not a probability distribution")
    return p


def posterior_block(model: TrainedGnn, ctx: QueryContext, temperature: float = 1.0,
                    ops: str = "all") -> np.ndarray:
    """Pairwise-combined posteriors of the two query subgraphs."""
    if ctx.hop is None:
        raise ValueError("posterior features need a query hop")
    post_u = khop_query(model, ctx.sub_u, temperature)
    post_v = khop_query(model, ctx.sub_v, temperature)
    return pairwise_concat(post_u, post_v, ops)


def node_attr_block(features_u: np.ndarray, features_v: np.ndarray) -> np.ndarray:
    """Hadamard product of the two attribute rows."""
    a = np.asarray(features_u, dtype=np.float64)
    b = np.asarray(features_v, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"attribute dim mismatch: {a.shape} vs {b.shape}")
    return a * b


def proximity_counts(graph: Graph, u: int, v: int) -> tuple[int, float, int]:
    """Common neighbors, Jaccard, preferential attachment with the pair's
    own edge excluded from both neighborhoods."""
    nu = set(neighbors(graph, u)) - {u, v}
    nv = set(neighbors(graph, v)) - {u, v}
    inter = len(nu & nv)
    union = len(nu | nv)
    jaccard = inter / union if union else 0.0
    return inter, jaccard, len(nu) * len(nv)


def graph_block(ctx: QueryContext) -> np.ndarray:
    """[common neighbors, Jaccard, preferential attachment] for the pair."""
    if ctx.hop == 0:
        raise ValueError("graph features are undefined for 0-hop queries")
    cn, jac, pa = proximity_counts(ctx.graph, ctx.u, ctx.v)
    return np.array([float(cn), jac, float(pa)], dtype=np.float64)


def entropy(p: np.ndarray) -> float:
    """Shannon entropy in nats."""
    p = require_distribution(p)
    nz = p[p > 0.0]
    return float(-(nz * np.log(nz)).sum())


def _pad_common(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    width = max(a.size, b.size)
    pa = np.zeros(width)
    pb = np.zeros(width)
    pa[: a.size] = a
    pb[: b.size] = b
    return pa, pb


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a, b = _pad_common(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def js_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """Jensen-Shannon divergence in nats, zero-padding shorter inputs."""
    p, q = _pad_common(require_distribution(p), require_distribution(q))
    m = (p + q) / 2.0

    def kl(x, y):
        mask = x > 0.0
        return float((x[mask] * np.log(x[mask] / y[mask])).sum())

    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def correlation_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``1 - Pearson r``; zero when either vector is constant."""
    a, b = _pad_common(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    da = a - a.mean()
    db = b - b.mean()
    va = np.dot(da, da)
    vb = np.dot(db, db)
    if va == 0.0 or vb == 0.0:
        return 0.0
    return float(1.0 - np.dot(da, db) / np.sqrt(va * vb))


def transfer_block(post_u: np.ndarray, post_v: np.ndarray) -> np.ndarray:
    """Class-count-independent posterior features for cross-dataset shadows.

    Four pairwise combinations of the two posterior entropies, then cosine
    similarity, JS divergence, and correlation distance of the posterior
    vectors (zero-padded when class counts differ).
    """
    pu = require_distribution(post_u)
    pv = require_distribution(post_v)
    eu = np.array([entropy(pu)])
    ev = np.array([entropy(pv)])
    ent_parts = pairwise_concat(eu, ev, "all")
    similarity = np.array([
        cosine_similarity(pu, pv),
        js_divergence(pu, pv),
        correlation_distance(pu, pv),
    ])
    return np.concatenate([ent_parts, similarity])


def transfer_posterior_block(model: TrainedGnn, ctx: QueryContext,
                             temperature: float = 1.0) -> np.ndarray:
    if ctx.hop is None:
        raise ValueError("posterior features need a query hop")
    post_u = khop_query(model, ctx.sub_u, temperature)
    post_v = khop_query(model, ctx.sub_v, temperature)
    return transfer_block(post_u, post_v)


def posterior_block_names(num_classes: int, ops: str = "all") -> list[str]:
    selected = PAIRWISE_OP_NAMES if ops == "all" else (ops,)
    return [f"posterior_{op}_{c}" for op in selected for c in range(num_classes)]


def node_attr_block_names(feature_dim: int) -> list[str]:
    return [f"attr_hadamard_{i}" for i in range(feature_dim)]


def graph_block_names() -> list[str]:
    return [f"graph_{name}" for name in GRAPH_FEATURE_NAMES]


def transfer_block_names() -> list[str]:
    return [f"transfer_{name}" for name in TRANSFER_FEATURE_NAMES]


def label_block_names(num_classes: int) -> list[str]:
    return [f"label_count_{c}" for c in range(num_classes)]


def export_features_csv(path: str, columns: list[str], matrix: np.ndarray) -> None:
    """Write a feature matrix with one named column per feature."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != len(columns):
        raise ValueError("column names must match matrix width")
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
