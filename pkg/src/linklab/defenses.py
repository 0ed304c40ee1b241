"""Defense mechanisms: label-only outputs, soft posteriors, EdgeRand, LapGraph.

The two differential-privacy mechanisms perturb the adjacency matrix
before the defended model is trained; the other two only transform what a
query returns. Every defended pipeline plugs into the unmodified attack
stack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import QueryContext
from .gnn import TrainedGnn, khop_query, predict_label
from .graph import Graph, adjacency_matrix, graph_from_adjacency
from .rng import stream

DEFENSE_KINDS = ("none", "label_only", "soft_posterior", "edge_rand", "lap_graph")
DP_KINDS = ("edge_rand", "lap_graph")


@dataclass(frozen=True)
class DefenseConfig:
    kind: str = "none"
    temperature: float = 20.0
    epsilon: float | None = None
    budget_split: float = 0.01

    def __post_init__(self):
        if self.kind not in DEFENSE_KINDS:
            raise ValueError(f"unknown defense kind {self.kind!r}")
        if self.kind == "soft_posterior" and self.temperature <= 0:
            raise ValueError("softmax temperature must be positive")
        if self.kind in DP_KINDS:
            if self.epsilon is None or self.epsilon <= 0:
                raise ValueError("differential-privacy defenses need epsilon > 0")
            if not (0.0 < self.budget_split < 1.0):
                raise ValueError("budget_split must lie in (0, 1)")


def label_only_feature(label_u: int, label_v: int, num_classes: int) -> np.ndarray:
    """Sum of the two one-hot label vectors; entries are 0, 1, or 2."""
    out = np.zeros(num_classes, dtype=np.float64)
    for label in (label_u, label_v):
        if not (0 <= label < num_classes):
            raise ValueError(f"label {label} outside [0, {num_classes})")
        out[label] += 1.0
    return out


def _validate_adjacency(adj: np.ndarray) -> np.ndarray:
    adj = np.asarray(adj, dtype=bool)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValueError("adjacency must be square")
    return adj


def edge_rand(adj: np.ndarray, epsilon: float, seed: int) -> np.ndarray:
    """Randomized response on every upper-triangular cell.

    Each cell flips independently with probability ``2 / (e^eps + 1)``, the
    calibration that makes the per-edge output epsilon-indistinguishable.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    adj = _validate_adjacency(adj)
    n = adj.shape[0]
    flip_prob = 2.0 / (np.exp(epsilon) + 1.0)
    iu, ju = np.triu_indices(n, k=1)
    flips = stream(seed, "edge-rand").random(len(iu)) < flip_prob
    upper = adj[iu, ju] ^ flips
    out = np.zeros((n, n), dtype=bool)
    out[iu, ju] = upper
    return out | out.T


def lap_graph(adj: np.ndarray, epsilon: float, budget_split: float, seed: int) -> np.ndarray:
    """Laplace perturbation keeping a privately estimated edge count.

    A ``budget_split`` share of epsilon estimates how many edges to keep;
    the rest noises every upper-triangular cell, and exactly the estimated
    number of largest cells become edges.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not (0.0 < budget_split < 1.0):
        raise ValueError("budget_split must lie in (0, 1)")
    adj = _validate_adjacency(adj)
    n = adj.shape[0]
    eps_count = budget_split * epsilon
    eps_cells = epsilon - eps_count
    rng = stream(seed, "lap-graph")
    iu, ju = np.triu_indices(n, k=1)
    true_count = int(adj[iu, ju].sum())
    estimate = int(round(true_count + rng.laplace(0.0, 1.0 / eps_count)))
    estimate = max(0, min(estimate, len(iu)))
    noisy = adj[iu, ju].astype(np.float64) + rng.laplace(0.0, 1.0 / eps_cells, size=len(iu))
    keep = np.argsort(-noisy, kind="stable")[:estimate]
    out = np.zeros((n, n), dtype=bool)
    out[iu[keep], ju[keep]] = True
    return out | out.T


def lap_graph_edge_estimate(adj: np.ndarray, epsilon: float, budget_split: float, seed: int) -> int:
    """The private edge-count estimate the mechanism will preserve exactly."""
    adj = _validate_adjacency(adj)
    n = adj.shape[0]
    rng = stream(seed, "lap-graph")
    iu, ju = np.triu_indices(n, k=1)
    true_count = int(adj[iu, ju].sum())
    estimate = int(round(true_count + rng.laplace(0.0, 1.0 / (budget_split * epsilon))))
    return max(0, min(estimate, len(iu)))


def perturb_graph(g: Graph, defense: DefenseConfig, seed: int) -> Graph:
    """Apply a pre-training adjacency perturbation when the defense asks for one."""
    if defense.kind not in DP_KINDS:
        return g
    adj = adjacency_matrix(g)
    np.fill_diagonal(adj, False)
    if defense.kind == "edge_rand":
        perturbed = edge_rand(adj, defense.epsilon, seed)
    else:
        perturbed = lap_graph(adj, defense.epsilon, defense.budget_split, seed)
    return graph_from_adjacency(perturbed, g.features, g.labels)


@dataclass(frozen=True)
class DefendedPairQuery:
    """What the adversary gets back for one pair under a defense."""

    kind: str
    posteriors: tuple[np.ndarray, np.ndarray] | None = None
    label_feature: np.ndarray | None = None


def apply_defended_query(model: TrainedGnn, ctx: QueryContext,
                         defense: DefenseConfig | None) -> DefendedPairQuery:
    """Query both subgraphs of ``ctx`` through the defense's output channel.

    Label-only collapses the pair into a single one-hot-sum vector;
    soft posteriors raise the softmax temperature; the DP mechanisms leave
    query-time behavior untouched.
    """
    kind = defense.kind if defense is not None else "none"
    if ctx.hop is None:
        raise ValueError("defended queries need a query hop")
    if kind == "label_only":
        feature = label_only_feature(
            predict_label(model, ctx.sub_u),
            predict_label(model, ctx.sub_v),
            model.num_classes,
        )
        return DefendedPairQuery(kind=kind, label_feature=feature)
    temperature = defense.temperature if kind == "soft_posterior" else 1.0
    posts = (khop_query(model, ctx.sub_u, temperature),
             khop_query(model, ctx.sub_v, temperature))
    return DefendedPairQuery(kind=kind, posteriors=posts)
