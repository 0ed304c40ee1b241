"""Evaluation: AUC, accuracy, robustness groups, correlation, link analyses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScoredPairs:
    """Attack scores with ground-truth link labels for a set of pairs."""

    pairs: tuple[tuple[int, int], ...]
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if scores.shape != labels.shape or scores.ndim != 1:
            raise ValueError("scores and labels must be matching vectors")
        if len(self.pairs) != scores.shape[0]:
            raise ValueError("pairs and scores lengths differ")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)


def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned their average rank."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Rank-based (Mann-Whitney) area under the ROC curve; ties count half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be matching vectors")
    num_pos = int((labels == 1).sum())
    num_neg = int((labels == 0).sum())
    if num_pos == 0 or num_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    ranks = average_ranks(scores)
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - num_pos * (num_pos + 1) / 2.0) / (num_pos * num_neg))


def accuracy(predictions, labels) -> float:
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise ValueError("predictions and labels must have equal length")
    return float(np.mean(predictions == labels))


@dataclass(frozen=True)
class GroupReport:
    """Per-group AUC over positives binned by one pair metric.

    Groups are listed in descending metric order; ``boundaries`` holds the
    (max, min) metric values inside each group.
    """

    metric_name: str
    group_aucs: tuple[float, ...]
    boundaries: tuple[tuple[float, float], ...]
    group_sizes: tuple[int, ...]


def robustness_groups(positive_scores: np.ndarray, positive_metric: np.ndarray,
                      negative_scores: np.ndarray, metric_name: str,
                      pair_ids=None, groups: int = 10) -> GroupReport:
    """Bin positives into near-equal groups by descending metric value and
    score each group against all negatives."""
    positive_scores = np.asarray(positive_scores, dtype=np.float64)
    positive_metric = np.asarray(positive_metric, dtype=np.float64)
    negative_scores = np.asarray(negative_scores, dtype=np.float64)
    num_pos = len(positive_scores)
    if positive_metric.shape != positive_scores.shape:
        raise ValueError("every positive pair needs a metric value")
    if num_pos < groups:
        raise ValueError(f"need at least {groups} positives, got {num_pos}")
    if pair_ids is None:
        pair_ids = np.arange(num_pos)
    pair_ids = np.asarray(pair_ids)

    # Descending metric, ties broken by ascending pair id for reproducibility.
    order = np.lexsort((pair_ids, -positive_metric))
    base = num_pos // groups
    extra = num_pos % groups
    sizes = [base + (1 if i < extra else 0) for i in range(groups)]

    aucs = []
    bounds = []
    start = 0
    neg_labels = np.zeros(len(negative_scores), dtype=np.int64)
    for size in sizes:
        chunk = order[start:start + size]
        start += size
        chunk_scores = positive_scores[chunk]
        chunk_metric = positive_metric[chunk]
        combined = np.concatenate([chunk_scores, negative_scores])
        labels = np.concatenate([np.ones(size, dtype=np.int64), neg_labels])
        aucs.append(auc(combined, labels))
        bounds.append((float(chunk_metric.max()), float(chunk_metric.min())))
    return GroupReport(metric_name=metric_name, group_aucs=tuple(aucs),
                       boundaries=tuple(bounds), group_sizes=tuple(sizes))


def pearson_correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Sample Pearson correlation; 0 when either side is degenerate."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be matching vectors")
    if len(x) < 2:
        return 0.0
    dx = x - x.mean()
    dy = y - y.mean()
    vx = np.dot(dx, dx)
    vy = np.dot(dy, dy)
    if vx == 0.0 or vy == 0.0:
        return 0.0
    return float(np.dot(dx, dy) / np.sqrt(vx * vy))


@dataclass(frozen=True)
class SurprisingLinks:
    """Share of positives caught by the attack but missed by the baseline."""

    last_group_rate: float
    overall_rate: float


def surprising_links(attack_decisions: np.ndarray, baseline_decisions: np.ndarray,
                     last_group_indices) -> SurprisingLinks:
    """Rate of attack-hit / baseline-miss positives in the lowest-metric
    group, with the same rate over all positives as reference."""
    attack_decisions = np.asarray(attack_decisions, dtype=np.int64)
    baseline_decisions = np.asarray(baseline_decisions, dtype=np.int64)
    if attack_decisions.shape != baseline_decisions.shape:
        raise ValueError("verdicts must align over the same positive pairs")
    idx = np.asarray(list(last_group_indices), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("last group is empty")
    surprising = (attack_decisions == 1) & (baseline_decisions == 0)
    return SurprisingLinks(
        last_group_rate=float(surprising[idx].mean()),
        overall_rate=float(surprising.mean()),
    )


def leading_probability_cdf(posteriors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF of each posterior's largest entry.

    Returns the sorted leading probabilities and their cumulative fractions.
    """
    posteriors = np.asarray(posteriors, dtype=np.float64)
    if posteriors.ndim != 2 or posteriors.shape[0] == 0:
        raise ValueError("need a non-empty [rows x classes] posterior matrix")
    leading = np.sort(posteriors.max(axis=1))
    fractions = np.arange(1, len(leading) + 1, dtype=np.float64) / len(leading)
    return leading, fractions


def last_group_indices(positive_metric: np.ndarray, pair_ids=None, groups: int = 10) -> np.ndarray:
    """Indices of the positives that fall in the lowest-metric group."""
    positive_metric = np.asarray(positive_metric, dtype=np.float64)
    num_pos = len(positive_metric)
    if num_pos < groups:
        raise ValueError(f"need at least {groups} positives, got {num_pos}")
    if pair_ids is None:
        pair_ids = np.arange(num_pos)
    order = np.lexsort((np.asarray(pair_ids), -positive_metric))
    base = num_pos // groups
    extra = num_pos % groups
    last_size = base + (1 if groups - 1 < extra else 0)
    return np.sort(order[num_pos - last_size:])
