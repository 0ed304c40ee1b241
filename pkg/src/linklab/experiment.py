"""End-to-end experiment orchestration: seeded runs, ablations, reports.

A whole experiment is a pure function of (config, base seed). Each run
derives independent named streams for splitting, training, sampling, and
perturbation, so no stage's randomness can bleed into another. Wall-clock
timings are written to their own file so the report CSVs stay byte-identical
across repeated invocations.
"""

from __future__ import annotations

import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import numpy as np

from . import features as feat
from .attacks import (
    ATTACK_SPECS,
    MultiInputMlp,
    attack_dataset_inputs,
    link_scores,
    spec_for,
    train_attack,
)
from .data import (
    PairDataset,
    SplitBundle,
    build_pair_dataset,
    enforce_attack_provenance,
    generate_planted_partition,
    make_splits,
    write_split_manifest,
)
from .defenses import DP_KINDS, DefenseConfig, perturb_graph
from .features import cosine_similarity, proximity_counts
from .gnn import ARCHITECTURES, TrainedGnn, evaluate_accuracy, save_gnn, train_gnn
from .graph import Graph, load_dataset
from .metrics import (
    auc,
    last_group_indices,
    leading_probability_cdf,
    pearson_correlation,
    robustness_groups,
    surprising_links,
)
from .rng import derive_seed

PAIR_METRIC_NAMES = ("node_similarity", "common_neighbors", "preferential_attachment", "jaccard")

DEFENSE_ALIASES = {
    "none": "none",
    "label": "label_only",
    "label_only": "label_only",
    "soft": "soft_posterior",
    "soft_posterior": "soft_posterior",
    "edgerand": "edge_rand",
    "edge_rand": "edge_rand",
    "lapgraph": "lap_graph",
    "lap_graph": "lap_graph",
}

ARCH_ALIASES = {"gcn": "gcn", "sage": "sage", "graphsage": "sage", "gat": "gat", "gin": "gin"}


@dataclass(frozen=True)
class SyntheticSpec:
    """Planted-partition generator parameters."""

    nodes: int = 400
    communities: int = 4
    p_in: float = 0.1
    p_out: float = 0.005
    feature_dim: int = 32
    noise: float = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str | None = None
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    target_arch: str = "sage"
    shadow_arch: str = "sage"
    attacks: tuple[str, ...] = ("a1",)
    defense: DefenseConfig = field(default_factory=DefenseConfig)
    hops: tuple[int | None, ...] | None = None
    shadow_fraction: float = 1.0
    runs: int = 5
    seed: int = 0
    epochs: int = 200
    attack_epochs: int = 200
    hidden: int = 128
    learning_rate: float = 0.001
    dropout: float = 0.5
    pairwise: str = "all"

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.target_arch not in ARCHITECTURES or self.shadow_arch not in ARCHITECTURES:
            raise ValueError("unknown GNN architecture")
        for attack_id in self.attacks:
            if attack_id not in ATTACK_SPECS:
                raise ValueError(f"unknown attack id {attack_id!r}")
        if not (0.0 < self.shadow_fraction <= 1.0):
            raise ValueError("shadow_fraction must be in (0, 1]")

    def active_attacks(self) -> tuple[str, ...]:
        if self.hops is None:
            return self.attacks
        return tuple(a for a in self.attacks if ATTACK_SPECS[a].hop in self.hops)


@dataclass
class RunArtifacts:
    """Everything from one run the analyses need to replay."""

    bundle: SplitBundle
    target: TrainedGnn
    shadow: TrainedGnn
    attack_train: PairDataset
    attack_test: PairDataset
    attack_models: dict[str, MultiInputMlp]
    test_inputs: dict[str, dict[str, np.ndarray]]
    scores: dict[str, np.ndarray]
    target_posteriors: dict[str, np.ndarray]
    defense_kind: str = "none"
    transfer: bool = False


@dataclass
class RunReport:
    """Per-run attack AUCs plus their means and the model utilities."""

    attack_ids: tuple[str, ...]
    per_run_auc: dict[str, tuple[float, ...]]
    mean_auc: dict[str, float]
    target_accuracies: tuple[float, ...]
    shadow_accuracies: tuple[float, ...]
    durations: tuple[float, ...]
    artifacts: RunArtifacts | None = None


@contextmanager
def _stage(name: str):
    """Re-raise stage failures with the failing stage named in the message."""
    try:
        yield
    except Exception as exc:
        if exc.args and isinstance(exc.args[0], str) and exc.args[0].startswith("[stage"):
            raise
        try:
            tagged = type(exc)(f"[stage {name}] {exc}")
        except Exception:
            raise RuntimeError(f"[stage {name}] {exc}") from exc
        raise tagged from exc


def load_or_generate(cfg: ExperimentConfig) -> Graph:
    if cfg.dataset:
        return load_dataset(cfg.dataset).graph
    s = cfg.synthetic
    return generate_planted_partition(
        s.nodes, s.communities, s.p_in, s.p_out, s.feature_dim, s.noise,
        derive_seed(cfg.seed, "synthetic-graph"),
    )


def _single_run(cfg: ExperimentConfig, graph: Graph, run_idx: int, keep: bool,
                transfer_shadow: tuple[Graph, ExperimentConfig] | None = None):
    """One seeded pipeline pass; returns (aucs, target_acc, shadow_acc, artifacts)."""
    run_seed = cfg.seed + run_idx
    attacks = cfg.active_attacks()
    if not attacks:
        raise ValueError("no attacks left after hop filtering")

    transfer = transfer_shadow is not None
    with _stage("split"):
        if transfer:
            shadow_graph, shadow_cfg = transfer_shadow
            same_source = _graphs_equal(graph, shadow_graph)
            bundle = make_splits(graph, derive_seed(run_seed, "split"), cfg.shadow_fraction)
            if same_source:
                shadow_bundle = bundle
            else:
                shadow_bundle = make_splits(
                    shadow_graph, derive_seed(run_seed, "split-shadow"), shadow_cfg.shadow_fraction
                )
        else:
            bundle = make_splits(graph, derive_seed(run_seed, "split"), cfg.shadow_fraction)
            shadow_bundle = bundle
            shadow_cfg = cfg

    defense = cfg.defense
    if transfer and defense.kind == "label_only":
        raise ValueError("label-only defense is incompatible with transfer features")

    with _stage("defense"):
        target_train_graph = perturb_graph(
            bundle.target_train, defense, derive_seed(run_seed, "defense")
        )
    with _stage("target-train"):
        target = train_gnn(
            target_train_graph, cfg.target_arch, derive_seed(run_seed, "target-train"),
            num_classes=graph.num_classes, hidden=cfg.hidden, epochs=cfg.epochs,
            learning_rate=cfg.learning_rate, dropout_rate=cfg.dropout,
        )
    with _stage("shadow-train"):
        shadow_classes = shadow_bundle.shadow_train.num_classes if transfer else graph.num_classes
        shadow = train_gnn(
            shadow_bundle.shadow_train, cfg.shadow_arch, derive_seed(run_seed, "shadow-train"),
            num_classes=shadow_classes, hidden=cfg.hidden, epochs=cfg.epochs,
            learning_rate=cfg.learning_rate, dropout_rate=cfg.dropout,
        )

    with _stage("pair-sampling"):
        attack_train = build_pair_dataset(
            shadow_bundle.shadow_train, derive_seed(run_seed, "attack-train-pairs"),
            provenance="shadow_train",
        )
        attack_test = build_pair_dataset(
            bundle.target_train, derive_seed(run_seed, "attack-test-pairs"),
            provenance="target_train",
        )
        enforce_attack_provenance(attack_train, attack_test)

    target_acc = evaluate_accuracy(target, bundle.target_test)
    shadow_acc = evaluate_accuracy(shadow, shadow_bundle.shadow_test)

    aucs: dict[str, float] = {}
    models: dict[str, MultiInputMlp] = {}
    score_map: dict[str, np.ndarray] = {}
    inputs_map: dict[str, dict[str, np.ndarray]] = {}
    posterior_map: dict[str, np.ndarray] = {}
    for attack_id in attacks:
        spec = spec_for(attack_id)
        if transfer and spec.uses_node_attrs and graph.feature_dim != shadow_bundle.shadow_train.feature_dim:
            raise ValueError(
                f"{attack_id} needs matching attribute dims for transfer, "
                f"got {graph.feature_dim} vs {shadow_bundle.shadow_train.feature_dim}"
            )
        with _stage(f"attack-{attack_id}"):
            train_inputs, train_labels = attack_dataset_inputs(
                spec, shadow, attack_train, defense=defense, transfer=transfer,
                pairwise=cfg.pairwise,
            )
            attack_model = train_attack(
                attack_id, train_inputs, train_labels,
                derive_seed(run_seed, "attack-train", attack_id),
                epochs=cfg.attack_epochs, learning_rate=cfg.learning_rate,
                dropout_rate=cfg.dropout,
            )
            collector: list | None = [] if keep and spec.uses_posteriors else None
            test_inputs, test_labels = attack_dataset_inputs(
                spec, target, attack_test, defense=defense, transfer=transfer,
                pairwise=cfg.pairwise, collect_posteriors=collector,
            )
            scores = link_scores(attack_model, test_inputs)
            aucs[attack_id] = auc(scores, test_labels)
        if keep:
            models[attack_id] = attack_model
            score_map[attack_id] = scores
            inputs_map[attack_id] = test_inputs
            if collector:
                posterior_map[attack_id] = np.vstack(collector)

    artifacts = None
    if keep:
        artifacts = RunArtifacts(
            bundle=bundle, target=target, shadow=shadow,
            attack_train=attack_train, attack_test=attack_test,
            attack_models=models, test_inputs=inputs_map, scores=score_map,
            target_posteriors=posterior_map,
            defense_kind=defense.kind, transfer=transfer,
        )
    return aucs, target_acc, shadow_acc, artifacts


def _graphs_equal(a: Graph, b: Graph) -> bool:
    return (
        a.num_nodes == b.num_nodes
        and a.edges == b.edges
        and np.array_equal(a.features, b.features)
        and np.array_equal(a.labels, b.labels)
    )


def _aggregate(cfg: ExperimentConfig, results, keep_artifacts: bool) -> RunReport:
    attacks = cfg.active_attacks()
    per_run = {a: tuple(r[0][a] for r in results) for a in attacks}
    return RunReport(
        attack_ids=attacks,
        per_run_auc=per_run,
        mean_auc={a: float(np.mean(per_run[a])) for a in attacks},
        target_accuracies=tuple(r[1] for r in results),
        shadow_accuracies=tuple(r[2] for r in results),
        durations=tuple(r[4] for r in results),
        artifacts=results[0][3] if keep_artifacts else None,
    )


def run_experiment(cfg: ExperimentConfig, keep_artifacts: bool = False) -> RunReport:
    """The full multi-run pipeline on one dataset."""
    graph = load_or_generate(cfg)
    results = []
    for run_idx in range(cfg.runs):
        started = time.perf_counter()
        aucs, tacc, sacc, artifacts = _single_run(
            cfg, graph, run_idx, keep=(keep_artifacts and run_idx == 0)
        )
        results.append((aucs, tacc, sacc, artifacts, time.perf_counter() - started))
    return _aggregate(cfg, results, keep_artifacts)


def run_transfer(cfg_target: ExperimentConfig, cfg_shadow: ExperimentConfig,
                 keep_artifacts: bool = False) -> RunReport:
    """Shadow model trained on a possibly different-distribution dataset.

    Posterior features switch to the class-count-independent transfer block;
    with identical datasets this reduces to the standard protocol.
    """
    graph = load_or_generate(cfg_target)
    shadow_graph = load_or_generate(cfg_shadow)
    results = []
    for run_idx in range(cfg_target.runs):
        started = time.perf_counter()
        aucs, tacc, sacc, artifacts = _single_run(
            cfg_target, graph, run_idx, keep=(keep_artifacts and run_idx == 0),
            transfer_shadow=(shadow_graph, cfg_shadow),
        )
        results.append((aucs, tacc, sacc, artifacts, time.perf_counter() - started))
    return _aggregate(cfg_target, results, keep_artifacts)


@dataclass(frozen=True)
class SweepReport:
    """Utility and Attack-1 AUC per privacy budget, plus the undefended reference."""

    defense_kind: str
    epsilons: tuple[float, ...]
    target_accuracies: tuple[float, ...]
    attack_aucs: tuple[float, ...]
    undefended_accuracy: float
    undefended_auc: float


def run_defense_sweep(cfg: ExperimentConfig, epsilons) -> SweepReport:
    """Retrain the defended target and rerun Attack-1 at each privacy budget."""
    if cfg.defense.kind not in DP_KINDS:
        raise ValueError("defense sweep needs an edge_rand or lap_graph defense")
    epsilons = tuple(float(e) for e in epsilons)
    if not epsilons:
        raise ValueError("need at least one epsilon")
    base = replace(cfg, attacks=("a1",), hops=None)
    undefended = run_experiment(replace(base, defense=DefenseConfig()))
    accs = []
    aucs = []
    for eps in epsilons:
        rep = run_experiment(replace(base, defense=replace(cfg.defense, epsilon=eps)))
        accs.append(float(np.mean(rep.target_accuracies)))
        aucs.append(rep.mean_auc["a1"])
    return SweepReport(
        defense_kind=cfg.defense.kind,
        epsilons=epsilons,
        target_accuracies=tuple(accs),
        attack_aucs=tuple(aucs),
        undefended_accuracy=float(np.mean(undefended.target_accuracies)),
        undefended_auc=undefended.mean_auc["a1"],
    )


def pair_metric_values(graph: Graph, pairs) -> dict[str, np.ndarray]:
    """The four robustness metrics for each pair, pair edge excluded."""
    sims, cns, pas, jacs = [], [], [], []
    for u, v in pairs:
        sims.append(cosine_similarity(graph.features[u], graph.features[v]))
        cn, jac, pa = proximity_counts(graph, u, v)
        cns.append(float(cn))
        jacs.append(jac)
        pas.append(float(pa))
    return {
        "node_similarity": np.array(sims),
        "common_neighbors": np.array(cns),
        "preferential_attachment": np.array(pas),
        "jaccard": np.array(jacs),
    }


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")


def write_reports(report: RunReport, outdir: str) -> None:
    """Deterministic report/summary CSVs; wall times go to a separate file."""
    os.makedirs(outdir, exist_ok=True)
    header = ["run", "target_accuracy", "shadow_accuracy"] + [f"auc_{a}" for a in report.attack_ids]
    rows = []
    for i in range(len(report.target_accuracies)):
        row = [i, _fmt(report.target_accuracies[i]), _fmt(report.shadow_accuracies[i])]
        row += [_fmt(report.per_run_auc[a][i]) for a in report.attack_ids]
        rows.append(row)
    _write_csv(os.path.join(outdir, "report.csv"), header, rows)
    _write_csv(
        os.path.join(outdir, "summary.csv"),
        ["attack", "mean_auc"],
        [[a, _fmt(report.mean_auc[a])] for a in report.attack_ids],
    )
    _write_csv(
        os.path.join(outdir, "timing.csv"),
        ["run", "seconds"],
        [[i, f"{d:.3f}"] for i, d in enumerate(report.durations)],
    )


def write_sweep_report(sweep: SweepReport, outdir: str) -> None:
    os.makedirs(outdir, exist_ok=True)
    rows = [["undefended", _fmt(sweep.undefended_accuracy), _fmt(sweep.undefended_auc)]]
    for eps, acc, a in zip(sweep.epsilons, sweep.target_accuracies, sweep.attack_aucs):
        rows.append([_fmt(eps), _fmt(acc), _fmt(a)])
    _write_csv(os.path.join(outdir, "sweep.csv"),
               ["epsilon", "target_accuracy", "attack_auc"], rows)


def write_run_artifacts(report: RunReport, outdir: str) -> None:
    """Split manifest, model checkpoints, and per-pair scores for the retained run."""
    art = report.artifacts
    if art is None:
        return
    run_dir = os.path.join(outdir, "run0")
    os.makedirs(run_dir, exist_ok=True)
    write_split_manifest(art.bundle, run_dir)
    save_gnn(art.target, os.path.join(run_dir, "target.ckpt"))
    save_gnn(art.shadow, os.path.join(run_dir, "shadow.ckpt"))
    labels = art.attack_test.labels
    pairs = art.attack_test.node_pairs
    for attack_id, scores in art.scores.items():
        _write_csv(
            os.path.join(run_dir, f"scores_{attack_id}.csv"),
            ["u", "v", "label", "score"],
            [[u, v, int(lbl), _fmt(sc)] for (u, v), lbl, sc in zip(pairs, labels, scores)],
        )


def write_analyses(report: RunReport, outdir: str, groups: int = 10) -> None:
    """Robustness groups, correlation, surprising links, and the leading-
    probability CDF, computed from the retained run's scored pairs."""
    art = report.artifacts
    if art is None:
        raise ValueError("analyses need a report with retained artifacts")
    os.makedirs(outdir, exist_ok=True)
    graph = art.attack_test.graph
    pairs = art.attack_test.node_pairs
    labels = art.attack_test.labels
    metric_values = pair_metric_values(graph, pairs)
    pos_mask = labels == 1
    neg_mask = labels == 0

    group_rows = []
    pcc_rows = []
    for attack_id in report.attack_ids:
        scores = art.scores[attack_id]
        for metric in PAIR_METRIC_NAMES:
            values = metric_values[metric]
            if int(pos_mask.sum()) >= groups:
                rep = robustness_groups(scores[pos_mask], values[pos_mask],
                                        scores[neg_mask], metric, groups=groups)
                for g, (a, (hi, lo), size) in enumerate(
                        zip(rep.group_aucs, rep.boundaries, rep.group_sizes)):
                    group_rows.append([attack_id, metric, g, _fmt(a), _fmt(hi), _fmt(lo), size])
            pcc_rows.append([
                attack_id, metric,
                _fmt(pearson_correlation(scores[pos_mask], values[pos_mask])),
                _fmt(pearson_correlation(scores[neg_mask], values[neg_mask])),
            ])
    _write_csv(os.path.join(outdir, "groups.csv"),
               ["attack", "metric", "group", "auc", "metric_max", "metric_min", "size"],
               group_rows)
    _write_csv(os.path.join(outdir, "pcc.csv"),
               ["attack", "metric", "positive_pcc", "negative_pcc"], pcc_rows)

    surprising_rows = []
    baselines = [b for b in ("b0", "b1") if b in art.scores]
    posterior_attacks = [a for a in report.attack_ids if ATTACK_SPECS[a].uses_posteriors]
    for attack_id in posterior_attacks:
        for baseline_id in baselines:
            for metric in PAIR_METRIC_NAMES:
                if int(pos_mask.sum()) < groups:
                    continue
                idx = last_group_indices(metric_values[metric][pos_mask], groups=groups)
                result = surprising_links(
                    (art.scores[attack_id][pos_mask] >= 0.5).astype(int),
                    (art.scores[baseline_id][pos_mask] >= 0.5).astype(int),
                    idx,
                )
                surprising_rows.append([
                    attack_id, baseline_id, metric,
                    _fmt(result.last_group_rate), _fmt(result.overall_rate),
                ])
    _write_csv(os.path.join(outdir, "surprising.csv"),
               ["attack", "baseline", "metric", "last_group_rate", "overall_rate"],
               surprising_rows)

    cdf_rows = []
    for attack_id, posts in art.target_posteriors.items():
        values, fractions = leading_probability_cdf(posts)
        for v, f in zip(values, fractions):
            cdf_rows.append([attack_id, _fmt(v), _fmt(f)])
    _write_csv(os.path.join(outdir, "leading_cdf.csv"),
               ["attack", "leading_probability", "cumulative_fraction"], cdf_rows)


def export_test_features(report: RunReport, outdir: str) -> None:
    """CSV per attack naming every feature column of the retained test set."""
    art = report.artifacts
    if art is None:
        raise ValueError("feature export needs retained artifacts")
    os.makedirs(outdir, exist_ok=True)
    num_classes = art.target.num_classes
    feature_dim = art.attack_test.graph.feature_dim
    for attack_id, inputs in art.test_inputs.items():
        columns: list[str] = []
        mats: list[np.ndarray] = []
        for kind in ("node_attr", "posterior", "graph"):
            if kind not in inputs:
                continue
            mat = inputs[kind]
            if kind == "node_attr":
                columns += feat.node_attr_block_names(feature_dim)
            elif kind == "graph":
                columns += feat.graph_block_names()
            elif art.transfer:
                columns += feat.transfer_block_names()
            elif art.defense_kind == "label_only":
                columns += feat.label_block_names(num_classes)
            else:
                columns += feat.posterior_block_names(num_classes)
            mats.append(mat)
        matrix = np.concatenate(mats, axis=1)
        feat.export_features_csv(
            os.path.join(outdir, f"features_{attack_id}.csv"), columns, matrix
        )


def summarize_report_csv(report_path: str, summary_path: str) -> None:
    """Recompute mean AUCs from a stored per-run report."""
    with open(report_path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    header = lines[0].split(",")
    attack_cols = [(i, name[4:]) for i, name in enumerate(header) if name.startswith("auc_")]
    sums = {name: 0.0 for _, name in attack_cols}
    count = 0
    for line in lines[1:]:
        cells = line.split(",")
        for i, name in attack_cols:
            sums[name] += float(cells[i])
        count += 1
    if count == 0:
        raise ValueError("report has no runs")
    _write_csv(summary_path, ["attack", "mean_auc"],
               [[name, _fmt(sums[name] / count)] for _, name in attack_cols])


# Configuration files are flat key=value text; lists are comma-separated.
_RESERVED_KEYS = {"out", "epsilons", "analyses", "export_features"}


def parse_config_file(path: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {raw.rstrip()}")
            key, value = line.split("=", 1)
            mapping[key.strip()] = value.strip()
    return mapping


def _parse_hops(text: str) -> tuple[int | None, ...]:
    out: list[int | None] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        out.append(None if part == "none" else int(part))
    return tuple(out)


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    """Build a typed config from string keys; unknown keys are rejected."""
    known = {
        "dataset", "synthetic_nodes", "synthetic_communities", "synthetic_p_in",
        "synthetic_p_out", "synthetic_feature_dim", "synthetic_noise",
        "target_arch", "shadow_arch", "attacks", "defense", "epsilon",
        "temperature", "budget_split", "shadow_fraction", "runs", "seed",
        "epochs", "attack_epochs", "hidden", "learning_rate", "dropout",
        "pairwise_ops", "hops",
    }
    unknown = set(mapping) - known - _RESERVED_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    get = mapping.get
    synthetic = SyntheticSpec(
        nodes=int(get("synthetic_nodes", 400)),
        communities=int(get("synthetic_communities", 4)),
        p_in=float(get("synthetic_p_in", 0.1)),
        p_out=float(get("synthetic_p_out", 0.005)),
        feature_dim=int(get("synthetic_feature_dim", 32)),
        noise=float(get("synthetic_noise", 1.0)),
    )
    defense_kind = DEFENSE_ALIASES.get(get("defense", "none"))
    if defense_kind is None:
        raise ValueError(f"unknown defense {mapping['defense']!r}")
    defense = DefenseConfig(
        kind=defense_kind,
        temperature=float(get("temperature", 20.0)),
        epsilon=float(mapping["epsilon"]) if "epsilon" in mapping else None,
        budget_split=float(get("budget_split", 0.01)),
    )
    attacks = tuple(a.strip() for a in get("attacks", "a1").split(",") if a.strip())
    target_arch = ARCH_ALIASES.get(get("target_arch", "sage"))
    shadow_arch = ARCH_ALIASES.get(get("shadow_arch", "sage"))
    if target_arch is None or shadow_arch is None:
        raise ValueError("unknown GNN architecture in config")
    return ExperimentConfig(
        dataset=get("dataset") or None,
        synthetic=synthetic,
        target_arch=target_arch,
        shadow_arch=shadow_arch,
        attacks=attacks,
        defense=defense,
        hops=_parse_hops(mapping["hops"]) if "hops" in mapping else None,
        shadow_fraction=float(get("shadow_fraction", 1.0)),
        runs=int(get("runs", 5)),
        seed=int(get("seed", 0)),
        epochs=int(get("epochs", 200)),
        attack_epochs=int(get("attack_epochs", 200)),
        hidden=int(get("hidden", 128)),
        learning_rate=float(get("learning_rate", 0.001)),
        dropout=float(get("dropout", 0.5)),
        pairwise=get("pairwise_ops", "all"),
    )
