"""Desk-scale laboratory for link stealing attacks on inductive GNNs."""

from .attacks import (
    ATTACK_SPECS,
    AttackSpec,
    LinkVerdict,
    MultiInputMlp,
    assemble_features,
    build_attack_model,
    infer_link,
    link_scores,
    train_attack,
)
from .data import (
    PairDataset,
    SplitBundle,
    build_pair_dataset,
    generate_planted_partition,
    make_splits,
)
from .defenses import (
    DefenseConfig,
    apply_defended_query,
    edge_rand,
    label_only_feature,
    lap_graph,
    perturb_graph,
)
from .experiment import (
    ExperimentConfig,
    RunReport,
    SyntheticSpec,
    run_defense_sweep,
    run_experiment,
    run_transfer,
)
from .features import (
    QueryContext,
    graph_block,
    node_attr_block,
    pairwise_ops,
    posterior_block,
    transfer_block,
)
from .gnn import (
    TrainedGnn,
    evaluate_accuracy,
    khop_query,
    layer_forward,
    load_gnn,
    predict_label,
    save_gnn,
    train_gnn,
)
from .graph import Graph, Subgraph, khop_subgraph, load_dataset, neighbors
from .metrics import (
    GroupReport,
    accuracy,
    auc,
    leading_probability_cdf,
    pearson_correlation,
    robustness_groups,
    surprising_links,
)

__version__ = "0.1.0"
