"""Attack taxonomy conformance, architectures, training, and inference."""

import numpy as np
import pytest

from linklab.attacks import (
    ATTACK_SPECS,
    assemble_features,
    attack_dataset_inputs,
    build_attack_model,
    infer_link,
    link_scores,
    mlp_forward,
    spec_for,
    train_attack,
)
from linklab.data import build_pair_dataset, generate_planted_partition, make_splits
from linklab.gnn import train_gnn
from linklab.metrics import auc
from linklab.nn import Tensor
from linklab.rng import stream

# Independent transcription of the attack-taxonomy table:
# id -> (hop, posteriors, node attributes, graph features)
TAXONOMY = {
    "a0": (0, True, False, False),
    "a1": (1, True, False, False),
    "a2": (2, True, False, False),
    "a3": (0, True, True, False),
    "a4": (1, True, True, False),
    "a5": (2, True, True, False),
    "a6": (1, True, False, True),
    "a7": (2, True, False, True),
    "a8": (1, True, True, True),
    "a9": (2, True, True, True),
    "b0": (None, False, True, False),
    "b1": (None, False, False, True),
    "b2": (None, False, True, True),
}


class TestTaxonomyConformance:
    def test_every_spec_matches_table(self):
        assert set(ATTACK_SPECS) == set(TAXONOMY)
        for attack_id, (hop, p, n, g) in TAXONOMY.items():
            spec = ATTACK_SPECS[attack_id]
            assert spec.hop == hop
            assert spec.uses_posteriors == p
            assert spec.uses_node_attrs == n
            assert spec.uses_graph_feats == g

    def test_unknown_id_rejected(self):
        with pytest.raises(ValueError):
            spec_for("a10")


class TestArchitectures:
    def _widths(self, model):
        return {br.kind: tuple(br.widths) for br in model.branches}

    def test_posterior_only_mlp(self):
        model = build_attack_model("a0", {"posterior": 28}, stream(0, "init"))
        assert self._widths(model) == {"posterior": (128, 32)}
        assert model.head_w.data.shape == (32, 2)

    def test_attr_and_posterior(self):
        model = build_attack_model("a4", {"node_attr": 50, "posterior": 28}, stream(0, "init"))
        assert self._widths(model) == {"node_attr": (128, 64, 16), "posterior": (64, 16)}
        assert model.head_w.data.shape == (32, 2)

    def test_graph_and_posterior(self):
        model = build_attack_model("a6", {"graph": 3, "posterior": 28}, stream(0, "init"))
        assert self._widths(model) == {"graph": (16, 4), "posterior": (128, 64, 16)}
        assert model.head_w.data.shape == (20, 2)

    def test_three_branch(self):
        model = build_attack_model("a9", {"node_attr": 50, "posterior": 28, "graph": 3},
                                   stream(0, "init"))
        assert self._widths(model) == {
            "node_attr": (128, 64, 16), "posterior": (128, 64, 16), "graph": (4,)
        }
        assert model.head_w.data.shape == (36, 2)

    def test_baselines(self):
        b0 = build_attack_model("b0", {"node_attr": 50}, stream(0, "init"))
        assert self._widths(b0) == {"node_attr": (128, 32)}
        b1 = build_attack_model("b1", {"graph": 3}, stream(0, "init"))
        assert self._widths(b1) == {"graph": (16,)}
        b2 = build_attack_model("b2", {"node_attr": 50, "graph": 3}, stream(0, "init"))
        assert self._widths(b2) == {"node_attr": (256, 64, 8), "graph": (1,)}
        assert b2.head_w.data.shape == (9, 2)

    def test_wrong_input_kinds_rejected(self):
        with pytest.raises(ValueError):
            build_attack_model("a0", {"graph": 3}, stream(0, "init"))

    def test_depth_override(self):
        for depth, widths in ((2, (128,)), (3, (128, 32)), (4, (128, 32, 16)), (5, (128, 32, 16, 8))):
            model = build_attack_model("a1", {"posterior": 28}, stream(0, "init"), depth=depth)
            assert self._widths(model) == {"posterior": widths}
        with pytest.raises(ValueError):
            build_attack_model("a8", {"node_attr": 4, "posterior": 4, "graph": 3},
                               stream(0, "init"), depth=3)


@pytest.fixture(scope="module")
def pipeline():
    """A small trained pipeline shared by the feature-assembly tests."""
    g = generate_planted_partition(160, 4, 0.15, 0.01, 12, 1.0, seed=23)
    bundle = make_splits(g, 8)
    shadow = train_gnn(bundle.shadow_train, "sage", seed=3, num_classes=g.num_classes, epochs=60)
    attack_train = build_pair_dataset(bundle.shadow_train, seed=4, provenance="shadow_train")
    return g, bundle, shadow, attack_train


class TestAssembleFeatures:
    def test_attack0_vector_length(self, pipeline):
        g, bundle, shadow, ds = pipeline
        u, v, _ = ds.pairs[0]
        feats = assemble_features(spec_for("a0"), shadow, ds.graph, (u, v))
        assert set(feats) == {"posterior"}
        assert feats["posterior"].shape == (4 * g.num_classes,)

    def test_attack0_seven_class_length_28(self):
        from linklab.gnn import init_gnn

        g = generate_planted_partition(70, 7, 0.3, 0.02, 6, 1.0, seed=2)
        model = init_gnn("gcn", 6, 7, np.random.default_rng(0), hidden=8)
        feats = assemble_features(spec_for("a0"), model, g, (0, 1))
        assert feats["posterior"].shape == (28,)

    def test_baseline1_vector(self, pipeline):
        _, _, shadow, ds = pipeline
        u, v, _ = ds.pairs[0]
        feats = assemble_features(spec_for("b1"), None, ds.graph, (u, v))
        assert set(feats) == {"graph"}
        assert feats["graph"].shape == (3,)

    def test_attack9_three_kinds(self, pipeline):
        g, _, shadow, ds = pipeline
        u, v, _ = ds.pairs[0]
        feats = assemble_features(spec_for("a9"), shadow, ds.graph, (u, v))
        assert set(feats) == {"posterior", "node_attr", "graph"}
        assert feats["posterior"].shape == (4 * g.num_classes,)
        assert feats["node_attr"].shape == (ds.graph.feature_dim,)
        assert feats["graph"].shape == (3,)

    def test_graph_features_at_hop_zero_rejected(self, pipeline):
        _, _, shadow, ds = pipeline
        from linklab.attacks import AttackSpec

        bogus = AttackSpec("custom", 0, True, False, True)
        u, v, _ = ds.pairs[0]
        with pytest.raises(ValueError):
            assemble_features(bogus, shadow, ds.graph, (u, v))

    def test_transfer_posterior_width(self, pipeline):
        _, _, shadow, ds = pipeline
        u, v, _ = ds.pairs[0]
        feats = assemble_features(spec_for("a1"), shadow, ds.graph, (u, v), transfer=True)
        assert feats["posterior"].shape == (7,)


class TestTrainAttack:
    def test_separable_features_high_accuracy(self):
        rng = np.random.default_rng(2)
        n = 200
        labels = np.repeat([0, 1], n // 2)
        x = rng.normal(size=(n, 8)) + labels[:, None] * 4.0
        model = train_attack("a0", {"posterior": x}, labels, seed=1, epochs=120)
        scores = link_scores(model, {"posterior": x})
        acc = float(np.mean((scores >= 0.5).astype(int) == labels))
        assert acc > 0.99

    def test_random_labels_chance_auc(self):
        rng = np.random.default_rng(3)
        n = 400
        x = rng.normal(size=(n, 8))
        labels = np.repeat([0, 1], n // 2)
        model = train_attack("a0", {"posterior": x}, labels, seed=2, epochs=80)
        holdout = rng.normal(size=(n, 8))
        scores = link_scores(model, {"posterior": holdout})
        assert abs(auc(scores, labels) - 0.5) <= 0.05

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError):
            train_attack("a0", {"posterior": np.zeros((0, 4))}, np.zeros(0), seed=0)

    def test_unbalanced_rejected(self):
        x = np.zeros((3, 4))
        with pytest.raises(ValueError):
            train_attack("a0", {"posterior": x}, np.array([1, 1, 0]), seed=0)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(40, 6))
        labels = np.repeat([0, 1], 20)
        m1 = train_attack("b0", {"node_attr": x}, labels, seed=9, epochs=30)
        m2 = train_attack("b0", {"node_attr": x}, labels, seed=9, epochs=30)
        for p1, p2 in zip(m1.parameters(), m2.parameters()):
            assert p1.data.tobytes() == p2.data.tobytes()


@pytest.fixture(scope="module")
def model():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(60, 5))
    labels = np.repeat([0, 1], 30)
    return train_attack("a0", {"posterior": x}, labels, seed=3, epochs=20)


class TestInferLink:
    def test_equal_logits_half(self, model):
        # force the head to produce equal logits
        logits = mlp_forward(model, {"posterior": np.zeros((1, 5))}, training=False)
        delta = logits.data[0, 1] - logits.data[0, 0]
        probs = 1.0 / (1.0 + np.exp(-delta))
        verdict = infer_link(model, {"posterior": np.zeros(5)})
        assert verdict.score == pytest.approx(float(probs), abs=1e-12)

    def test_scores_complement_to_one(self, model):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(50, 5))
        from linklab import nn as nnmod

        logits = mlp_forward(model, {"posterior": x}, training=False)
        probs = nnmod.softmax_with_temperature(logits, 1.0).data
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(link_scores(model, {"posterior": x}), probs[:, 1], atol=1e-15)

    def test_decision_threshold(self, model):
        rng = np.random.default_rng(9)
        for _ in range(20):
            v = infer_link(model, {"posterior": rng.normal(size=5)})
            assert v.decision == int(v.score >= 0.5)

    def test_logit_closed_forms(self):
        from linklab import nn as nnmod

        even = nnmod.softmax_with_temperature(Tensor(np.array([[0.0, 0.0]])), 1.0).data
        assert even[0, 1] == pytest.approx(0.5, abs=1e-15)
        out = nnmod.softmax_with_temperature(Tensor(np.array([[-10.0, 10.0]])), 1.0).data
        assert out[0, 1] > 0.9999

    def test_shape_mismatch_rejected(self, model):
        with pytest.raises(ValueError):
            infer_link(model, {"posterior": np.zeros(9)})


class TestEndToEndProperties:
    def test_order_invariance_quick(self, pipeline):
        g, bundle, shadow, ds = pipeline
        inputs, labels = attack_dataset_inputs(spec_for("a1"), shadow, ds)
        model = train_attack("a1", inputs, labels, seed=5, epochs=40)
        rng = np.random.default_rng(11)
        for _ in range(20):
            u, v, _ = ds.pairs[int(rng.integers(len(ds.pairs)))]
            fwd = infer_link(model, assemble_features(spec_for("a1"), shadow, ds.graph, (u, v)))
            rev = infer_link(model, assemble_features(spec_for("a1"), shadow, ds.graph, (v, u)))
            assert fwd.score == rev.score

    def test_depth_ablation_stable_auc(self, pipeline):
        """Varying posterior-only MLP depth moves AUC by less than 0.05."""
        g, bundle, shadow, ds = pipeline
        target = train_gnn(bundle.target_train, "sage", seed=13, num_classes=g.num_classes, epochs=60)
        test_ds = build_pair_dataset(bundle.target_train, seed=6, provenance="target_train")
        train_inputs, train_labels = attack_dataset_inputs(spec_for("a1"), shadow, ds)
        test_inputs, test_labels = attack_dataset_inputs(spec_for("a1"), target, test_ds)
        aucs = []
        for depth in (2, 3, 4, 5):
            model = train_attack("a1", train_inputs, train_labels, seed=7, epochs=200, depth=depth)
            aucs.append(auc(link_scores(model, test_inputs), test_labels))
        assert max(aucs) - min(aucs) < 0.05
