"""Graph construction, neighborhoods, k-hop subgraphs, and the dataset loader."""

import numpy as np
import pytest

from linklab.graph import (
    Graph,
    adjacency_matrix,
    graph_from_adjacency,
    induced_subgraph,
    khop_subgraph,
    load_dataset,
    neighbors,
    normalize_edge,
    save_dataset,
)


def make_graph(n, edges, d=3, labels=None):
    rng = np.random.default_rng(0)
    feats = rng.normal(size=(n, d))
    if labels is None:
        labels = np.zeros(n, dtype=int)
    return Graph(num_nodes=n, edges=frozenset(normalize_edge(*e) for e in edges), features=feats, labels=labels)


def random_graph(rng, n, p):
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return make_graph(n, edges)


def bfs_oracle(adj_sets, start, depth, banned=None):
    """Plain queue BFS over explicit adjacency sets, ignoring the banned edge."""
    reached = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for w in adj_sets[u]:
                if banned and normalize_edge(u, w) == banned:
                    continue
                if w not in reached:
                    reached.add(w)
                    nxt.append(w)
        frontier = nxt
    return reached


class TestGraphConstruction:
    def test_rejects_bad_edge(self):
        with pytest.raises(ValueError):
            make_graph(3, [(0, 5)])

    def test_rejects_feature_row_mismatch(self):
        with pytest.raises(ValueError):
            Graph(num_nodes=3, edges=frozenset(), features=np.zeros((2, 4)), labels=np.zeros(3, dtype=int))

    def test_rejects_label_length_mismatch(self):
        with pytest.raises(ValueError):
            Graph(num_nodes=3, edges=frozenset(), features=np.zeros((3, 4)), labels=np.zeros(2, dtype=int))

    def test_degree_counts_incident_pairs(self):
        g = make_graph(4, [(0, 1), (0, 2), (0, 3)])
        assert g.degree(0) == 3
        assert g.degree(1) == 1

    def test_features_are_immutable(self):
        g = make_graph(3, [(0, 1)])
        with pytest.raises(ValueError):
            g.features[0, 0] = 5.0


class TestNeighbors:
    def test_path_graph(self):
        g = make_graph(3, [(0, 1), (1, 2)])
        assert neighbors(g, 1) == {0, 2}

    def test_isolated_node(self):
        g = make_graph(3, [(0, 1)])
        assert neighbors(g, 2) == frozenset()

    def test_star_matches_adjacency_oracle(self):
        edges = [(0, 1), (0, 2), (0, 3)]
        g = make_graph(4, edges)
        oracle = {v: set() for v in range(4)}
        for u, v in edges:
            oracle[u].add(v)
            oracle[v].add(u)
        for v in range(4):
            assert set(neighbors(g, v)) == oracle[v]

    def test_excludes_self_without_self_loop(self):
        g = make_graph(3, [(0, 1)])
        assert 0 not in neighbors(g, 0)
        g2 = make_graph(3, [(0, 1), (0, 0)])
        assert 0 in neighbors(g2, 0)

    def test_invalid_node_errors(self):
        g = make_graph(3, [(0, 1)])
        with pytest.raises(ValueError):
            neighbors(g, 3)

    def test_symmetry_on_random_graphs(self):
        rng = np.random.default_rng(4)
        g = random_graph(rng, 25, 0.2)
        for u in range(g.num_nodes):
            for v in neighbors(g, u):
                assert u in neighbors(g, v)


class TestKhopSubgraph:
    def test_zero_hop_is_self_loop_only(self):
        g = make_graph(5, [(0, 1), (1, 2)])
        sub = khop_subgraph(g, 1, 0)
        assert sub.nodes == (1,)
        assert sub.edges == {(1, 1)}
        assert sub.hop == 0
        np.testing.assert_array_equal(sub.feature_view, g.features[[1]])

    def test_path_one_hop(self):
        g = make_graph(4, [(0, 1), (1, 2), (2, 3)])
        sub = khop_subgraph(g, 1, 1)
        assert sub.nodes == (0, 1, 2)
        non_loops = {e for e in sub.edges if e[0] != e[1]}
        assert non_loops == {(0, 1), (1, 2)}
        assert {(v, v) for v in sub.nodes} <= sub.edges

    def test_invalid_inputs(self):
        g = make_graph(3, [(0, 1)])
        with pytest.raises(ValueError):
            khop_subgraph(g, 9, 1)
        with pytest.raises(ValueError):
            khop_subgraph(g, 0, 3)

    def test_exclusion_removes_edge_and_frontier(self):
        g = make_graph(3, [(0, 1), (1, 2)])
        sub = khop_subgraph(g, 0, 1, exclude=(0, 1))
        assert sub.nodes == (0,)
        assert sub.edges == {(0, 0)}

    def test_matches_bfs_oracle_on_random_graphs(self):
        rng = np.random.default_rng(7)
        for trial in range(100):
            g = random_graph(rng, 30, 0.2)
            adj = {v: set(neighbors(g, v)) for v in range(g.num_nodes)}
            v = int(rng.integers(g.num_nodes))
            k = int(rng.integers(0, 3))
            banned = None
            if g.edges and rng.random() < 0.7:
                banned = sorted(g.edges)[int(rng.integers(len(g.edges)))]
            expected = bfs_oracle(adj, v, k, banned) if k else {v}
            sub = khop_subgraph(g, v, k, exclude=banned)
            assert set(sub.nodes) == expected

    def test_two_hop_superset_of_one_hop(self):
        rng = np.random.default_rng(9)
        g = random_graph(rng, 24, 0.15)
        for v in range(g.num_nodes):
            e = sorted(g.edges)[0] if g.edges else None
            one = set(khop_subgraph(g, v, 1, exclude=e).nodes)
            two = set(khop_subgraph(g, v, 2, exclude=e).nodes)
            assert one <= two

    def test_exclusion_never_adds_anything(self):
        rng = np.random.default_rng(13)
        g = random_graph(rng, 20, 0.2)
        edges = sorted(g.edges)
        for trial in range(20):
            v = int(rng.integers(g.num_nodes))
            k = int(rng.integers(1, 3))
            e = edges[int(rng.integers(len(edges)))]
            with_excl = khop_subgraph(g, v, k, exclude=e)
            without = khop_subgraph(g, v, k)
            assert set(with_excl.nodes) <= set(without.nodes)
            assert set(with_excl.edges) <= set(without.edges) | {(u, u) for u in with_excl.nodes}

    def test_local_edges_reindexed(self):
        g = make_graph(5, [(2, 4), (2, 3)])
        sub = khop_subgraph(g, 2, 1)
        assert sub.nodes == (2, 3, 4)
        assert (0, 1) in sub.local_edges()
        assert (0, 2) in sub.local_edges()


class TestInducedSubgraph:
    def test_induced_keeps_internal_edges_only(self):
        g = make_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        sub, ids = induced_subgraph(g, [1, 2, 4])
        assert ids == (1, 2, 4)
        assert sub.num_nodes == 3
        assert sub.edges == {(0, 1)}

    def test_feature_rows_follow_id_map(self):
        g = make_graph(5, [(0, 1)])
        sub, ids = induced_subgraph(g, [4, 0])
        np.testing.assert_array_equal(sub.features, g.features[list(ids)])


class TestAdjacencyRoundtrip:
    def test_matrix_and_back(self):
        rng = np.random.default_rng(3)
        g = random_graph(rng, 12, 0.3)
        adj = adjacency_matrix(g)
        assert np.array_equal(adj, adj.T)
        g2 = graph_from_adjacency(adj, g.features, g.labels)
        assert g2.edges == g.edges


class TestDatasetIo:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(5)
        g = random_graph(rng, 15, 0.2)
        save_dataset(g, str(tmp_path))
        loaded = load_dataset(str(tmp_path))
        assert loaded.graph.edges == g.edges
        np.testing.assert_array_equal(loaded.graph.features, g.features)
        np.testing.assert_array_equal(loaded.graph.labels, g.labels)
        assert loaded.source_ids == tuple(range(15))

    def test_remaps_external_ids(self, tmp_path):
        (tmp_path / "edges.tsv").write_text("100\t200\n200\t300\n")
        (tmp_path / "features.csv").write_text("1.0,0.0\n0.0,1.0\n1.0,1.0\n")
        (tmp_path / "labels.csv").write_text("0\n1\n0\n")
        loaded = load_dataset(str(tmp_path))
        assert loaded.graph.num_nodes == 3
        assert loaded.graph.edges == {(0, 1), (1, 2)}
        assert loaded.source_ids == (100, 200, 300)

    def test_symmetrizes_directed_edges(self, tmp_path):
        (tmp_path / "edges.tsv").write_text("0\t1\n1\t0\n1\t2\n")
        (tmp_path / "features.csv").write_text("1.0\n2.0\n3.0\n")
        (tmp_path / "labels.csv").write_text("0\n1\n1\n")
        loaded = load_dataset(str(tmp_path))
        assert loaded.graph.edges == {(0, 1), (1, 2)}

    def test_rejects_inconsistent_labels(self, tmp_path):
        (tmp_path / "edges.tsv").write_text("0\t1\n")
        (tmp_path / "features.csv").write_text("1.0\n2.0\n")
        (tmp_path / "labels.csv").write_text("0\n")
        with pytest.raises(ValueError):
            load_dataset(str(tmp_path))

    def test_remaps_sparse_labels(self, tmp_path):
        (tmp_path / "edges.tsv").write_text("0\t1\n")
        (tmp_path / "features.csv").write_text("1.0\n2.0\n")
        (tmp_path / "labels.csv").write_text("3\n7\n")
        loaded = load_dataset(str(tmp_path))
        np.testing.assert_array_equal(loaded.graph.labels, [0, 1])
        assert loaded.label_values == (3, 7)
