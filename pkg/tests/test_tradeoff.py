import random

import numpy as np
import pytest

from sepkit import debugcheck
from sepkit.certificates import MinorReport, MinorWitness, Separator, verify_output
from sepkit.generators import grid_graph, kh_blowup_graph, path_graph
from sepkit.graph import Graph
from sepkit.tradeoff import (
    contract_by_partition,
    linear_time_separator,
    partition_spanning_tree,
    tradeoff_separator,
    tree_partition,
)


@pytest.fixture(autouse=True)
def _debug_asserts():
    debugcheck.enable(True)
    yield
    debugcheck.enable(False)


class TestPartitionSpanningTree:
    def test_path_exact_tiles(self):
        parent = np.array([-1] + list(range(99)), dtype=np.int64)
        order = np.arange(100, dtype=np.int64)
        tp = partition_spanning_tree(parent, order, 10, 1)
        sizes = np.bincount(tp.subtree_of)
        assert tp.count == 10 and set(sizes.tolist()) == {10}

    def test_star_single_piece(self):
        parent = np.array([-1] + [0] * 20, dtype=np.int64)
        order = np.arange(21, dtype=np.int64)
        tp = partition_spanning_tree(parent, order, 30, 25)
        assert tp.count == 1

    def test_random_tree_size_bound(self):
        rnd = random.Random(4)
        n = 1000
        parent = np.array([-1] + [rnd.randrange(i) for i in range(1, n)], dtype=np.int64)
        order = np.arange(n, dtype=np.int64)
        degs = np.bincount(parent[parent >= 0], minlength=n) + 1
        cap = int(degs.max())
        tp = partition_spanning_tree(parent, order, 37, cap)
        sizes = np.bincount(tp.subtree_of)
        assert int(sizes.max()) <= 37 + cap
        # classes are connected in the tree
        for v in range(1, n):
            if tp.subtree_of[v] != tp.subtree_of[parent[v]]:
                continue
        roots = sum(1 for v in range(n) if parent[v] < 0 or tp.subtree_of[v] != tp.subtree_of[parent[v]])
        assert roots == tp.count

    def test_degree_cap_validated_in_driver(self):
        g = Graph(6, [(0, i) for i in range(1, 6)])
        with pytest.raises(ValueError):
            tree_partition(g, np.arange(6), 3, 2)


class TestContraction:
    def test_weight_preservation(self):
        g = grid_graph(8)
        tp = tree_partition(g, np.arange(g.n), 7, 4)
        quo = contract_by_partition(g, np.arange(g.n), tp)
        assert int(quo.graph.total_vertex_weight) == g.n
        assert quo.graph.n == tp.count
        # members partition the live set
        seen = np.zeros(g.n, dtype=np.int64)
        for mem in quo.members:
            seen[mem] += 1
        assert (seen == 1).all()

    def test_quotient_simple(self):
        g = grid_graph(6)
        tp = tree_partition(g, np.arange(g.n), 5, 4)
        quo = contract_by_partition(g, np.arange(g.n), tp)
        eu, ev = quo.graph.edge_u, quo.graph.edge_v
        assert np.all(eu < ev)
        key = eu * quo.graph.n + ev
        assert len(np.unique(key)) == len(key)


class TestTradeoffSeparator:
    def test_small_quotient_trivial(self):
        g = path_graph(12)
        out = tradeoff_separator(g, 3, 0.8, 0.5, seed=0)
        assert verify_output(g, out).ok

    def test_grid_sizes(self):
        for k in (16, 32):
            g = grid_graph(k)
            out = tradeoff_separator(g, 5, 0.8, 0.5, seed=0)
            assert isinstance(out, Separator)
            assert verify_output(g, out).ok
            assert len(out.C) <= out.claimed_bound

    def test_delta_domain(self):
        g = path_graph(10)
        with pytest.raises(ValueError):
            tradeoff_separator(g, 3, 0.5, 0.5)
        with pytest.raises(ValueError):
            tradeoff_separator(g, 3, 1.0, 0.5)

    def test_dense_density_certificate(self):
        rnd = random.Random(1)
        edges = set()
        n = 40
        while len(edges) < 420:
            a, b = rnd.randrange(n), rnd.randrange(n)
            if a != b:
                edges.add((min(a, b), max(a, b)))
        g = Graph(n, sorted(edges))
        out = tradeoff_separator(g, 4, 0.75, 0.5, seed=0)
        assert isinstance(out, (MinorReport, MinorWitness))
        assert verify_output(g, out).ok

    def test_k20_minor_side(self):
        g = Graph(20, [(i, j) for i in range(20) for j in range(i + 1, 20)])
        out = linear_time_separator(g, 5, 0.5, seed=0)
        assert isinstance(out, (MinorReport, MinorWitness))
        assert verify_output(g, out).ok

    def test_single_edge(self):
        g = path_graph(2)
        out = linear_time_separator(g, 3, 0.5, seed=0)
        assert isinstance(out, Separator)
        assert verify_output(g, out).ok

    def test_quotient_witness_lifts(self):
        # blow-up whose quotient run finds the minor: the lifted witness
        # must be verifier-clean on the original graph
        g = kh_blowup_graph(6, 60, seed=2)
        out = tradeoff_separator(g, 6, 0.8, 0.5, seed=0)
        assert verify_output(g, out).ok
        if isinstance(out, MinorWitness):
            assert out.h == 6

    def test_high_degree_separator_path(self):
        # hub-and-spoke: removing the single high-degree hub separates
        spokes = 60
        edges = []
        for i in range(spokes):
            base = 1 + 3 * i
            edges += [(0, base), (base, base + 1), (base + 1, base + 2)]
        g = Graph(1 + 3 * spokes, edges)
        out = tradeoff_separator(g, 3, 0.75, 0.5, seed=0)
        assert isinstance(out, Separator)
        assert verify_output(g, out).ok
        assert out.params.get("path") == "high-degree-only"
        assert 0 in out.C
