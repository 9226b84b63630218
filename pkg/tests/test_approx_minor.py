import random

import pytest

from sepkit.approx_minor import approx_largest_clique_minor
from sepkit.certificates import brute_force_minor_detect, verify_minor_witness
from sepkit.generators import binary_tree_graph, grid_graph, kh_blowup_graph, path_graph
from sepkit.graph import Graph
from sepkit.small_minors import find_k3_witness, find_k4_witness


class TestSmallMinors:
    def test_k3_on_cycle(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        w = find_k3_witness(g)
        assert w is not None and verify_minor_witness(g, w, 3).ok

    def test_k3_none_on_forest(self):
        assert find_k3_witness(binary_tree_graph(4)) is None

    def test_k4_matches_oracle_randomized(self):
        rnd = random.Random(3)
        for _ in range(40):
            n = rnd.randrange(4, 10)
            pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
            m = rnd.randrange(3, len(pairs) + 1)
            g = Graph(n, rnd.sample(pairs, m))
            mine = find_k4_witness(g)
            oracle = brute_force_minor_detect(g, 4)
            assert (mine is None) == (oracle is None)
            if mine is not None:
                assert verify_minor_witness(g, mine, 4).ok

    def test_k4_on_large_grid(self):
        g = grid_graph(20)
        w = find_k4_witness(g)
        assert w is not None and verify_minor_witness(g, w, 4).ok

    def test_k4_none_on_series_parallel(self):
        # 2 x n grid is series-parallel
        n = 12
        edges = [(i, i + 1) for i in range(n - 1)]
        edges += [(n + i, n + i + 1) for i in range(n - 1)]
        edges += [(i, n + i) for i in range(n)]
        assert find_k4_witness(Graph(2 * n, edges)) is None


class TestApproxLargestMinor:
    def test_tree_gives_two(self):
        res = approx_largest_clique_minor(binary_tree_graph(5), 0.5, seed=0)
        assert res.h_found == 2

    def test_k8_gives_eight(self):
        g = Graph(8, [(i, j) for i in range(8) for j in range(i + 1, 8)])
        res = approx_largest_clique_minor(g, 0.5, seed=0)
        assert res.h_found == 8
        assert verify_minor_witness(g, res.witness, 8).ok

    def test_grid16_gives_four(self):
        g = grid_graph(16)
        res = approx_largest_clique_minor(g, 0.5, seed=0)
        # grids are planar: K4 present, K5 impossible
        assert res.h_found == 4
        assert verify_minor_witness(g, res.witness, 4).ok

    def test_monotone_under_edge_addition(self):
        # nested edge sets: h_found never decreases
        rnd = random.Random(7)
        n = 12
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        rnd.shuffle(pairs)
        last = 1
        for m in (11, 20, 35, 50, 66):
            g = Graph(n, pairs[:m])
            res = approx_largest_clique_minor(g, 0.5, seed=1)
            assert res.h_found >= last
            last = res.h_found
            assert verify_minor_witness(g, res.witness).ok

    def test_blowup_finds_planted_or_better(self):
        g = kh_blowup_graph(5, 40, seed=4)
        res = approx_largest_clique_minor(g, 0.5, seed=0)
        assert res.h_found >= 5
        assert verify_minor_witness(g, res.witness).ok

    def test_edgeless(self):
        res = approx_largest_clique_minor(Graph(3, []), 0.5, seed=0)
        assert res.h_found == 1

    def test_ratio_claim_recorded(self):
        res = approx_largest_clique_minor(path_graph(50), 0.5, seed=0)
        assert "value" in res.ratio_claim and res.ratio_claim["value"] > 0
