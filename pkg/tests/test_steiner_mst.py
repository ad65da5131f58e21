import itertools
import math

import numpy as np
import pytest

from conftest import random_gtr, random_sequences
from phylomst import (
    JC69,
    CostMatrix,
    CostOracle,
    GeoCostModel,
    GeoGraph,
    ModelError,
    Sample,
    build_cost_matrix,
    kruskal_mst,
    root_tree,
    spider_quotient,
    tree_cost_directed,
    tree_cost_symmetric,
)

LN4 = math.log(4.0)


def toy_matrix(ids, weights):
    """CostMatrix with prescribed spanning weights and zero node costs."""
    k = len(ids)
    W = np.zeros((k, k))
    for (a, b), w in weights.items():
        i, j = ids.index(a), ids.index(b)
        W[i, j] = W[j, i] = w
    return CostMatrix(
        ids=ids,
        node_cost=np.zeros(k),
        phi=W.copy(),
        weight=W,
        t_star=np.zeros((k, k)),
        geo_cost=np.zeros((k, k)),
    )


class TestKruskal:
    def test_two_nodes(self):
        cm = toy_matrix(["a", "b"], {("a", "b"): 1.0})
        assert kruskal_mst(cm) == [("a", "b")]

    def test_path_metric(self):
        cm = toy_matrix(
            ["1", "2", "3"], {("1", "2"): 1.0, ("2", "3"): 1.0, ("1", "3"): 3.0}
        )
        assert sorted(kruskal_mst(cm)) == [("1", "2"), ("2", "3")]

    def test_tie_break_lexicographic(self):
        ids = ["a", "b", "c", "d"]
        weights = {pair: 1.0 for pair in itertools.combinations(ids, 2)}
        cm = toy_matrix(ids, weights)
        assert kruskal_mst(cm) == [("a", "b"), ("a", "c"), ("a", "d")]

    def test_negative_weights_fine(self):
        cm = toy_matrix(
            ["a", "b", "c"], {("a", "b"): -5.0, ("b", "c"): -1.0, ("a", "c"): 2.0}
        )
        assert sorted(kruskal_mst(cm)) == [("a", "b"), ("b", "c")]

    def test_optimal_among_all_spanning_trees(self):
        rng = np.random.default_rng(21)
        for k in (4, 5, 6, 7):
            ids = [f"n{i}" for i in range(k)]
            pairs = list(itertools.combinations(ids, 2))
            weights = {p: float(rng.normal()) for p in pairs}
            cm = toy_matrix(ids, weights)
            got = sum(weights[tuple(sorted(e))] for e in kruskal_mst(cm))
            best = min(
                (
                    sum(weights[p] for p in cand)
                    for cand in itertools.combinations(pairs, k - 1)
                    if _spans(ids, cand)
                ),
            )
            assert got == pytest.approx(best, abs=1e-12)


def _spans(ids, edges):
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merged = 0
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            merged += 1
    return merged == len(ids) - 1


class TestRooting:
    def test_children_of_middle_root(self):
        tree = root_tree(["1", "2", "3"], [("1", "2"), ("2", "3")], root="2")
        assert set(tree.edges) == {("2", "1"), ("2", "3")}

    def test_chain_from_end(self):
        tree = root_tree(["1", "2", "3"], [("1", "2"), ("2", "3")], root="1")
        assert tree.edges == (("1", "2"), ("2", "3"))

    def test_default_root_smallest_id(self):
        tree = root_tree(["b", "a", "c"], [("a", "b"), ("b", "c")])
        assert tree.root == "a"

    def test_rerooting_preserves_undirected_edges(self):
        edges = [("a", "b"), ("b", "c"), ("b", "d")]
        nodes = ["a", "b", "c", "d"]
        base = {frozenset(e) for e in root_tree(nodes, edges, root="a").edges}
        for r in nodes:
            got = {frozenset(e) for e in root_tree(nodes, edges, root=r).edges}
            assert got == base

    def test_unknown_root(self):
        with pytest.raises(ModelError):
            root_tree(["a", "b"], [("a", "b")], root="zz")

    def test_non_tree_rejected(self):
        with pytest.raises(ModelError):
            root_tree(["a", "b", "c"], [("a", "b")])


class TestTreeCost:
    def test_single_node(self):
        o = CostOracle(JC69(1.0))
        s = Sample("A", "ACGT")
        cm = CostMatrix(
            ids=["A"],
            node_cost=np.array([o.node_cost(s)]),
            phi=np.zeros((1, 1)),
            weight=np.zeros((1, 1)),
            t_star=np.zeros((1, 1)),
            geo_cost=np.zeros((1, 1)),
        )
        tree = root_tree(["A"], [])
        assert tree_cost_directed(tree, cm) == pytest.approx(4 * LN4)
        assert tree_cost_symmetric(tree, cm) == pytest.approx(4 * LN4)

    def test_two_node_value(self):
        o = CostOracle(JC69(1.0))
        cm = build_cost_matrix([Sample("A", "ACGT"), Sample("B", "ACGA")], o)
        tree = root_tree(cm.ids, [("A", "B")])
        assert tree_cost_directed(tree, cm) == pytest.approx(8.893130, abs=1e-6)
        assert tree_cost_symmetric(tree, cm) == pytest.approx(8.893130, abs=1e-6)

    def test_duplicate_leaves(self):
        o = CostOracle(JC69(1.0))
        cm = build_cost_matrix([Sample("A", "ACGT"), Sample("B", "ACGT")], o)
        tree = root_tree(cm.ids, [("A", "B")])
        assert tree_cost_directed(tree, cm) == pytest.approx(4 * LN4, abs=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_directed_equals_symmetric_random_trees(self, seed):
        rng = np.random.default_rng(seed)
        model = random_gtr(rng)
        o = CostOracle(model)
        seqs = random_sequences(rng, model, 6, 10)
        cm = build_cost_matrix([Sample(f"s{i}", s) for i, s in enumerate(seqs)], o)
        for _ in range(20):
            edges = _random_tree_edges(rng, cm.ids)
            root = cm.ids[int(rng.integers(0, len(cm.ids)))]
            tree = root_tree(cm.ids, edges, root=root)
            assert tree_cost_directed(tree, cm) == pytest.approx(
                tree_cost_symmetric(tree, cm), abs=1e-8
            )

    def test_root_invariance(self):
        rng = np.random.default_rng(31)
        model = JC69(1.0)
        o = CostOracle(model, geo=GeoCostModel(GeoGraph.from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])))
        seqs = random_sequences(rng, model, 5, 8)
        samples = [Sample(f"s{i}", s, int(rng.integers(0, 3))) for i, s in enumerate(seqs)]
        cm = build_cost_matrix(samples, o)
        edges = _random_tree_edges(rng, cm.ids)
        costs = [
            tree_cost_directed(root_tree(cm.ids, edges, root=r), cm) for r in cm.ids
        ]
        assert max(costs) - min(costs) < 1e-8


def _random_tree_edges(rng, ids):
    edges = []
    for i in range(1, len(ids)):
        j = int(rng.integers(0, i))
        edges.append((ids[j], ids[i]))
    return edges


def _bf_path(cm, src, dst, allowed):
    """Cheapest simple path via explicit permutation of interior nodes."""
    interior = [n for n in allowed if n not in (src, dst)]
    best = cm.sym_weight(src, dst)
    for r in range(1, len(interior) + 1):
        for perm in itertools.permutations(interior, r):
            hops = [src, *perm, dst]
            cost = sum(cm.sym_weight(a, b) for a, b in zip(hops, hops[1:]))
            cost += sum(cm.phi_node(n) for n in perm)
            best = min(best, cost)
    return best


def _bf_spider(center, terminals, cm):
    terms = sorted(set(terminals))
    allowed = set(terms) | {center}
    total = 0.0 if center in terms else cm.phi_node(center)
    for u in terms:
        if u != center:
            total += _bf_path(cm, center, u, allowed)
    return total / len(terms)


class TestSpiderQuotient:
    def _matrix(self, seed=41, k=6):
        rng = np.random.default_rng(seed)
        model = JC69(1.0)
        o = CostOracle(model)
        seqs = random_sequences(rng, model, k + 1, 8)
        samples = [Sample(f"s{i}", s) for i, s in enumerate(seqs)]
        return build_cost_matrix(samples, o)

    def test_two_terminals_is_half_path(self):
        cm = self._matrix()
        center, a, b = "s0", "s1", "s2"
        q = spider_quotient(center, [a, b], cm)
        allowed = {center, a, b}
        want = (cm.phi_node(center) + _bf_path(cm, center, a, allowed) + _bf_path(cm, center, b, allowed)) / 2
        assert q == pytest.approx(want, abs=1e-9)

    def test_matches_brute_force_over_subsets(self):
        cm = self._matrix(seed=42, k=5)
        ids = cm.ids
        for center in ids[:3]:
            others = [i for i in ids if i != center]
            for r in (2, 3, 4):
                for S in itertools.combinations(others, r):
                    got = spider_quotient(center, list(S), cm)
                    assert got == pytest.approx(_bf_spider(center, list(S), cm), abs=1e-9)

    def test_center_in_terminals_pays_no_node_cost(self):
        cm = self._matrix(seed=43, k=4)
        q_in = spider_quotient("s0", ["s0", "s1", "s2"], cm)
        assert q_in == pytest.approx(_bf_spider("s0", ["s0", "s1", "s2"], cm), abs=1e-9)

    def test_needs_two_terminals(self):
        cm = self._matrix()
        with pytest.raises(ModelError):
            spider_quotient("s0", ["s1"], cm)
