import math

import numpy as np
import pytest

from conftest import random_mixing_graph
from phylomst import (
    GeoBounds,
    GeoError,
    GeoGraph,
    cutoff_time,
    derive_bounds,
    mixing_lambda,
    neg_log_sup_rw,
    rw_stationary,
    sup_rw_additive,
    sup_rw_multiplicative,
)
from phylomst.exact_oracle import brute_force_sup_rw, brute_force_sup_rw_matrix


def triangle():
    return GeoGraph.from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def k4():
    return GeoGraph.from_edges([(u, v, 1.0) for u in range(4) for v in range(u + 1, 4)])


class TestGraphAndStationary:
    def test_path_stationary(self):
        G = GeoGraph.from_edges([(0, 1, 1.0), (1, 2, 1.0)])
        assert np.allclose(rw_stationary(G), [0.25, 0.5, 0.25])

    def test_triangle_stationary(self):
        assert np.allclose(rw_stationary(triangle()), [1 / 3] * 3)

    def test_duplicate_edges_summed(self):
        G = GeoGraph.from_edges([(0, 1, 1.0), (0, 1, 2.0), (1, 2, 3.0)])
        assert G.W[0, 1] == 3.0

    def test_disconnected_rejected(self):
        with pytest.raises(GeoError):
            GeoGraph.from_edges([(0, 1, 1.0), (2, 3, 1.0)])

    def test_self_loop_degree_convention(self):
        G = GeoGraph.from_edges([(0, 1, 1.0), (0, 0, 1.0)])
        # loop weight 1 contributes 2 to node 0's degree
        assert np.allclose(rw_stationary(G), [0.75, 0.25])


class TestMixing:
    def test_triangle_lambda(self):
        assert mixing_lambda(triangle()).lam == pytest.approx(0.5, abs=1e-12)

    def test_k4_lambda(self):
        assert mixing_lambda(k4()).lam == pytest.approx(1 / 3, abs=1e-12)

    def test_bipartite_rejected(self):
        with pytest.raises(GeoError):
            mixing_lambda(GeoGraph.from_edges([(0, 1, 1.0)]))
        with pytest.raises(GeoError):
            mixing_lambda(GeoGraph.from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]))

    def test_walk_reversibility(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            G = random_mixing_graph(rng, 8)
            pi = rw_stationary(G)
            P = G.transition()
            flow = pi[:, None] * P
            assert np.abs(flow - flow.T).max() < 1e-12

    def test_convergence_bound(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            G = random_mixing_graph(rng, int(rng.integers(3, 10)))
            spec = mixing_lambda(G)
            P = G.transition()
            M = np.eye(G.num_nodes)
            for t in range(1, 40):
                M = M @ P
                bound = spec.ratio_sqrt * spec.lam**t + 1e-9
                assert np.abs(M - spec.pi[None, :]).max() <= bound


class TestCutoff:
    def test_worked_example(self):
        spec = mixing_lambda(triangle())
        # R = 1, pi(b) = 1/3, eps1 = 1/3: need 0.5^t <= 1/9 -> t = 4
        assert cutoff_time(spec, 1 / 3, 0) == 4

    def test_fast_mixing_hits_floor(self):
        # loops of weight 1/2 make every row of the walk uniform: lambda = 0
        G = GeoGraph.from_edges(
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)] + [(v, v, 0.5) for v in range(3)]
        )
        spec = mixing_lambda(G)
        assert spec.lam == pytest.approx(0.0, abs=1e-12)
        assert cutoff_time(spec, 0.9, 0) == 1

    def test_halving_eps_bounded_increase(self):
        spec = mixing_lambda(triangle())
        step = math.ceil(1 / math.log2(1 / spec.lam))
        for eps in (0.5, 0.1, 0.02):
            t1 = cutoff_time(spec, eps, 1)
            t2 = cutoff_time(spec, eps / 2, 1)
            assert t1 <= t2 <= t1 + step


class TestEstimators:
    def test_e1_triangle(self):
        G = triangle()
        assert sup_rw_additive(G, 0, 1, 0.01) == pytest.approx(0.5, abs=1e-9)
        # P^1(x,x) = 0, supremum attained at t = 2
        assert sup_rw_additive(G, 0, 0, 0.01) == pytest.approx(0.5, abs=1e-9)

    def test_e1_huge_eps_uses_single_step(self):
        G = triangle()
        pi = rw_stationary(G)
        P = G.transition()
        assert sup_rw_additive(G, 0, 1, 100.0) == pytest.approx(max(P[0, 1], pi[1]))

    def test_e1_additive_guarantee_random_graphs(self):
        rng = np.random.default_rng(2)
        for _ in range(8):
            G = random_mixing_graph(rng, int(rng.integers(3, 12)))
            spec = mixing_lambda(G)
            eps1 = 0.05
            tmax = 10 * max(cutoff_time(spec, eps1, b) for b in range(G.num_nodes))
            zeta = brute_force_sup_rw_matrix(G, tmax)
            for x in range(G.num_nodes):
                for y in range(G.num_nodes):
                    e1 = sup_rw_additive(G, x, y, eps1, spec)
                    assert abs(e1 - zeta[x, y]) <= eps1 + 1e-9

    def test_e2_triangle(self):
        G = triangle()
        e2 = sup_rw_multiplicative(G, 0, 1, 0.1)
        assert 0.45 <= e2 <= 0.55

    def test_e2_k4(self):
        e2 = sup_rw_multiplicative(k4(), 0, 1, 0.1)
        assert abs(e2 - 1 / 3) <= 0.1 / 3 + 1e-12

    def test_e3_triangle(self):
        G = triangle()
        bounds = derive_bounds(G)
        e3 = neg_log_sup_rw(G, 0, 1, 0.05, bounds)
        assert 0.95 * math.log(2) <= e3 <= 1.05 * math.log(2)
        e3_same = neg_log_sup_rw(G, 0, 0, 0.05, bounds)
        assert 0.95 * math.log(2) <= e3_same <= 1.05 * math.log(2)

    def test_e3_rejects_large_eps3(self):
        G = triangle()
        bounds = derive_bounds(G)
        with pytest.raises(GeoError):
            neg_log_sup_rw(G, 0, 1, -math.log(bounds.upper) + 0.1, bounds)

    def test_e3_detects_bound_violation(self):
        G = triangle()
        # claim upper bound far below the true supremum 0.5
        bad = GeoBounds(lower=0.01, upper=0.15)
        with pytest.raises(GeoError):
            neg_log_sup_rw(G, 0, 1, 0.5, bad)

    def test_estimator_reversibility(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            G = random_mixing_graph(rng, 7)
            spec = mixing_lambda(G)
            pi = spec.pi
            for x in range(7):
                for y in range(x + 1, 7):
                    fwd = sup_rw_additive(G, x, y, 1e-6, spec)
                    bwd = sup_rw_additive(G, y, x, 1e-6, spec)
                    assert pi[x] * fwd == pytest.approx(pi[y] * bwd, abs=1e-9)


class TestBounds:
    def test_triangle_bounds(self):
        b = derive_bounds(triangle())
        assert b.lower == pytest.approx(1 / 3)
        assert 0.5 < b.upper < 0.6

    def test_k4_bounds(self):
        b = derive_bounds(k4())
        assert b.lower == pytest.approx(0.25)
        assert 1 / 3 < b.upper < 0.4

    def test_regular_graph_lower_is_uniform(self):
        G = GeoGraph.from_edges(
            [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 0, 1.0)]
        )
        assert derive_bounds(G).lower == pytest.approx(1 / 5)

    def test_bounds_bracket_true_suprema(self):
        rng = np.random.default_rng(4)
        for _ in range(8):
            G = random_mixing_graph(rng, int(rng.integers(3, 10)))
            b = derive_bounds(G)
            zeta = brute_force_sup_rw_matrix(G, 400)
            # suprema of exactly 1 (degree-1 nodes) can only be clamped
            assert min(zeta.max(), 1.0 - 1e-6) <= b.upper + 1e-12
            assert zeta.min() >= b.lower - 1e-12


class TestBruteForce:
    def test_triangle(self):
        assert brute_force_sup_rw(triangle(), 0, 1, 100) == pytest.approx(0.5)

    def test_k4(self):
        assert brute_force_sup_rw(k4(), 0, 1, 100) == pytest.approx(1 / 3)

    def test_star_with_loop_matches_e1(self):
        edges = [(0, v, 1.0) for v in range(1, 5)] + [(0, 0, 1.0)]
        G = GeoGraph.from_edges(edges)
        eps1 = 0.02
        e1 = sup_rw_additive(G, 0, 1, eps1)
        bf = brute_force_sup_rw(G, 0, 1, 500)
        assert abs(e1 - bf) <= eps1 + 1e-12

    def test_matrix_agrees_with_scalar(self):
        G = triangle()
        M = brute_force_sup_rw_matrix(G, 50)
        for x in range(3):
            for y in range(3):
                assert M[x, y] == pytest.approx(brute_force_sup_rw(G, x, y, 50))
