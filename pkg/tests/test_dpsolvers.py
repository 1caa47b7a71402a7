import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import connected_graphs, cycle, path, random_connected, star, triangle
from hwy1.dpsolvers import (
    Infeasible,
    SteinerSolution,
    TourSolution,
    WidthBudgetExceeded,
    euler_circuit,
    steiner_2approx,
    steiner_exact_td,
    tsp_2approx,
    tsp_exact_td,
)
from hwy1.graph import Graph
from hwy1.oracles import dreyfus_wagner_steiner, held_karp_tsp
from hwy1.structure import build_hierarchy
from hwy1.treedecomp import TreeDecomposition, build_decomposition, heuristic_decomposition


def level_td(g, cert):
    return build_decomposition(build_hierarchy(g, cert), cert)


class TestSteinerExact:
    def test_single_terminal(self):
        g = path(3, 3)
        sol = steiner_exact_td(g, [1], heuristic_decomposition(g))
        assert sol.cost == 0 and sol.edges == ()

    def test_path(self):
        g = path(3, 3)
        sol = steiner_exact_td(g, [0, 2], heuristic_decomposition(g))
        assert sol.cost == 6
        sol.check(g, [0, 2])

    def test_unreachable_terminal(self):
        g = Graph(3, ((0, 1, 1),))
        with pytest.raises(Infeasible):
            steiner_exact_td(g, [0, 2], heuristic_decomposition(g))

    def test_width_budget(self):
        g = cycle(6)
        td = TreeDecomposition((frozenset(range(6)),), (-1,))
        with pytest.raises(WidthBudgetExceeded):
            steiner_exact_td(g, [0, 3], td, max_bag=3)

    @given(connected_graphs(min_n=2, max_n=14), st.data())
    @settings(max_examples=50, deadline=None)
    def test_matches_dreyfus_wagner(self, g, data):
        k = data.draw(st.integers(1, min(6, g.n)))
        R = data.draw(st.lists(st.integers(0, g.n - 1), min_size=k, max_size=k, unique=True))
        sol = steiner_exact_td(g, R, heuristic_decomposition(g))
        sol.check(g, R)
        assert sol.cost == dreyfus_wagner_steiner(g, R).cost

    def test_corpus_level_decomposition(self, small_corpus):
        rng = random.Random(5)
        for _, g, cert in small_corpus:
            R = rng.sample(range(g.n), min(g.n, rng.randint(2, 6)))
            sol = steiner_exact_td(g, R, level_td(g, cert))
            sol.check(g, R)
            assert sol.cost == dreyfus_wagner_steiner(g, R).cost


class TestTspExact:
    def test_triangle(self):
        g = triangle(3, 3, 3)
        sol = tsp_exact_td(g, heuristic_decomposition(g))
        assert sol.cost == 9
        sol.check(g)

    def test_star_three_spokes(self):
        g = star(3, 3)
        sol = tsp_exact_td(g, heuristic_decomposition(g))
        assert sol.cost == 18 == held_karp_tsp(g).cost
        sol.check(g)

    def test_degenerate_sizes(self):
        one = Graph(1, ())
        assert tsp_exact_td(one, heuristic_decomposition(one)).cost == 0
        two = Graph(2, ((0, 1, 5),))
        sol = tsp_exact_td(two, heuristic_decomposition(two))
        assert sol.cost == 10 and sol.walk in ((0, 1, 0), (1, 0, 1))

    @given(connected_graphs(min_n=3, max_n=10))
    @settings(max_examples=40, deadline=None)
    def test_matches_held_karp(self, g):
        sol = tsp_exact_td(g, heuristic_decomposition(g))
        sol.check(g)
        assert sol.cost == held_karp_tsp(g).cost

    def test_random_12(self):
        for seed in range(3):
            g = random_connected(random.Random(seed), 12, 0.15)
            assert tsp_exact_td(g, heuristic_decomposition(g)).cost == held_karp_tsp(g).cost

    def test_corpus_level_decomposition(self, small_corpus):
        for _, g, cert in small_corpus:
            sol = tsp_exact_td(g, level_td(g, cert))
            sol.check(g)
            assert sol.cost == held_karp_tsp(g).cost


class TestApproximations:
    def test_two_terminals_exact(self):
        g = random_connected(random.Random(2), 9, 0.3)
        sol, c = steiner_2approx(g, [0, 8])
        assert c == dreyfus_wagner_steiner(g, [0, 8]).cost

    def test_four_cycle_all_terminals(self):
        g = cycle(4)
        sol, c = steiner_2approx(g, range(4))
        sol.check(g, range(4))
        assert c <= 2 * dreyfus_wagner_steiner(g, range(4)).cost

    def test_triangle_tour_optimal(self):
        g = triangle(3, 3, 3)
        sol, c = tsp_2approx(g)
        assert c == 9
        sol.check(g)

    def test_star_tour_doubles_spokes(self):
        g = star(4, 3)
        sol, c = tsp_2approx(g)
        assert c == 24 == held_karp_tsp(g).cost

    def test_corpus_ratios(self, small_corpus):
        rng = random.Random(1)
        for _, g, _ in small_corpus:
            R = rng.sample(range(g.n), min(g.n, 5))
            sol, c = steiner_2approx(g, R)
            sol.check(g, R)
            assert c <= 2 * dreyfus_wagner_steiner(g, R).cost
            tour, c = tsp_2approx(g)
            tour.check(g)
            opt = held_karp_tsp(g).cost
            assert opt <= c <= 2 * opt


class TestSolutionChecks:
    def test_tree_check_catches_cycle(self):
        g = triangle(1, 1, 1)
        with pytest.raises(AssertionError):
            SteinerSolution(((0, 1), (1, 2), (0, 2)), 3).check(g, [0, 2])

    def test_tree_check_catches_wrong_cost(self):
        with pytest.raises(AssertionError):
            SteinerSolution(((0, 1),), 7).check(path(3), [0, 1])

    def test_tour_check_catches_missed_vertex(self):
        with pytest.raises(AssertionError):
            TourSolution((0, 1, 0), 6).check(path(3, 3))

    def test_euler_circuit(self):
        walk = euler_circuit(3, {(0, 1): 2, (1, 2): 2})
        assert walk[0] == walk[-1] == 0 and len(walk) == 5
