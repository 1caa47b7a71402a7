import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import cnf, connected_graphs, cycle, random_connected, star, triangle
from hwy1.dpsolvers import SteinerSolution, TourSolution
from hwy1.graph import Graph, all_pairs, aspect_ratio
from hwy1.oracles import (
    GeneratorParams,
    OracleCapExceeded,
    certificate_digest,
    dreyfus_wagner_steiner,
    exact_highway_dimension,
    exact_tsp,
    gen_corpus,
    gen_hd1_instance,
    held_karp_tsp,
    milp_tsp,
    sat_bruteforce,
)
from hwy1.spcover import Hd1Certificate, verify_hd1


def check_tour(g, tour):
    TourSolution(tuple(tour.walk), tour.cost).check(g)


class TestHeldKarp:
    def test_triangle(self):
        assert held_karp_tsp(triangle(3, 3, 3)).cost == 9

    def test_four_cycle(self):
        t = held_karp_tsp(cycle(4))
        assert t.cost == 12
        check_tour(cycle(4), t)

    def test_cap(self):
        g = random_connected(random.Random(0), 19, 0.1)
        with pytest.raises(OracleCapExceeded):
            held_karp_tsp(g)

    def test_cap_override(self, monkeypatch):
        monkeypatch.setenv("HWY1_MAX_ORACLE_N", "3")
        with pytest.raises(OracleCapExceeded):
            held_karp_tsp(cycle(4))

    def test_huge_weights(self):
        big = 10**25
        g = Graph(3, ((0, 1, big), (1, 2, big), (0, 2, big + 1)))
        assert held_karp_tsp(g).cost == 3 * big + 1

    @given(connected_graphs(min_n=3, max_n=9))
    @settings(max_examples=25, deadline=None)
    def test_milp_agrees(self, g):
        a, b = held_karp_tsp(g), milp_tsp(g)
        assert a.cost == b.cost
        check_tour(g, a)
        check_tour(g, b)

    def test_exact_tsp_switches_to_milp(self, monkeypatch):
        g = random_connected(random.Random(4), 8, 0.3)
        expect = held_karp_tsp(g).cost
        monkeypatch.setenv("HWY1_MAX_ORACLE_N", "5")
        assert exact_tsp(g).cost == expect


class TestDreyfusWagner:
    def test_two_terminals_shortest_path(self):
        g = random_connected(random.Random(7), 10, 0.3)
        assert dreyfus_wagner_steiner(g, [2, 9]).cost == all_pairs(g).dist[2][9]

    def test_tree_is_valid(self):
        g = random_connected(random.Random(8), 12, 0.3)
        R = [0, 3, 5, 11]
        t = dreyfus_wagner_steiner(g, R)
        SteinerSolution(tuple(t.edges), t.cost).check(g, R)

    def test_stp_gadgets(self):
        from hwy1.reductions import gen_stp

        for text, check in (("p cnf 1 1\n1 0\n", lambda c: c == 133), ("p cnf 1 2\n1 0\n-1 0\n", lambda c: c > 1464)):
            g = gen_stp(cnf(text)).graph
            assert check(dreyfus_wagner_steiner(g, g.terminals).cost)

    def test_cap(self):
        g = random_connected(random.Random(0), 14, 0.2)
        with pytest.raises(OracleCapExceeded):
            dreyfus_wagner_steiner(g, range(13))


class TestExactHighwayDimension:
    def test_star(self):
        assert exact_highway_dimension(star(4, 3)) == 1

    def test_four_cycle(self):
        assert exact_highway_dimension(cycle(4)) >= 2

    def test_exceeds(self):
        # complete graph with unit weights: all edges are covered pairs at r = 1/2
        k6 = Graph(6, tuple((u, v, 1) for u in range(6) for v in range(u + 1, 6)))
        assert exact_highway_dimension(k6, 2) is None

    def test_cap(self):
        with pytest.raises(OracleCapExceeded):
            exact_highway_dimension(cycle(13))


class TestGenerator:
    def test_depth_one_is_star(self):
        g, cert = gen_hd1_instance(GeneratorParams(seed=1, depth=1, branching=5, cliques=False))
        assert g.n == 6 and all(0 in e[:2] or 5 in e[:2] for e in g.edges)
        assert isinstance(cert, Hd1Certificate)

    def test_depth_two_seed_42(self):
        g, cert = gen_hd1_instance(GeneratorParams(seed=42, depth=2, branching=3))
        assert isinstance(verify_hd1(g), Hd1Certificate)
        assert aspect_ratio(all_pairs(g)) >= 1

    def test_aggressive_params_exhaust(self):
        with pytest.raises(RuntimeError):
            gen_hd1_instance(GeneratorParams(seed=0, depth=3, branching=6, max_n=5), retries=3)

    def test_corpus_deterministic(self):
        a, ma = gen_corpus(6, 7, 20)
        b, mb = gen_corpus(6, 7, 20)
        assert ma == mb and [g for _, g, _ in a] == [g for _, g, _ in b]
        for (_, g, cert), entry in zip(a, ma):
            assert entry["n"] == g.n <= 20
            assert entry["certificate"] == certificate_digest(cert)
            assert Fraction(entry["alpha"]) == aspect_ratio(all_pairs(g))


class TestSat:
    def test_single(self):
        assert sat_bruteforce(cnf("p cnf 1 1\n1 0\n")) == (True, (True,))

    def test_contradiction(self):
        assert sat_bruteforce(cnf("p cnf 1 2\n1 0\n-1 0\n")) == (False, None)

    def test_model_satisfies(self):
        f = cnf("p cnf 4 4\n1 2 0\n-1 3 0\n-3 -4 0\n4 -2 0\n")
        sat, model = sat_bruteforce(f)
        assert sat and f.evaluate(model)
