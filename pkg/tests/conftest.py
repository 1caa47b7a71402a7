import random

import pytest
from hypothesis import strategies as st

from hwy1.graph import Graph
from hwy1.oracles import gen_corpus
from hwy1.reductions import parse_dimacs


def star(leaves=4, w=3):
    return Graph(leaves + 1, tuple((0, i, w) for i in range(1, leaves + 1)))


def path(*weights):
    return Graph(len(weights) + 1, tuple((i, i + 1, w) for i, w in enumerate(weights)))


def cycle(n, w=3):
    return Graph(n, tuple((i, (i + 1) % n, w) for i in range(n)))


def triangle(a, b, c):
    return Graph(3, ((0, 1, a), (1, 2, b), (0, 2, c)))


def cnf(text):
    return parse_dimacs(text)


def random_connected(rng: random.Random, n: int, extra: float = 0.3, wmax: int = 9) -> Graph:
    """Random spanning tree plus extra edges, small integer weights."""
    edges = {}
    for v in range(1, n):
        u = rng.randrange(v)
        edges[(u, v)] = rng.randint(1, wmax)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra:
                edges[(u, v)] = rng.randint(1, wmax)
    return Graph(n, tuple((u, v, w) for (u, v), w in edges.items()))


@st.composite
def connected_graphs(draw, min_n=2, max_n=8, wmax=9):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    extra = draw(st.sampled_from((0.0, 0.2, 0.5)))
    return random_connected(random.Random(seed), n, extra, wmax)


@pytest.fixture(scope="session")
def corpus():
    items, manifest = gen_corpus(100, 0, 40)
    return items


@pytest.fixture(scope="session")
def small_corpus():
    items, _ = gen_corpus(20, 300, 10)
    return items
