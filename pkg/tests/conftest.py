import random

import pytest

from uptail.graphs import Graph


def random_graph(rng, max_n, min_n=2, p=None):
    n = rng.randint(min_n, max_n)
    density = p if p is not None else rng.uniform(0.2, 0.9)
    edges = {(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < density}
    return Graph(n, frozenset(edges))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
