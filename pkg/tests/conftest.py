import numpy as np
import pytest

from stableclust.graph import canonicalize, parse_network

HUB = """\
10 10 10
20 20 10
30 30 10
9 9 9
10 9 12
20 9 12
30 9 12
"""

TWO_TRIANGLES = "0 1\n1 2\n0 2\n2 3\n3 4\n4 5\n3 5\n"


@pytest.fixture
def hub():
    return parse_network(HUB)


@pytest.fixture
def two_triangles():
    return parse_network(TWO_TRIANGLES)


def random_network(rng, n_max=12, p=None, weighted=True, loops=True):
    """Small random undirected network with at least one link."""
    n = int(rng.integers(2, n_max + 1))
    p = rng.uniform(0.2, 0.9) if p is None else p
    arcs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                arcs.append((i, j, float(rng.integers(1, 5)) if weighted else 1.0))
        if loops and rng.random() < 0.2:
            arcs.append((i, i, float(rng.integers(1, 4))))
    if not any(a != b for a, b, _ in arcs):
        arcs.append((0, 1, 1.0))
    # isolated labels drop out; keep a dense id range
    return canonicalize(arcs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
