from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stableclust.graph import parse_network
from stableclust.quality import (Clustering, gain_all, gain_each, modularity, modularity_gain,
                                 node_modularity)

from conftest import random_network


def q_bruteforce(net, groups):
    """Modularity from the pair-weight definition, O(n^2)."""
    w = net.total_weight
    d = net.degree
    label = {v: k for k, g in enumerate(groups) for v in g}
    q = 0.0
    for i in range(net.n):
        for j in range(net.n):
            if label[i] == label[j]:
                a = net.pair_weight(i, j) if i == j else net.link_weight(i, j)
                if i == j:
                    a = 2 * a
                q += a - d[i] * d[j] / (2 * w)
    return q / (2 * w)


def test_two_triangles_modularity(two_triangles):
    q = modularity(two_triangles, [[0, 1, 2], [3, 4, 5]])
    assert q == pytest.approx(5 / 14, abs=1e-12)


def test_all_in_one_is_zero(rng):
    for _ in range(20):
        net = random_network(rng)
        assert abs(modularity(net, [range(net.n)])) <= 1e-12


def test_singletons_match_node_modularity(rng):
    for _ in range(20):
        net = random_network(rng)
        q = modularity(net, [[v] for v in range(net.n)])
        assert q == pytest.approx(node_modularity(net), abs=1e-12)


def test_matches_definition(rng):
    for _ in range(30):
        net = random_network(rng)
        labels = rng.integers(0, 3, net.n)
        groups = [np.flatnonzero(labels == k).tolist() for k in range(3)]
        groups = [g for g in groups if g]
        assert modularity(net, groups) == pytest.approx(q_bruteforce(net, groups), abs=1e-12)


def test_modularity_rejects_overlap_and_gaps(two_triangles):
    with pytest.raises(ValueError, match="several"):
        modularity(two_triangles, [[0, 1, 2, 3], [3, 4, 5]])
    with pytest.raises(ValueError, match="incomplete"):
        modularity(two_triangles, [[0, 1, 2]])


def test_clustering_dedupes_and_rejects_empty():
    c = Clustering([[1, 2], [2, 1], [3]])
    assert len(c) == 2
    assert not c.is_overlapping()
    assert Clustering([[1, 2], [2, 3]]).is_overlapping()
    with pytest.raises(ValueError):
        Clustering([[1], []])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_gain_is_modularity_difference(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    i, j = rng.choice(net.n, 2, replace=False).tolist()
    merged = [[i, j]] + [[v] for v in range(net.n) if v not in (i, j)]
    expected = modularity(net, merged) - node_modularity(net)
    assert abs(modularity_gain(net, i, j) - expected) <= 1e-12


def test_gain_symmetric(rng):
    net = random_network(rng)
    assert modularity_gain(net, 0, 1) == modularity_gain(net, 1, 0)
    with pytest.raises(ValueError):
        modularity_gain(net, 0, 0)


def test_gain_all_matches_modularity(rng):
    for _ in range(30):
        net = random_network(rng)
        if net.n < 3:
            continue
        i, a, b = rng.choice(net.n, 3, replace=False).tolist()
        merged = [[i, a, b]] + [[v] for v in range(net.n) if v not in (i, a, b)]
        expected = modularity(net, merged) - node_modularity(net)
        assert gain_all(net, i, [a, b]) == pytest.approx(expected, abs=1e-12)


def test_gain_each_hub(hub):
    # node 9 split into 3 fragments, each merged with one candidate:
    # fragment degree 18, link 4 per candidate of degree 32, w = 75
    w = Fraction(75)
    g = 3 * (2 * 4 - Fraction(18 * 32) / w) / (2 * w)
    assert gain_each(hub, 0, [1, 2, 3]) == pytest.approx(float(g), abs=1e-12)
    assert gain_each(hub, 0, [1, 2, 3]) > gain_all(hub, 0, [1, 2, 3])


def test_gain_each_needs_two():
    net = parse_network("0 1\n")
    with pytest.raises(ValueError):
        gain_each(net, 0, [1])
