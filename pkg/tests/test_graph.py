import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stableclust.graph import (Network, ParseError, canonicalize, parse_network, read_network,
                               serialize, serialize_shuffled)

from conftest import HUB, random_network


def test_parse_hub(hub):
    assert hub.n == 4
    assert hub.labels.tolist() == [9, 10, 20, 30]
    assert hub.self_weight.tolist() == [9, 10, 10, 10]
    assert hub.link_count == 3
    assert hub.link_weight(0, 1) == 12
    assert hub.pair_weight(0, 1) == 24
    assert hub.pair_weight(0, 0) == 9
    # w_i = sum of links + 2 * self-weight
    assert hub.degree.tolist() == [36 + 18, 12 + 20, 32, 32]
    assert hub.total_weight == pytest.approx(hub.degree.sum() / 2)


def test_unweighted_default_and_flag():
    net = parse_network("0 1\n1 2 5\n")
    assert net.link_weight(1, 2) == 5
    assert parse_network("0 1\n1 2 5\n", weighted=False).link_weight(1, 2) == 1


def test_duplicates_sum_and_single_link():
    net = parse_network("0 1 1\n1 0 2\n")
    assert net.link_count == 1
    assert net.link_weight(0, 1) == 3
    assert net.total_weight == 3


def test_directed_reciprocal_pair_equals_undirected_link():
    d = parse_network("0 1 1\n1 0 1\n", directed=True)
    u = parse_network("0 1 1\n")
    assert d == u


def test_directed_self_loop_keeps_weight():
    d = parse_network("0 0 3\n0 1 2\n", directed=True)
    assert d.self_weight[0] == 3
    assert d.link_weight(0, 1) == 1


def test_comments_and_header():
    net = parse_network("# Nodes: 3 Links: 2\n\n0 1\n# c\n1 2\n")
    assert net.n == 3 and net.link_count == 2


@pytest.mark.parametrize("text, lineno", [
    ("0 1\n0\n", 2),
    ("0 x\n", 1),
    ("0 1 -1\n", 1),
    ("0 1 nan\n", 1),
    ("-1 2\n", 1),
    ("0 1 2 3\n", 1),
])
def test_parse_errors(text, lineno):
    with pytest.raises(ParseError) as err:
        parse_network(text)
    assert err.value.lineno == lineno


def test_empty_network():
    with pytest.raises(ParseError):
        parse_network("# nothing\n")


def test_read_network_extension(tmp_path):
    p = tmp_path / "a.nsa"
    p.write_text("0 1 2\n")
    assert read_network(p).link_weight(0, 1) == 1
    q = tmp_path / "a.nse"
    q.write_text("0 1 2\n")
    assert read_network(q).link_weight(0, 1) == 2


def test_isolated_self_loop_node_survives_roundtrip():
    net = parse_network("0 0 1\n1 2\n")
    again = parse_network(serialize(net))
    assert again == net


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(0, 2**31 - 1))
def test_permutation_invariance(seed, perm_seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    shuffled = parse_network(serialize_shuffled(net, perm_seed))
    assert shuffled == net
    arcs = list(net.links())
    order = np.random.default_rng(perm_seed).permutation(len(arcs))
    assert canonicalize([arcs[k] for k in order]) == net


def test_canonicalize_idempotent(rng):
    for _ in range(20):
        net = random_network(rng)
        assert canonicalize(net) == net
        assert parse_network(serialize(net)) == net


def test_degree_sum_is_twice_total_weight(rng):
    for _ in range(50):
        net = random_network(rng)
        assert net.degree.sum() == pytest.approx(2 * net.total_weight, abs=1e-12)


def test_reverse_arc(rng):
    net = random_network(rng)
    rev = net.reverse_arc
    assert np.array_equal(net.arc_sources[rev], net.indices)
    assert np.array_equal(net.indices[rev], net.arc_sources)
    assert np.array_equal(net.weights[rev], net.weights)


def test_index_of(hub):
    assert hub.index_of(20) == 2
    with pytest.raises(KeyError):
        hub.index_of(11)


def test_network_is_immutable(hub):
    with pytest.raises(ValueError):
        hub.weights[0] = 1.0
