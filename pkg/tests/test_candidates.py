import numpy as np
import pytest

from stableclust.candidates import (candidate_table, identify_candidates, mutual_candidates,
                                    mutual_states, reduce_candidates)
from stableclust.graph import parse_network
from stableclust.quality import modularity_gain

from conftest import random_network


def naive_candidates(net, eps=1e-9):
    """Max-gain neighbor sets by direct pairwise evaluation."""
    out = []
    for i in range(net.n):
        gains = {j: modularity_gain(net, i, j) for j in net.neighbors(i).tolist()}
        if not gains:
            out.append((-1.0, ()))
            continue
        best = max(gains.values())
        if best < -eps:
            out.append((-1.0, ()))
            continue
        out.append((best, tuple(sorted(j for j, g in gains.items() if g >= best - eps))))
    return out


def test_path_gains():
    # a - b weight 2, b - c weight 1
    net = parse_network("0 1 2\n1 2 1\n")
    states = identify_candidates(net)
    assert [s.gmax for s in states] == pytest.approx([1 / 3, 1 / 3, 1 / 6], abs=1e-12)
    assert [s.ccs for s in states] == [(1,), (0,), (1,)]
    red = reduce_candidates(states)
    assert [s.ccs for s in red] == [(1,), (0,), ()]
    assert [s.propagated for s in red] == [False, False, True]


def test_matches_naive(rng):
    for _ in range(200):
        net = random_network(rng)
        states = identify_candidates(net)
        for st, (g, ccs) in zip(states, naive_candidates(net)):
            assert st.ccs == ccs
            assert st.gmax == pytest.approx(g, abs=1e-12)


def test_negative_gains_give_no_candidates():
    # a star with heavy self-loops: every merge loses modularity
    net = parse_network("0 0 50\n1 1 50\n0 1 1\n")
    st = identify_candidates(net)
    assert st[0].gmax == -1 and st[0].ccs == ()
    assert all(s.propagated for s in mutual_states(net))


def test_ties_kept():
    # center of a symmetric star has every leaf as candidate
    net = parse_network("0 1\n0 2\n0 3\n")
    st = identify_candidates(net)
    assert st[0].ccs == (1, 2, 3)


def test_reduction_order_independent(rng):
    for _ in range(50):
        net = random_network(rng)
        states = identify_candidates(net)
        fwd = reduce_candidates(states)
        order = rng.permutation(net.n).tolist()
        by_order = {i: mutual_candidates(states, i) for i in order}
        assert [by_order[i] for i in range(net.n)] == fwd


def test_mutual_states_match_reduction(rng):
    for _ in range(50):
        net = random_network(rng)
        assert mutual_states(net) == reduce_candidates(identify_candidates(net))


def test_mutual_symmetric(rng):
    for _ in range(100):
        net = random_network(rng)
        red = mutual_states(net)
        for i, s in enumerate(red):
            for j in s.ccs:
                assert i in red[j].ccs


def test_mmg_exists(rng):
    # the globally largest pair gain is mutual for both endpoints
    hits = 0
    for _ in range(200):
        net = random_network(rng)
        tab = candidate_table(net)
        if not tab.candidate.any():
            continue
        hits += 1
        assert tab.mutual.any()
    assert hits > 100


def test_table_arrays_line_up(rng):
    net = random_network(rng)
    tab = candidate_table(net)
    assert len(tab.gain) == len(net.indices)
    assert np.array_equal(tab.mutual, tab.mutual[net.reverse_arc])
