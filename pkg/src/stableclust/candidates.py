"""Clustering candidates: maximal-gain neighbors reduced to mutual pairs."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .graph import Network
from .quality import EPS_GAIN


@dataclass(frozen=True)
class CandidateState:
    """Per-node candidate record.

    ``gmax`` is the maximal non-negative modularity gain towards a neighbor,
    or -1 when every neighbor gain is negative; ``ccs`` lists the neighbors
    attaining it in ascending id order.
    """

    gmax: float
    ccs: tuple[int, ...]
    propagated: bool = False


@dataclass(frozen=True)
class CandidateTable:
    """Arc-level candidate data of one network (arcs in CSR order)."""

    gain: np.ndarray  # raw arc gains 2 a - di dj / w
    scale: np.ndarray  # magnitude of the gain terms
    gmax: np.ndarray  # per node, raw; -inf when no non-negative gain
    candidate: np.ndarray  # bool per arc, before mutual reduction
    mutual: np.ndarray  # bool per arc, after mutual reduction

    def normalized_gmax(self, w: float) -> np.ndarray:
        out = np.full(len(self.gmax), -1.0)
        ok = np.isfinite(self.gmax)
        out[ok] = self.gmax[ok] / (2.0 * w)
        return out


def candidate_table(net: Network) -> CandidateTable:
    w = net.total_weight
    d = net.degree
    src, dst = net.arc_sources, net.indices
    expected = d[src] * d[dst] / w
    gain = 2.0 * net.weights - expected
    scale = 2.0 * net.weights + expected

    n = net.n
    gmax = np.full(n, -np.inf)
    rowscale = np.zeros(n)
    rows = np.flatnonzero(net.structural_degree)
    if len(rows):
        starts = net.indptr[rows]
        gmax[rows] = np.maximum.reduceat(gain, starts)
        rowscale[rows] = np.maximum.reduceat(scale, starts)
    tol = EPS_GAIN * rowscale
    # ties within tolerance of the row maximum are all kept; the maximum
    # itself must be non-negative
    valid = gmax >= -tol
    gmax[~valid] = -np.inf
    candidate = valid[src] & (gain >= gmax[src] - tol[src])
    mutual = candidate & candidate[net.reverse_arc]
    return CandidateTable(gain, scale, gmax, candidate, mutual)


def _states(net: Network, table: CandidateTable, mask: np.ndarray, reduced: bool) -> list[CandidateState]:
    gmax = table.normalized_gmax(net.total_weight)
    out = []
    for i in range(net.n):
        lo, hi = net.indptr[i], net.indptr[i + 1]
        ccs = tuple(net.indices[lo:hi][mask[lo:hi]].tolist())
        propagated = reduced and (gmax[i] < 0 or not ccs)
        out.append(CandidateState(float(gmax[i]), ccs, propagated))
    return out


def identify_candidates(net: Network) -> list[CandidateState]:
    """Maximal-gain neighbor sets for every node, before mutual reduction."""
    table = candidate_table(net)
    return _states(net, table, table.candidate, reduced=False)


def mutual_candidates(states, i: int) -> CandidateState:
    """Reduce ``states[i].ccs`` to candidates that also list ``i``.

    Reads only the unreduced ``states`` snapshot, so reducing nodes in any
    order gives the same result.
    """
    st = states[i]
    ccs = tuple(j for j in st.ccs if i in states[j].ccs)
    return replace(st, ccs=ccs, propagated=st.gmax < 0 or not ccs)


def reduce_candidates(states) -> list[CandidateState]:
    return [mutual_candidates(states, i) for i in range(len(states))]


def mutual_states(net: Network) -> list[CandidateState]:
    """Mutual-reduced candidate states of every node."""
    table = candidate_table(net)
    return _states(net, table, table.mutual, reduced=True)
