"""Agglomerative construction of the overlapping cluster hierarchy.

Each iteration identifies mutual maximal-gain candidates, forms clusters from
them (splitting overlapping nodes into fragments where that pays off), and
coarsens the network so that clusters and carried-over nodes become the
nodes of the next iteration.  Every decision of an iteration reads only the
immutable candidate snapshot; merges are then applied as unions, so the
outcome does not depend on the order in which nodes are visited.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .candidates import CandidateState, candidate_table
from .decomposition import _max_intersect, od_accept
from .graph import Network
from .quality import (Clustering, _each_gain_raw, _group_gain_raw, gain_greater,
                      gain_nonnegative, node_modularity)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cluster:
    """A cluster formed in one iteration.

    ``members`` are node ids of the iteration's input network; ``shares`` is
    the fraction of each member's weight held here (below 1 for a fragment
    of a split node).  ``nodes`` are the bottom-level node ids it expands to.
    """

    index: int  # node id in the next-level network
    members: tuple[int, ...]
    shares: tuple[Fraction, ...]
    self_weight: float
    nodes: tuple[int, ...]

    @property
    def id(self) -> int:
        return self.nodes[0]


@dataclass(frozen=True, eq=False)
class Level:
    clusters: tuple[Cluster, ...]
    propagated: tuple[int, ...]  # input node ids carried over unclustered
    network: Network  # next-level network: clusters and propagated nodes
    exp_ptr: np.ndarray  # bottom-level expansion of every next-level node (CSR)
    exp_idx: np.ndarray

    def expansion(self, v: int) -> np.ndarray:
        return self.exp_idx[self.exp_ptr[v]:self.exp_ptr[v + 1]]

    @cached_property
    def modularity(self) -> float:
        """Modularity of this level; overlaps are evaluated on the decomposed
        network, which is what the next-level network encodes."""
        return node_modularity(self.network)


# -- one iteration ---------------------------------------------------------------

def _mutual_ccs(net: Network, mask: np.ndarray) -> list[list[int]]:
    counts = np.bincount(net.arc_sources[mask], minlength=net.n)
    parts = np.split(net.indices[mask], np.cumsum(counts)[:-1])
    return [p.tolist() for p in parts]


def _decide(net: Network, ccs: list[list[int]], allow_split: bool):
    """Per-node formation decisions, all taken against the same snapshot.

    Returns ``(merges, splits)``: ``merges`` pairs a node with the candidates
    it is grouped with, ``splits`` lists nodes decomposed into one fragment
    per candidate.  Nodes in neither are left to propagate unless another
    node groups with them.
    """
    sdeg = net.structural_degree
    sets: dict[int, frozenset] = {}

    def ccs_of(c):
        s = sets.get(c)
        if s is None:
            s = sets[c] = frozenset(ccs[c])
        return s

    merges: list[tuple[int, Sequence[int]]] = []
    splits: list[int] = []
    for i in range(net.n):
        c = ccs[i]
        if not c:
            continue
        if len(c) == 1:
            merges.append((i, c))
            continue
        together = None
        if allow_split and od_accept(int(sdeg[i]), len(c)):
            together = _group_gain_raw(net, sorted([i, *c]))
            each = _each_gain_raw(net, i, c)
            if gain_greater(each[0], together[0], each[1] + together[1]):
                splits.append(i)
                continue
        dense = _max_intersect(c, ccs_of)
        if dense:
            merges.append((i, dense))
            continue
        if together is None:
            together = _group_gain_raw(net, sorted([i, *c]))
        if gain_nonnegative(*together):
            merges.append((i, c))
    return merges, splits


def _elements(n: int, ccs: list[list[int]], splits: list[int]):
    parts = np.ones(n, dtype=np.int64)
    for i in splits:
        parts[i] = len(ccs[i])
    offset = np.zeros(n, dtype=np.int64)
    np.cumsum(parts[:-1], out=offset[1:])
    return parts, offset


def _group_order(n: int, parts: np.ndarray, comp: np.ndarray, ncomp: int) -> np.ndarray:
    """Canonical next-level ids: components sorted by their member node tuples,
    then by their first element."""
    node_of = np.repeat(np.arange(n, dtype=np.int64), parts)
    pairs = np.unique(comp * n + node_of)
    pc, pn = pairs // n, pairs % n
    bounds = np.searchsorted(pc, np.arange(ncomp + 1))
    members = [tuple(pn[bounds[k]:bounds[k + 1]].tolist()) for k in range(ncomp)]
    first = np.full(ncomp, len(comp), dtype=np.int64)
    np.minimum.at(first, comp, np.arange(len(comp)))
    order = sorted(range(ncomp), key=lambda k: (members[k], int(first[k])))
    rank = np.empty(ncomp, dtype=np.int64)
    rank[order] = np.arange(ncomp)
    return rank[comp]


def _form(net: Network, ccs: list[list[int]], allow_split: bool = True):
    """Decide and apply merges; returns ``(parts, group, ngroups)`` per element."""
    n = net.n
    merges, splits = _decide(net, ccs, allow_split)
    parts, offset = _elements(n, ccs, splits)
    slot = {i: {c: k for k, c in enumerate(ccs[i])} for i in splits}

    def elem(j, partner):
        # a split node meets each candidate through that candidate's fragment
        return offset[j] + slot[j][partner] if j in slot else offset[j]

    a: list[int] = []
    b: list[int] = []
    for i, targets in merges:
        for j in targets:
            a.append(offset[i])
            b.append(elem(j, i))
    for i in splits:
        for k, c in enumerate(ccs[i]):
            a.append(offset[i] + k)
            b.append(elem(c, i))
    nelem = int(parts.sum())
    graph = coo_matrix((np.ones(len(a)), (np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))),
                       shape=(nelem, nelem))
    ncomp, comp = connected_components(graph, directed=False)
    group = _group_order(n, parts, comp.astype(np.int64), ncomp)
    if splits and ncomp >= n:
        # fragments must not grow the number of nodes; retry without splitting
        log.debug("overlap decomposition would not shrink %d nodes; disabled", n)
        return _form(net, ccs, allow_split=False)
    return parts, group, ncomp


def _coarsen(net: Network, parts: np.ndarray, group: np.ndarray, ngroups: int) -> Network:
    """Aggregate element-level weights into the next-level network.

    Fragments of a node split into ``K`` parts carry ``s / K**2`` self-weight,
    ``2 s / K**2`` per fragment pair and ``a_ij / K`` of each link.
    """
    n = net.n
    offset = np.zeros(n, dtype=np.int64)
    np.cumsum(parts[:-1], out=offset[1:])
    whole = parts == 1
    src, dst, wt = net.arc_sources, net.indices, net.weights
    upper = src < dst
    src, dst, wt = src[upper], dst[upper], wt[upper]
    plain = whole[src] & whole[dst]

    g1 = [group[offset[src[plain]]]]
    g2 = [group[offset[dst[plain]]]]
    lw = [wt[plain]]
    sg = [group[offset[whole]]]
    sw = [net.self_weight[whole]]

    x1: list[int] = []
    x2: list[int] = []
    xw: list[float] = []
    for i, j, a in zip(src[~plain].tolist(), dst[~plain].tolist(), wt[~plain].tolist()):
        ki, kj = int(parts[i]), int(parts[j])
        share = a / (ki * kj)
        for k in range(ki):
            for t in range(kj):
                x1.append(group[offset[i] + k])
                x2.append(group[offset[j] + t])
                xw.append(share)
    ys: list[int] = []
    yw: list[float] = []
    for i in np.flatnonzero(~whole).tolist():
        k = int(parts[i])
        own = net.self_weight[i] / (k * k)
        gs = group[offset[i]:offset[i] + k].tolist()
        for p in range(k):
            ys.append(gs[p])
            yw.append(own)
            for q in range(p + 1, k):
                x1.append(gs[p])
                x2.append(gs[q])
                xw.append(2.0 * own)
    g1.append(np.asarray(x1, dtype=np.int64))
    g2.append(np.asarray(x2, dtype=np.int64))
    lw.append(np.asarray(xw, dtype=np.float64))
    sg.append(np.asarray(ys, dtype=np.int64))
    sw.append(np.asarray(yw, dtype=np.float64))

    g1, g2, lw = np.concatenate(g1), np.concatenate(g2), np.concatenate(lw)
    same = g1 == g2
    self_weight = np.bincount(np.concatenate([*sg, g1[same]]),
                              weights=np.concatenate([*sw, lw[same]]), minlength=ngroups)
    g1, g2, lw = g1[~same], g2[~same], lw[~same]
    lo, hi = np.minimum(g1, g2), np.maximum(g1, g2)
    key = lo * ngroups + hi
    order = np.argsort(key, kind="stable")
    key, lw = key[order], lw[order]
    if len(key):
        first = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
        lw = np.add.reduceat(lw, first)
        key = key[first]
    return Network.from_links(np.arange(ngroups), self_weight, key // ngroups, key % ngroups, lw)


def _expand(n: int, parts, group, ngroups, exp_ptr, exp_idx, nbottom: int):
    node_of = np.repeat(np.arange(n, dtype=np.int64), parts)
    pairs = np.unique(group * n + node_of)
    pg, pn = pairs // n, pairs % n
    lens = exp_ptr[pn + 1] - exp_ptr[pn]
    total = int(lens.sum())
    starts = np.repeat(exp_ptr[pn] - np.concatenate([[0], np.cumsum(lens)[:-1]]), lens)
    bottom = exp_idx[starts + np.arange(total)]
    keys = np.unique(np.repeat(pg, lens) * nbottom + bottom)
    rows = keys // nbottom
    ptr = np.searchsorted(rows, np.arange(ngroups + 1))
    return ptr, keys % nbottom


def _build_clusters(n, parts, group, ngroups, coarse: Network, exp_ptr, exp_idx):
    node_of = np.repeat(np.arange(n, dtype=np.int64), parts)
    size = np.bincount(group, minlength=ngroups)
    order = np.lexsort((node_of, group))
    bounds = np.searchsorted(group[order], np.arange(ngroups + 1))
    clusters = []
    propagated = []
    for g in range(ngroups):
        elems = node_of[order[bounds[g]:bounds[g + 1]]].tolist()
        if size[g] == 1:
            propagated.append(elems[0])
            continue
        members = sorted(set(elems))
        shares = tuple(Fraction(elems.count(v), int(parts[v])) for v in members)
        clusters.append(Cluster(g, tuple(members), shares, float(coarse.self_weight[g]),
                                tuple(exp_idx[exp_ptr[g]:exp_ptr[g + 1]].tolist())))
    return tuple(clusters), tuple(sorted(propagated))


# -- public operations -----------------------------------------------------------

def _ccs_from(net: Network, states) -> list[list[int]]:
    if states is None:
        return _mutual_ccs(net, candidate_table(net).mutual)
    return [[] if st.propagated else list(st.ccs) for st in states]


def form_clusters(net: Network, states: Sequence[CandidateState] | None = None) -> list[Cluster]:
    """Clusters formed from mutual-reduced candidate ``states`` (computed when omitted).

    ``Cluster.index`` is the cluster's node id in the next-level network and
    ``Cluster.nodes`` refers to ``net``'s own node ids.
    """
    n = net.n
    parts, group, ngroups = _form(net, _ccs_from(net, states))
    coarse = _coarsen(net, parts, group, ngroups)
    ptr, idx = _expand(n, parts, group, ngroups, np.arange(n + 1), np.arange(n), n)
    clusters, _ = _build_clusters(n, parts, group, ngroups, coarse, ptr, idx)
    return list(clusters)


def coarsen(net: Network, clusters: Sequence[Cluster], propagated: Sequence[int]) -> Network:
    """Next-level network with ``clusters`` followed by ``propagated`` nodes as nodes.

    Every node of ``net`` must be covered: whole by one cluster or propagated
    entry, or by cluster shares summing to one.
    """
    n = net.n
    held: dict[int, list[tuple[int, Fraction]]] = {}
    for g, cl in enumerate(clusters):
        for v, share in zip(cl.members, cl.shares):
            held.setdefault(v, []).append((g, Fraction(share)))
    for k, v in enumerate(propagated):
        held.setdefault(v, []).append((len(clusters) + k, Fraction(1)))
    parts = np.ones(n, dtype=np.int64)
    group: list[int] = []
    for v in range(n):
        entries = held.get(v)
        if not entries:
            raise ValueError(f"node {v} is neither clustered nor propagated")
        if sum(s for _, s in entries) != 1:
            raise ValueError(f"shares of node {v} do not sum to one")
        k = max(s.denominator for _, s in entries)
        parts[v] = k
        for g, s in entries:
            group.extend([g] * int(s * k))
    ngroups = len(clusters) + len(propagated)
    return _coarsen(net, parts, np.asarray(group, dtype=np.int64), ngroups)


@dataclass(frozen=True, eq=False)
class Hierarchy:
    """Levels bottom first; level ``k`` is the outcome of iteration ``k``."""

    network: Network
    levels: tuple[Level, ...]

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def labels(self) -> np.ndarray:
        return self.network.labels

    def _labels_of(self, nodes) -> tuple[int, ...]:
        return tuple(self.labels[np.asarray(nodes, dtype=np.int64)].tolist())

    def cover(self, level: int) -> list[tuple[int, ...]]:
        """Complete cover of ``level``: every next-level node as a tuple of
        bottom-level labels (clusters and carried-over nodes alike)."""
        lv = self.levels[level]
        return [self._labels_of(lv.expansion(v)) for v in range(lv.network.n)]

    def clusters(self, level: int) -> list[tuple[int, ...]]:
        """Clusters formed at ``level`` as tuples of bottom-level labels."""
        return [self._labels_of(cl.nodes) for cl in self.levels[level].clusters]

    def clustering(self, level: int) -> Clustering:
        return Clustering(self.cover(level))

    def modularity(self, level: int) -> float:
        return self.levels[level].modularity

    @property
    def middle(self) -> int:
        return len(self.levels) // 2

    def signature(self) -> tuple:
        return tuple(tuple(sorted(self.cover(k))) for k in range(len(self.levels)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hierarchy):
            return NotImplemented
        return self.signature() == other.signature()

    __hash__ = None


def cluster(net: Network) -> Hierarchy:
    """Build the full hierarchy; stops at the first iteration forming no cluster."""
    levels = []
    nbottom = net.n
    exp_ptr, exp_idx = np.arange(nbottom + 1), np.arange(nbottom)
    current = net
    if net.total_weight <= 0:
        return Hierarchy(net, ())
    while True:
        n = current.n
        ccs = _ccs_from(current, None)
        parts, group, ngroups = _form(current, ccs)
        if ngroups == int(parts.sum()):
            break  # no element was grouped with another
        coarse = _coarsen(current, parts, group, ngroups)
        exp_ptr, exp_idx = _expand(n, parts, group, ngroups, exp_ptr, exp_idx, nbottom)
        clusters, propagated = _build_clusters(n, parts, group, ngroups, coarse, exp_ptr, exp_idx)
        levels.append(Level(clusters, propagated, coarse, exp_ptr, exp_idx))
        log.debug("level %d: %d -> %d nodes, %d clusters", len(levels), n, ngroups, len(clusters))
        current = coarse
    return Hierarchy(net, tuple(levels))


def level_lines(h: Hierarchy, level: int) -> list[str]:
    """Lines of one level file; the top level lists its complete cover."""
    top = level == len(h.levels) - 1
    groups = h.cover(level) if top else h.clusters(level)
    return [" ".join(map(str, g)) for g in sorted(tuple(sorted(g)) for g in groups)]


def write_hierarchy(h: Hierarchy, outdir) -> list[str]:
    """Write ``level<k>.cnl`` per level (k from 1) plus ``manifest.txt``; returns paths."""
    paths = []
    try:
        os.makedirs(outdir, exist_ok=True)
        names = []
        for k in range(len(h.levels)):
            name = f"level{k + 1}.cnl"
            lines = level_lines(h, k)
            path = os.path.join(outdir, name)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(f"# Clusters: {len(lines)}\n")
                fh.writelines(line + "\n" for line in lines)
            names.append(name)
            paths.append(path)
        manifest = os.path.join(outdir, "manifest.txt")
        with open(manifest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# Levels: {len(names)} (bottom first)\n")
            fh.writelines(name + "\n" for name in names)
        paths.append(manifest)
    except OSError as exc:
        raise OSError(f"cannot write hierarchy to {outdir}: {exc}") from exc
    return paths
