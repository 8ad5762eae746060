"""Modularity and modularity gain."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable

import numpy as np

from .decomposition import decompose
from .graph import Network

#: Relative tolerance for comparing gains.  Gains are compared in raw weight
#: units (``2w * dQ``) relative to the magnitude of their terms.
EPS_GAIN = 1e-9


@dataclass(frozen=True)
class Clustering:
    """Flat, possibly overlapping clusters without empty or duplicate members sets."""

    clusters: tuple[frozenset, ...]

    def __init__(self, clusters: Iterable[Iterable[Hashable]]):
        seen = set()
        out = []
        for cl in clusters:
            cl = frozenset(cl)
            if not cl:
                raise ValueError("empty cluster")
            if cl not in seen:
                seen.add(cl)
                out.append(cl)
        object.__setattr__(self, "clusters", tuple(out))

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    @cached_property
    def membership(self) -> dict:
        """node -> list of cluster indices"""
        index: dict = {}
        for k, cl in enumerate(self.clusters):
            for v in cl:
                index.setdefault(v, []).append(k)
        return index

    @property
    def nodes(self) -> set:
        return set(self.membership)

    def is_overlapping(self) -> bool:
        return any(len(ks) > 1 for ks in self.membership.values())


def gain_raw(link: float, di: float, dj: float, w: float) -> tuple[float, float]:
    """Unnormalized gain ``2 a - di dj / w`` and the magnitude of its terms."""
    expected = di * dj / w
    return 2.0 * link - expected, 2.0 * link + expected


def gain_greater(a: float, b: float, scale: float) -> bool:
    return a > b + EPS_GAIN * scale


def gain_nonnegative(a: float, scale: float) -> bool:
    return a >= -EPS_GAIN * scale


def modularity(net: Network, clustering) -> float:
    """Modularity of a complete, non-overlapping clustering of dense node ids."""
    if not isinstance(clustering, Clustering):
        clustering = Clustering(clustering)
    n = net.n
    label = np.full(n, -1, dtype=np.int64)
    for k, cl in enumerate(clustering):
        for v in cl:
            if not 0 <= v < n:
                raise ValueError(f"unknown node {v}")
            if label[v] >= 0:
                raise ValueError(
                    f"node {v} is in several clusters; evaluate overlaps on the "
                    "decomposed network (Hierarchy.modularity)")
            label[v] = k
    if (label < 0).any():
        raise ValueError(f"clustering is incomplete: {int((label < 0).sum())} nodes unassigned")
    return _modularity_of_labels(net, label, len(clustering))


def _modularity_of_labels(net: Network, label: np.ndarray, k: int) -> float:
    w = net.total_weight
    src, dst = net.arc_sources, net.indices
    same = label[src] == label[dst]
    # ordered pairs: each link contributes from both rows
    internal = np.bincount(label[src[same]], weights=net.weights[same], minlength=k).astype(np.float64)
    internal += 2.0 * np.bincount(label, weights=net.self_weight, minlength=k)
    tot = np.bincount(label, weights=net.degree, minlength=k)
    return float(np.sum(internal - tot * tot / (2.0 * w)) / (2.0 * w))


def node_modularity(net: Network) -> float:
    """Modularity with every node in its own cluster."""
    w = net.total_weight
    d = net.degree
    return float(np.sum(2.0 * net.self_weight - d * d / (2.0 * w)) / (2.0 * w))


def modularity_gain(net: Network, i: int, j: int) -> float:
    """Modularity change from merging singletons ``i`` and ``j``."""
    if i == j:
        raise ValueError("modularity gain needs two distinct nodes")
    w = net.total_weight
    raw, _ = gain_raw(net.link_weight(i, j), net.degree[i], net.degree[j], w)
    return float(raw / (2.0 * w))


def _group_gain_raw(net: Network, members: list[int]) -> tuple[float, float]:
    w = net.total_weight
    d = net.degree
    total = scale = 0.0
    for x, a in enumerate(members):
        for b in members[x + 1:]:
            g, s = gain_raw(net.link_weight(a, b), d[a], d[b], w)
            total += g
            scale += s
    return total, scale


def _each_gain_raw(net: Network, i: int, ccs: list[int]) -> tuple[float, float]:
    w = net.total_weight
    d = net.degree
    total = scale = 0.0
    for frag, c in zip(decompose(net, i, len(ccs)), ccs):
        g, s = gain_raw(frag.link_to(c), frag.degree, d[c], w)
        total += g
        scale += s
    return total, scale


def gain_all(net: Network, i: int, ccs) -> float:
    """Gain of grouping ``i`` with all of ``ccs`` into one cluster (from singletons)."""
    ccs = sorted(int(c) for c in ccs)
    if not ccs or i in ccs:
        raise ValueError("ccs must be non-empty and exclude the node itself")
    raw, _ = _group_gain_raw(net, sorted([i, *ccs]))
    return raw / (2.0 * net.total_weight)


def gain_each(net: Network, i: int, ccs) -> float:
    """Gain of splitting ``i`` into ``len(ccs)`` fragments, each grouped with
    one candidate (ascending candidate order)."""
    ccs = sorted(int(c) for c in ccs)
    if len(ccs) < 2:
        raise ValueError("gain_each needs at least 2 candidates")
    raw, _ = _each_gain_raw(net, i, ccs)
    return raw / (2.0 * net.total_weight)
