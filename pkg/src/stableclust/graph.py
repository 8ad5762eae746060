"""Immutable weighted network and the link-list text format.

Weights are stored as undirected link weights ``a_ij`` (each link once) plus a
self-weight ``s_i`` per node.  The derived quantities used by the clustering
code follow the accumulated-arc conventions:

* ``pair_weight(i, j) = 2 * a_ij`` for ``i != j`` (both arc directions),
  ``pair_weight(i, i) = s_i``;
* ``degree[i] = sum_j a_ij + 2 * s_i``;
* ``total_weight = sum_i degree[i] / 2``.
"""

from __future__ import annotations

import logging
import math
import os
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

log = logging.getLogger(__name__)

UNDIRECTED_EXTS = (".nsl", ".nse")
DIRECTED_EXTS = (".nsa",)

_HEADER = re.compile(r"nodes:\s*(\d+)", re.IGNORECASE)


class ParseError(ValueError):
    """Malformed link-list input; ``lineno`` is 1-based (0 when not line specific)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Network:
    """Canonical weighted network in CSR form.

    Node ``i`` (dense id) carries the external label ``labels[i]``; labels are
    strictly ascending.  Adjacency rows exclude self-loops and are sorted by
    neighbor id; every link is stored in both rows with the same weight.
    """

    labels: np.ndarray
    self_weight: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_links(cls, labels, self_weight, lo, hi, weight) -> "Network":
        """Build from unique undirected links ``lo < hi`` (dense ids)."""
        n = len(labels)
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        weight = np.asarray(weight, dtype=np.float64)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        wt = np.concatenate([weight, weight])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(
            _frozen(np.asarray(labels, dtype=np.int64).copy()),
            _frozen(np.asarray(self_weight, dtype=np.float64).copy()),
            _frozen(indptr),
            _frozen(dst[order]),
            _frozen(wt[order]),
        )

    # -- sizes -------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def link_count(self) -> int:
        """Number of undirected non-self links."""
        return len(self.indices) // 2

    @cached_property
    def structural_degree(self) -> np.ndarray:
        """Count of distinct non-self neighbors per node."""
        return _frozen(np.diff(self.indptr))

    # -- weights -----------------------------------------------------------
    @cached_property
    def arc_sources(self) -> np.ndarray:
        return _frozen(np.repeat(np.arange(self.n, dtype=np.int64), self.structural_degree))

    @cached_property
    def degree(self) -> np.ndarray:
        """Node weights ``w_i``: accumulated weight of all arcs of each node."""
        row = np.bincount(self.arc_sources, weights=self.weights, minlength=self.n)
        return _frozen(row + 2.0 * self.self_weight)

    @cached_property
    def total_weight(self) -> float:
        return float(self.degree.sum()) / 2.0

    @cached_property
    def reverse_arc(self) -> np.ndarray:
        """Index of the arc ``j -> i`` for every arc ``i -> j``."""
        # with a symmetric adjacency the k-th arc in (dst, src) order is the
        # reverse of the k-th arc in (src, dst) order
        return _frozen(np.lexsort((self.arc_sources, self.indices)))

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def link_weight(self, i: int, j: int) -> float:
        """Undirected link weight ``a_ij`` (0 when not adjacent); ``s_i`` for ``i == j``."""
        if i == j:
            return float(self.self_weight[i])
        lo, hi = self.indptr[i], self.indptr[i + 1]
        k = lo + int(np.searchsorted(self.indices[lo:hi], j))
        if k < hi and self.indices[k] == j:
            return float(self.weights[k])
        return 0.0

    def pair_weight(self, i: int, j: int) -> float:
        """``w_ij``: arcs between ``i`` and ``j`` accumulated in both directions."""
        if i == j:
            return float(self.self_weight[i])
        return 2.0 * self.link_weight(i, j)

    def index_of(self, label: int) -> int:
        k = int(np.searchsorted(self.labels, label))
        if k == self.n or self.labels[k] != label:
            raise KeyError(label)
        return k

    def links(self) -> Iterator[tuple[int, int, float]]:
        """Undirected links as ``(label, label, weight)``, self-loops included, canonical order."""
        bare = self.structural_degree == 0
        for i in range(self.n):
            if self.self_weight[i] > 0 or bare[i]:
                yield int(self.labels[i]), int(self.labels[i]), float(self.self_weight[i])
            lo, hi = self.indptr[i], self.indptr[i + 1]
            for j, a in zip(self.indices[lo:hi].tolist(), self.weights[lo:hi].tolist()):
                if j > i:
                    yield int(self.labels[i]), int(self.labels[j]), a

    # -- comparison --------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("labels", "self_weight", "indptr", "indices", "weights")
        )

    def __hash__(self):
        return hash((self.n, len(self.indices), self.labels.tobytes()))

    def __repr__(self) -> str:
        return f"Network(n={self.n}, links={self.link_count}, w={self.total_weight:g})"


def canonicalize(arcs, directed: bool = False) -> Network:
    """Build a canonical :class:`Network` from ``(src, dst, weight)`` label triples.

    Labels are remapped to dense ids by ascending value.  Duplicates are
    summed after sorting, so any permutation of the same arc multiset gives a
    bit-identical network.  A directed arc contributes half its weight to the
    undirected link (a reciprocal arc pair equals one undirected link); a
    self-loop contributes its full weight either way.

    A :class:`Network` is accepted as input and returned unchanged in value.
    """
    if isinstance(arcs, Network):
        arcs = list(arcs.links())
        directed = False
    arr = np.asarray(list(arcs) if not isinstance(arcs, np.ndarray) else arcs, dtype=object)
    if arr.size == 0:
        raise ParseError("empty network")
    src = np.asarray(arr[:, 0], dtype=np.int64)
    dst = np.asarray(arr[:, 1], dtype=np.int64)
    wt = np.asarray(arr[:, 2], dtype=np.float64)
    return _canonical(src, dst, wt, directed)


def _canonical(src: np.ndarray, dst: np.ndarray, wt: np.ndarray, directed: bool) -> Network:
    if (src < 0).any() or (dst < 0).any():
        raise ParseError("node labels must be non-negative")
    if (wt < 0).any() or not np.isfinite(wt).all():
        raise ParseError("weights must be finite and non-negative")
    labels = np.unique(np.concatenate([src, dst]))
    i = np.searchsorted(labels, src)
    j = np.searchsorted(labels, dst)
    n = len(labels)

    loop = i == j
    li, lw = i[loop], wt[loop]
    order = np.lexsort((lw, li))
    self_weight = np.bincount(li[order], weights=lw[order], minlength=n).astype(np.float64)

    i, j, w = i[~loop], j[~loop], wt[~loop]
    if directed:
        w = w / 2.0
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    order = np.lexsort((w, hi, lo))
    lo, hi, w = lo[order], hi[order], w[order]
    if len(lo):
        key = lo * n + hi
        first = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
        w = np.add.reduceat(w, first)
        lo, hi = lo[first], hi[first]
    return Network.from_links(labels, self_weight, lo, hi, w)


def iter_arcs(lines: Iterable[str], weighted: bool = True) -> Iterator[tuple[int, int, float]]:
    """Yield ``(src, dst, weight)`` from link-list lines, raising :class:`ParseError`."""
    declared = None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.search(line)
            if m and declared is None:
                declared = int(m.group(1))
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'src dst [weight]', got {len(parts)} tokens", lineno)
        try:
            src, dst = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node label in {line!r}", lineno) from None
        if src < 0 or dst < 0:
            raise ParseError("node labels must be non-negative", lineno)
        weight = 1.0
        if len(parts) == 3:
            try:
                value = float(parts[2])
            except ValueError:
                raise ParseError(f"non-numeric weight {parts[2]!r}", lineno) from None
            if value < 0 or not math.isfinite(value):
                raise ParseError(f"invalid weight {parts[2]!r}", lineno)
            if weighted:
                weight = value
        yield src, dst, weight
    if declared is not None:
        log.debug("header declares %d nodes", declared)


def parse_network(text, directed: bool = False, weighted: bool = True) -> Network:
    """Parse link-list text (a string or an iterable of lines).

    Each non-comment line is ``src dst [weight]`` with non-negative integer
    labels; the weight defaults to 1 and is ignored when ``weighted`` is false.
    Lines starting with ``#`` are comments.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    triples = list(iter_arcs(lines, weighted))
    if not triples:
        raise ParseError("empty network")
    arr = np.array(triples, dtype=np.float64)
    src = np.array([t[0] for t in triples], dtype=np.int64)
    dst = np.array([t[1] for t in triples], dtype=np.int64)
    return _canonical(src, dst, arr[:, 2], directed)


def read_network(path, directed: bool | None = None, weighted: bool = True) -> Network:
    """Read a link-list file; directedness defaults from the extension (``.nsa`` directed)."""
    if directed is None:
        directed = os.path.splitext(str(path))[1].lower() in DIRECTED_EXTS
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh, directed=directed, weighted=weighted)


def format_weight(w: float) -> str:
    return repr(float(w))


def serialize(net: Network) -> str:
    """Undirected link list in canonical order."""
    out = [f"# Nodes: {net.n} Links: {net.link_count}"]
    out.extend(f"{a} {b} {format_weight(w)}" for a, b, w in net.links())
    return "\n".join(out) + "\n"


def serialize_shuffled(net: Network, seed: int) -> str:
    """Undirected link list with links and link endpoints in a seeded random order.

    Every link (and self-loop) is written exactly once with its original
    labels, so parsing the output as undirected input reproduces ``net``.
    """
    rng = np.random.default_rng(seed)
    links = list(net.links())
    order = rng.permutation(len(links))
    flip = rng.random(len(links)) < 0.5
    out = [f"# Nodes: {net.n} Links: {net.link_count}"]
    for k, swap in zip(order.tolist(), flip.tolist()):
        a, b, w = links[k]
        if swap:
            a, b = b, a
        out.append(f"{a} {b} {format_weight(w)}")
    return "\n".join(out) + "\n"
