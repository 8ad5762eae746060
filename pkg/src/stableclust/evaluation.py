"""Accuracy scoring, perturbation/stability protocol, fixtures and the brute-force oracle."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import Network, parse_network, serialize_shuffled
from .hierarchy import cluster
from .quality import Clustering

#: Removal fractions of the stability protocol: 1%, then +2% up to 15%.
PROTOCOL_FRACTIONS = tuple(round(0.01 + 0.02 * k, 2) for k in range(8))

ORACLE_MAX_NODES = 10


@dataclass(frozen=True)
class AccuracyReport:
    f1a: float
    f1h: float
    candidate_f1: float  # mean best-match F1 of candidate clusters
    truth_f1: float  # mean best-match F1 of truth clusters


def _best_match(src: Sequence[frozenset], dst: Sequence[frozenset]) -> np.ndarray:
    index: dict = {}
    for k, cl in enumerate(dst):
        for v in cl:
            index.setdefault(v, []).append(k)
    best = np.zeros(len(src))
    for x, cl in enumerate(src):
        common: dict[int, int] = {}
        for v in cl:
            for k in index.get(v, ()):
                common[k] = common.get(k, 0) + 1
        for k, c in common.items():
            f1 = 2.0 * c / (len(cl) + len(dst[k]))
            if f1 > best[x]:
                best[x] = f1
    return best


def f1_scores(candidate, truth) -> AccuracyReport:
    """Average (F1a) and harmonic (F1h) mean of the two directional
    best-match F1 averages.  Duplicate clusters are dropped first."""
    candidate = candidate if isinstance(candidate, Clustering) else Clustering(candidate)
    truth = truth if isinstance(truth, Clustering) else Clustering(truth)
    if not len(candidate) or not len(truth):
        raise ValueError("f1_scores needs two non-empty clusterings")
    p = float(_best_match(candidate.clusters, truth.clusters).mean())
    r = float(_best_match(truth.clusters, candidate.clusters).mean())
    f1h = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
    return AccuracyReport((p + r) / 2.0, f1h, p, r)


# -- perturbation --------------------------------------------------------------

class PerturbationError(RuntimeError):
    pass


def perturb(net: Network, fraction: float, seed: int, reference_links: int | None = None) -> Network:
    """Remove ``floor(fraction * reference_links)`` links chosen uniformly at random.

    ``reference_links`` defaults to the link count of ``net``; the stability
    protocol passes the original count so every step removes the same number
    of links.  A removal that would leave a node without links is rejected.
    Weights are never modified and no link is created.
    """
    if not 0 <= fraction < 1:
        raise ValueError(f"fraction must be in [0, 1), got {fraction}")
    m0 = net.link_count if reference_links is None else reference_links
    target = int(math.floor(fraction * m0 + 1e-9))
    if target == 0:
        return net
    upper = net.arc_sources < net.indices
    lo, hi, wt = net.arc_sources[upper], net.indices[upper], net.weights[upper]
    deg = net.structural_degree.astype(np.int64).copy()
    keep = np.ones(len(lo), dtype=bool)
    removed = 0
    rng = np.random.default_rng(seed)
    for e in rng.permutation(len(lo)).tolist():
        i, j = lo[e], hi[e]
        if deg[i] > 1 and deg[j] > 1:
            deg[i] -= 1
            deg[j] -= 1
            keep[e] = False
            removed += 1
            if removed == target:
                break
    if removed < target:
        raise PerturbationError(
            f"only {removed} of {target} links can be removed without isolating a node")
    return Network.from_links(net.labels, net.self_weight, lo[keep], hi[keep], wt[keep])


def middle_level(net: Network) -> Clustering | None:
    h = cluster(net)
    if not len(h):
        return None
    return h.clustering(h.middle)


@dataclass
class StageResult:
    stage: int
    fraction: float
    f1h: list[float]  # one value per shuffle
    runtime_ms: float
    levels: int

    @property
    def f1h_mean(self) -> float:
        return float(np.mean(self.f1h))

    @property
    def f1h_std(self) -> float:
        return float(np.std(self.f1h))


@dataclass
class PerturbationTrace:
    fractions: tuple[float, ...]
    stages: list[StageResult] = field(default_factory=list)

    def csv_rows(self) -> list[tuple]:
        return [(s.stage, s.fraction, s.f1h_mean, s.f1h_std, s.runtime_ms) for s in self.stages]

    def to_csv(self) -> str:
        lines = ["stage,fraction,f1h_mean,f1h_std,runtime_ms"]
        lines += [f"{s},{f:.2f},{m:.6f},{d:.6f},{t:.1f}" for s, f, m, d, t in self.csv_rows()]
        return "\n".join(lines) + "\n"


def run_stability_protocol(net: Network, shuffles: int = 4, seed: int = 0,
                           fractions: Sequence[float] = PROTOCOL_FRACTIONS) -> PerturbationTrace:
    """Cluster progressively perturbed copies of ``net`` and score each stage's
    middle level against the previous stage (the first against ``net`` itself).

    Links are removed cumulatively: the network of stage ``k`` reaches a total
    removal of ``fractions[k]`` of the original link count.  Every stage is
    clustered from ``shuffles`` reordered serializations; the spread of F1h
    across them measures input-order dependence.
    """
    m0 = net.link_count
    trace = PerturbationTrace(tuple(fractions))

    def middles(g: Network, stage: int):
        out = []
        for s in range(shuffles):
            text = serialize_shuffled(g, seed=seed * 1000 + stage * 100 + s)
            out.append(middle_level(parse_network(text)))
        return out

    previous = middles(net, 0)
    current = net
    done = 0.0
    for k, frac in enumerate(fractions, 1):
        step = frac - done
        current = perturb(current, step, seed=seed * 1000 + k, reference_links=m0)
        done = frac
        t0 = time.perf_counter()
        mids = middles(current, k)
        elapsed = (time.perf_counter() - t0) * 1000.0 / shuffles
        scores = []
        for prev, cur in zip(previous, mids):
            scores.append(f1_scores(cur, prev).f1h if prev and cur else 0.0)
        levels = len(cluster(current))
        trace.stages.append(StageResult(k, frac, scores, elapsed, levels))
        previous = mids
    return trace


# -- fixtures --------------------------------------------------------------------

def _sample_pairs(rng, total: int, count: int) -> np.ndarray:
    """``count`` distinct integers from ``range(total)``."""
    if count >= total:
        return np.arange(total, dtype=np.int64)
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < count:
        extra = rng.integers(0, total, size=(count - len(chosen)) * 2 + 8)
        chosen = np.unique(np.concatenate([chosen, extra]))
        if len(chosen) > count:
            chosen = rng.permutation(chosen)[:count]
            chosen.sort()
    return chosen


def _triangle_pair(idx: np.ndarray, size: int):
    # row-major enumeration of pairs (r, c), r < c < size
    idx = idx.astype(np.float64)
    r = np.floor((2 * size - 1 - np.sqrt((2 * size - 1) ** 2 - 8 * idx)) / 2).astype(np.int64)
    start = r * (2 * size - r - 1) // 2
    # guard the float root against off-by-one
    r = np.where(start > idx, r - 1, r)
    start = r * (2 * size - r - 1) // 2
    nxt = (r + 1) * (2 * size - r - 2) // 2
    r = np.where(idx >= nxt, r + 1, r)
    start = r * (2 * size - r - 1) // 2
    c = (idx - start).astype(np.int64) + r + 1
    return r, c


def planted_partition(n: int, communities: int, p_in: float, p_out: float, seed: int):
    """Random graph with ``communities`` equal blocks of consecutive labels.

    Each block is patched with links between its connected components so that
    every community is internally connected.  Returns ``(network, truth)``.
    """
    if not 0 <= p_out < p_in <= 1:
        raise ValueError("need 0 <= p_out < p_in <= 1")
    if communities < 1 or n % communities:
        raise ValueError("communities must divide n")
    size = n // communities
    rng = np.random.default_rng(seed)
    lo_parts, hi_parts = [], []
    for a in range(communities):
        for b in range(a, communities):
            if a == b:
                total, p = size * (size - 1) // 2, p_in
            else:
                total, p = size * size, p_out
            if total == 0 or p == 0:
                continue
            idx = _sample_pairs(rng, total, int(rng.binomial(total, p)))
            if a == b:
                r, c = _triangle_pair(idx, size)
            else:
                r, c = idx // size, idx % size
            lo_parts.append(a * size + r)
            hi_parts.append(b * size + c)
    lo = np.concatenate(lo_parts) if lo_parts else np.empty(0, dtype=np.int64)
    hi = np.concatenate(hi_parts) if hi_parts else np.empty(0, dtype=np.int64)

    block = np.arange(n) // size
    inside = block[lo] == block[hi]
    graph = coo_matrix((np.ones(int(inside.sum())), (lo[inside], hi[inside])), shape=(n, n))
    _, comp = connected_components(graph, directed=False)
    extra_lo, extra_hi = [], []
    for a in range(communities):
        nodes = np.arange(a * size, (a + 1) * size)
        heads = [int(nodes[comp[nodes] == c][0]) for c in np.unique(comp[nodes])]
        heads.sort()
        for u, v in zip(heads, heads[1:]):
            extra_lo.append(u)
            extra_hi.append(v)
    lo = np.concatenate([lo, np.asarray(extra_lo, dtype=np.int64)])
    hi = np.concatenate([hi, np.asarray(extra_hi, dtype=np.int64)])
    key = np.unique(np.minimum(lo, hi) * n + np.maximum(lo, hi))
    net = Network.from_links(np.arange(n), np.zeros(n), key // n, key % n, np.ones(len(key)))
    truth = Clustering(range(a * size, (a + 1) * size) for a in range(communities))
    return net, truth


def planted_by_degree(n: int, communities: int, avg_degree: float, mixing: float, seed: int):
    """Planted partition with expected degree ``avg_degree`` of which a
    ``mixing`` fraction points outside the node's community."""
    size = n // communities
    p_in = min(1.0, avg_degree * (1 - mixing) / max(size - 1, 1))
    p_out = avg_degree * mixing / max(n - size, 1)
    return planted_partition(n, communities, p_in, p_out, seed)


# -- brute-force oracle ----------------------------------------------------------

def _set_partitions(n: int):
    """Restricted growth strings of length ``n``."""
    labels = [0] * n

    def rec(k: int, used: int):
        if k == n:
            yield labels
            return
        for c in range(used + 1):
            labels[k] = c
            yield from rec(k + 1, max(used, c + 1))

    if n:
        yield from rec(1, 1)


def brute_force_best_partition(net: Network) -> tuple[Clustering, float]:
    """Exhaustively maximize modularity over all set partitions (``n <= 10``).

    Ties are resolved towards the lexicographically least partition, written
    as a sorted list of sorted dense-id tuples.
    """
    n = net.n
    if n > ORACLE_MAX_NODES:
        raise ValueError(f"brute force limited to {ORACLE_MAX_NODES} nodes, got {n}")
    w = net.total_weight
    a = np.zeros((n, n))
    for i in range(n):
        for j in net.neighbors(i).tolist():
            a[i, j] = net.link_weight(i, j)
    s = net.self_weight.tolist()
    d = net.degree.tolist()
    a = a.tolist()
    best_q = -math.inf
    best_key = None
    # Q * 2w = sum_C 2 * internal_C - degree_C**2 / (2w)
    for labels in _set_partitions(n):
        k = max(labels) + 1
        internal = [0.0] * k
        tot = [0.0] * k
        for i, c in enumerate(labels):
            internal[c] += s[i]
            tot[c] += d[i]
            row = a[i]
            for j in range(i):
                if labels[j] == c:
                    internal[c] += row[j]
        q = sum(2.0 * x - t * t / (2.0 * w) for x, t in zip(internal, tot)) / (2.0 * w)
        tol = 1e-12 * max(1.0, abs(q))
        if q > best_q + tol:
            best_q, best_key = q, _partition_key(labels, k)
        elif abs(q - best_q) <= tol:
            key = _partition_key(labels, k)
            if key < best_key:
                best_q, best_key = q, key
    return Clustering(best_key), best_q


def _partition_key(labels: Iterable[int], k: int) -> list[tuple[int, ...]]:
    groups: list[list[int]] = [[] for _ in range(k)]
    for i, c in enumerate(labels):
        groups[c].append(i)
    return sorted(tuple(g) for g in groups)


def read_clusters(path) -> Clustering:
    """Read a cluster file: one cluster per line, whitespace-separated labels."""
    clusters = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                clusters.append([int(tok) for tok in line.split()])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-integer node label") from None
    if not clusters:
        raise ValueError(f"{path}: no clusters")
    return Clustering(clusters)
