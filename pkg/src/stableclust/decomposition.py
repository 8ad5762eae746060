"""Overlap decomposition of a node into fragments.

A node with self-weight ``s`` shared by ``K`` clusters is replaced by ``K``
fully interconnected virtual fragments: each fragment keeps ``s / K**2`` as
its own weight, every fragment pair is linked with ``2 s / K**2`` and each
external link is split equally, ``a_ij / K`` per fragment.  Grouping all
fragments back together restores the original node exactly, so the split
itself never changes modularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph import Network


@dataclass(frozen=True)
class Fragment:
    origin: int
    index: int  # 1..parts
    parts: int
    weight: float
    inter_fragment_weight: float
    links: tuple[tuple[int, float], ...]

    @property
    def degree(self) -> float:
        """Accumulated arc weight of the fragment, ``w_i / K`` of its origin."""
        return (2 * self.weight + (self.parts - 1) * self.inter_fragment_weight
                + sum(w for _, w in self.links))

    def link_to(self, j: int) -> float:
        for t, w in self.links:
            if t == j:
                return w
        return 0.0


def split_weight(weight, parts: int):
    """Fragment self-weight and inter-fragment link weight for ``parts`` fragments.

    Works with any numeric type, so exact checks can use ``fractions.Fraction``.
    """
    if parts < 2:
        raise ValueError(f"need at least 2 fragments, got {parts}")
    own = weight / parts ** 2
    return own, 2 * own


def decompose(net: Network, i: int, parts: int) -> list[Fragment]:
    own, inter = split_weight(float(net.self_weight[i]), parts)
    lo, hi = net.indptr[i], net.indptr[i + 1]
    links = tuple((j, a / parts) for j, a in
                  zip(net.indices[lo:hi].tolist(), net.weights[lo:hi].tolist()))
    return [Fragment(i, k, parts, own, inter, links) for k in range(1, parts + 1)]


def candidate_link_weights(fragments: Sequence[Fragment], ccs: Sequence[int]) -> list[list[float]]:
    """Link weight from fragment ``k`` to the cluster seeded by candidate ``t``.

    Fragment ``k`` is paired with ``ccs[k]``.  Towards its own candidate only
    the split link share counts; towards another candidate the link to that
    candidate's fragment is added as well.
    """
    out = []
    for k, frag in enumerate(fragments):
        row = []
        for t, c in enumerate(ccs):
            w = frag.link_to(c)
            if t != k:
                w += frag.inter_fragment_weight
            row.append(w)
        out.append(row)
    return out


def od_accept(degree: int, parts: int) -> bool:
    """True when splitting a node of ``degree`` links into ``parts`` fragments
    does not increase the number of links around it.

    The fragments own ``parts * (degree - parts)`` shared links plus
    ``parts * (parts - 1) / 2`` inter-fragment links; their total must not
    exceed ``degree``.  Only (2, 2), (2, 3) and (3, 3) qualify.
    """
    if parts < 2 or parts > degree:
        return False
    return 2 * parts * (degree - parts) + parts * (parts - 1) <= 2 * degree


def _max_intersect(ccs: Sequence[int], ccs_of) -> tuple[int, ...]:
    own = set(ccs)
    sizes = [len(own.intersection(ccs_of(c))) for c in ccs]
    best = max(sizes)
    # a majority of the node's candidates must be shared (ceil(K / 2))
    if best == 0 or best < (len(ccs) + 1) // 2:
        return ()
    return tuple(c for c, size in zip(ccs, sizes) if size == best)


def max_intersect_orig(states, i: int) -> tuple[int, ...]:
    """Candidates of ``i`` sharing the most candidates with ``i``.

    ``states`` are mutual-reduced :class:`~stableclust.candidates.CandidateState`
    objects indexed by node.  Returns all candidates attaining the largest
    intersection, or ``()`` when that intersection covers less than half of
    ``states[i].ccs``.
    """
    ccs = states[i].ccs
    if len(ccs) < 2:
        raise ValueError("max_intersect_orig needs at least 2 candidates")
    return _max_intersect(ccs, lambda c: states[c].ccs)
