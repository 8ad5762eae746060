"""Runtime and memory scaling of the clustering on sparse planted-partition networks."""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import psutil

from .evaluation import planted_by_degree
from .hierarchy import Hierarchy, cluster

COMMUNITY_SIZE = 100
MIXING = 0.275


@dataclass(frozen=True)
class ScalingRow:
    nodes: int
    links: int
    time_ms: float
    peak_mem_mb: float
    levels: int


class _PeakRSS:
    """Samples the resident set size in a background thread."""

    def __init__(self, interval: float = 0.05):
        self.interval = interval
        self.proc = psutil.Process()
        self.peak = self.proc.memory_info().rss
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True)

    def _run(self):
        while not self._stop.wait(self.interval):
            self.peak = max(self.peak, self.proc.memory_info().rss)

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._stop.set()
        self._thread.join()
        self.peak = max(self.peak, self.proc.memory_info().rss)


def pin_single_core() -> None:
    if hasattr(os, "sched_setaffinity"):
        cpus = sorted(os.sched_getaffinity(0))
        os.sched_setaffinity(0, {cpus[0]})


def timed_cluster(net) -> tuple[Hierarchy, float, float]:
    """Cluster ``net``; returns the hierarchy, wall time (ms) and peak RSS (MB)."""
    with _PeakRSS() as mem:
        t0 = time.perf_counter()
        h = cluster(net)
        elapsed = (time.perf_counter() - t0) * 1000.0
    return h, elapsed, mem.peak / 2**20


def scaling_run(sizes: Sequence[tuple[int, float]], seed: int = 0,
                community_size: int = COMMUNITY_SIZE) -> list[ScalingRow]:
    """Time the clustering for each ``(nodes, avg_degree)`` fixture."""
    rows = []
    for n, avg in sizes:
        k = max(1, n // community_size)
        net, _ = planted_by_degree(k * (n // k), k, avg, MIXING, seed)
        h, ms, mb = timed_cluster(net)
        rows.append(ScalingRow(net.n, net.link_count, ms, mb, len(h)))
    return rows


def sizes_for_links(links: Sequence[int], avg_degree: float = 10.0) -> list[tuple[int, float]]:
    return [(int(round(2 * m / avg_degree)), avg_degree) for m in links]


def loglog_slope(rows: Sequence[ScalingRow]) -> float:
    x = np.log([r.links for r in rows])
    y = np.log([r.time_ms for r in rows])
    return float(np.polyfit(x, y, 1)[0])


def to_csv(rows: Sequence[ScalingRow]) -> str:
    lines = ["m,nodes,time_ms,peak_mem_mb"]
    lines += [f"{r.links},{r.nodes},{r.time_ms:.1f},{r.peak_mem_mb:.1f}" for r in rows]
    return "\n".join(lines) + "\n"
