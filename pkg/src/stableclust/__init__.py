"""Deterministic agglomerative overlapping clustering of weighted networks."""

from .candidates import CandidateState, identify_candidates, mutual_candidates, reduce_candidates
from .decomposition import Fragment, decompose, max_intersect_orig, od_accept
from .evaluation import (AccuracyReport, brute_force_best_partition, f1_scores, perturb,
                         planted_partition, run_stability_protocol)
from .graph import Network, ParseError, canonicalize, parse_network, read_network, serialize_shuffled
from .hierarchy import Cluster, Hierarchy, Level, cluster, coarsen, form_clusters, write_hierarchy
from .quality import Clustering, gain_all, gain_each, modularity, modularity_gain

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport", "CandidateState", "Cluster", "Clustering", "Fragment", "Hierarchy", "Level",
    "Network", "ParseError", "brute_force_best_partition", "canonicalize", "cluster", "coarsen",
    "decompose", "f1_scores", "form_clusters", "gain_all", "gain_each", "identify_candidates",
    "max_intersect_orig", "modularity", "modularity_gain", "mutual_candidates", "od_accept",
    "parse_network", "perturb", "planted_partition", "read_network", "reduce_candidates",
    "run_stability_protocol", "serialize_shuffled", "write_hierarchy",
]
