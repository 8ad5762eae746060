"""Command-line front end.

Exit codes: 0 success, 1 runtime error, 2 usage error or unreadable input.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bench, evaluation
from .graph import ParseError, read_network, serialize
from .hierarchy import cluster, write_hierarchy

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _load(path, directed):
    if not os.path.isfile(path):
        raise InputError(f"cannot open {path}")
    try:
        return read_network(path, directed=True if directed else None)
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_cluster(args) -> int:
    net = _load(args.input, args.directed)
    h = cluster(net)
    write_hierarchy(h, args.output)
    print(f"levels: {len(h)}")
    for k, lv in enumerate(h.levels):
        print(f"level {k + 1}: clusters={len(lv.clusters)} nodes={lv.network.n} Q={lv.modularity:.6f}")
    return EXIT_OK


def cmd_eval(args) -> int:
    for path in (args.candidate, args.truth):
        if not os.path.isfile(path):
            raise InputError(f"cannot open {path}")
    rep = evaluation.f1_scores(evaluation.read_clusters(args.candidate),
                               evaluation.read_clusters(args.truth))
    print(f"F1a: {rep.f1a:.6f}")
    print(f"F1h: {rep.f1h:.6f}")
    return EXIT_OK


def cmd_perturb(args) -> int:
    net = _load(args.input, args.directed)
    out = evaluation.perturb(net, args.fraction, args.seed)
    _write_text(args.output, serialize(out))
    return EXIT_OK


def cmd_protocol(args) -> int:
    net = _load(args.input, args.directed)
    trace = evaluation.run_stability_protocol(net, shuffles=args.shuffles, seed=args.seed)
    csv = trace.to_csv()
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        _write_text(os.path.join(args.output, "protocol.csv"), csv)
        from .plotting import plot_stability
        plot_stability(trace, os.path.join(args.output, "protocol.png"))
    sys.stdout.write(csv)
    return EXIT_OK


def cmd_oracle(args) -> int:
    net = _load(args.input, args.directed)
    best, q = evaluation.brute_force_best_partition(net)
    for cl in sorted(tuple(sorted(c)) for c in best):
        print(" ".join(str(int(net.labels[v])) for v in cl))
    print(f"Q*: {q:.6f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    links = [int(float(x)) for x in args.links.split(",")]
    if args.pin:
        bench.pin_single_core()
    rows = bench.scaling_run(bench.sizes_for_links(links, args.degree), seed=args.seed)
    csv = bench.to_csv(rows)
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        _write_text(os.path.join(args.output, "bench.csv"), csv)
        if len(rows) >= 2:
            from .plotting import plot_scaling
            plot_scaling(rows, os.path.join(args.output, "bench.png"), bench.loglog_slope(rows))
    sys.stdout.write(csv)
    if len(rows) >= 2:
        print(f"# loglog slope: {bench.loglog_slope(rows):.3f}")
    return EXIT_OK


def cmd_generate(args) -> int:
    net, truth = evaluation.planted_partition(args.nodes, args.communities, args.p_in, args.p_out, args.seed)
    os.makedirs(args.output, exist_ok=True)
    _write_text(os.path.join(args.output, "network.nse"), serialize(net))
    lines = [" ".join(map(str, sorted(cl))) for cl in truth]
    _write_text(os.path.join(args.output, "truth.cnl"), "\n".join(lines) + "\n")
    print(f"nodes={net.n} links={net.link_count} communities={len(truth)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stableclust", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def net_in(sp):
        sp.add_argument("-i", "--input", required=True, help="link list (.nsl/.nse undirected, .nsa directed)")
        sp.add_argument("-d", "--directed", action="store_true", help="treat input arcs as directed")

    sp = sub.add_parser("cluster", help="build the cluster hierarchy")
    net_in(sp)
    sp.add_argument("-o", "--output", required=True, help="output directory")
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("eval", help="F1a/F1h of a cluster file against ground truth")
    sp.add_argument("candidate")
    sp.add_argument("truth")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("perturb", help="remove a fraction of links")
    net_in(sp)
    sp.add_argument("-f", "--fraction", type=float, required=True)
    sp.add_argument("-s", "--seed", type=int, required=True)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_perturb)

    sp = sub.add_parser("protocol", help="link-removal stability protocol (CSV)")
    net_in(sp)
    sp.add_argument("-s", "--seed", type=int, required=True)
    sp.add_argument("--shuffles", type=int, default=4)
    sp.add_argument("-o", "--output", help="directory for protocol.csv and protocol.png")
    sp.set_defaults(func=cmd_protocol)

    sp = sub.add_parser("oracle", help="brute-force modularity optimum (n <= 10)")
    net_in(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("bench", help="runtime scaling on planted-partition fixtures")
    sp.add_argument("--links", default="10000,30000,100000,300000", help="comma-separated link counts")
    sp.add_argument("--degree", type=float, default=10.0)
    sp.add_argument("-s", "--seed", type=int, required=True)
    sp.add_argument("--pin", action="store_true", help="pin to a single CPU core")
    sp.add_argument("-o", "--output", help="directory for bench.csv and bench.png")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("generate", help="planted-partition network and ground truth")
    sp.add_argument("-n", "--nodes", type=int, required=True)
    sp.add_argument("-k", "--communities", type=int, required=True)
    sp.add_argument("--p-in", type=float, required=True)
    sp.add_argument("--p-out", type=float, required=True)
    sp.add_argument("-s", "--seed", type=int, required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
