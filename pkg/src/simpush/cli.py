"""Command line entry point: ``simpush {query,eval,oracle,gen-queries}``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import harness
from .engine import derive_params, run_query
from .graph import load_graph
from .oracle import exact_simrank, mc_single_source, vector_rows, write_pairs_csv


def _add_graph(p):
    p.add_argument("--graph", required=True, help="edge list or binary cache")
    p.add_argument("--undirected", action="store_true", help="insert every edge both ways")


def _add_query_params(p):
    p.add_argument("--eps", type=float, default=0.02)
    p.add_argument("--delta", type=float, default=1e-4)
    p.add_argument("--c", type=float, default=0.6)
    p.add_argument("--seed", type=int, default=0)


def _read_queries(path):
    with open(path) as fh:
        return [int(line.split()[0]) for line in fh if line.strip() and not line.startswith("#")]


def cmd_query(args):
    g = load_graph(args.graph, directed=not args.undirected)
    u = g.internal_id(args.node)
    res = run_query(g, u, derive_params(args.c, args.eps, args.delta, args.seed))
    rows = vector_rows(res.vector, g)
    if args.out:
        write_pairs_csv(args.out, rows)
    else:
        print("u,v,s")
        for a, b, s in rows:
            print(f"{a},{b},{s:.12g}")
    logging.info("L=%d attention=%d timings=%s", res.L, res.n_attention, res.timings)
    return 0


def cmd_eval(args):
    params = derive_params(args.c, args.eps, args.delta, args.seed)
    if args.queries:
        queries = _read_queries(args.queries)
    else:
        g = load_graph(args.graph, directed=not args.undirected)
        queries = harness.gen_queries(g, args.gen, args.seed)
    report = harness.run_eval(args.graph, queries, params, args.k, args.out,
                              truth=args.truth, oracle="mc" if args.mc else "exact",
                              iters=args.iters, samples=args.samples,
                              directed=not args.undirected)
    agg = report.aggregate()
    print(f"AvgError@{args.k}={agg['avg_error_at_k']:.6g} "
          f"Precision@{args.k}={agg['precision_at_k']:.4f} "
          f"max_error={agg['max_error']:.6g} mean_time={agg['time_total']:.4f}s")
    return 0


def cmd_oracle(args):
    g = load_graph(args.graph, directed=not args.undirected)
    sources = ([g.internal_id(q) for q in _read_queries(args.queries)]
               if args.queries else range(g.n))
    if args.mc:
        rows = []
        for u in sources:
            vec = mc_single_source(g, u, args.c, args.samples, rng=[args.seed, u])
            rows.extend(vector_rows(vec, g))
    else:
        S = exact_simrank(g, args.c, args.iters).matrix
        rows = []
        for u in sources:
            for v in np.flatnonzero(S[u]):
                rows.append((g.external_id(u), g.external_id(v), S[u, v]))
    write_pairs_csv(args.out, rows)
    return 0


def cmd_gen_queries(args):
    g = load_graph(args.graph, directed=not args.undirected)
    qs = harness.gen_queries(g, args.count, args.seed)
    with open(args.out, "w") as fh:
        for q in qs:
            fh.write(f"{g.external_id(q)}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simpush", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("query", help="single-source SimRank for one node")
    _add_graph(p)
    p.add_argument("--node", type=int, required=True)
    _add_query_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="score the engine against ground truth")
    _add_graph(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--queries", help="file with one node id per line")
    src.add_argument("--gen", type=int, help="draw this many uniform queries")
    _add_query_params(p)
    p.add_argument("--k", type=int, default=50)
    truth = p.add_mutually_exclusive_group(required=True)
    truth.add_argument("--truth", help="u,v,s CSV of ground truth")
    truth.add_argument("--oracle", action="store_true", help="compute ground truth in-process")
    p.add_argument("--mc", action="store_true", help="use the Monte-Carlo oracle with --oracle")
    p.add_argument("--iters", type=int, default=40)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="export ground-truth SimRank as u,v,s CSV")
    _add_graph(p)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--exact", action="store_true", help="iterative definition (default)")
    kind.add_argument("--mc", action="store_true", help="Monte-Carlo walk pairs")
    p.add_argument("--iters", type=int, default=40)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--c", type=float, default=0.6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", help="restrict sources to the ids in this file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen-queries", help="write uniformly drawn query ids")
    _add_graph(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_queries)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, IndexError, MemoryError) as exc:
        print(f"simpush: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
