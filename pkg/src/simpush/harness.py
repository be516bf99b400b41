"""Evaluation pipeline: query generation, ranking metrics and CSV reports."""
from __future__ import annotations

import csv
import logging
import os
import resource
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .engine import QueryParams, run_query
from .engine.reverse_push import SimRankVector
from .graph import DirectedGraph, load_graph
from .oracle import DEFAULT_NODE_CAP, exact_simrank, mc_single_source, read_pairs_csv

log = logging.getLogger(__name__)

TIMING_PREFIXES = ("time_", "peak_rss")


class TopKWarning(UserWarning):
    """Fewer than ``k`` nodes have nonzero ground-truth similarity."""


@dataclass
class QuerySet:
    nodes: np.ndarray
    seed: int | None = None

    def __len__(self) -> int:
        return self.nodes.size

    def __iter__(self):
        return iter(int(x) for x in self.nodes)


def gen_queries(g: DirectedGraph, count: int, seed: int = 0, replace: bool | None = None) -> QuerySet:
    """Draw ``count`` query nodes uniformly at random.

    Sampling is without replacement unless ``count > n`` or ``replace`` is set.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if replace is None:
        replace = count > g.n
    elif not replace and count > g.n:
        raise ValueError(f"cannot draw {count} distinct queries from {g.n} nodes")
    rng = np.random.default_rng(seed)
    return QuerySet(rng.choice(g.n, size=count, replace=replace).astype(np.int64), seed)


def _values(vec):
    return vec.values if isinstance(vec, SimRankVector) else np.asarray(vec, dtype=np.float64)


def _source(truth, source):
    if source is None and isinstance(truth, SimRankVector):
        return truth.source
    return source


def top_k(values: np.ndarray, k: int, exclude: int | None = None, nonzero: bool = False) -> np.ndarray:
    """Indices of the ``k`` largest values, ties broken by ascending node id."""
    order = np.lexsort((np.arange(values.size), -values))
    if exclude is not None:
        order = order[order != exclude]
    if nonzero:
        order = order[values[order] > 0]
    return order[:k]


def _truth_top_k(truth, k, source):
    vals = _values(truth)
    ids = top_k(vals, k, exclude=source, nonzero=True)
    if ids.size < k:
        warnings.warn(f"only {ids.size} nodes have nonzero truth similarity; k={k} truncated",
                      TopKWarning, stacklevel=3)
    return vals, ids


def avg_error_at_k(truth, est, k: int, source: int | None = None) -> float:
    """Mean absolute error over the ground-truth top-``k`` nodes (query node excluded)."""
    source = _source(truth, source)
    vals, ids = _truth_top_k(truth, k, source)
    if ids.size == 0:
        return 0.0
    return float(np.abs(_values(est)[ids] - vals[ids]).mean())


def precision_at_k(truth, est, k: int, source: int | None = None) -> float:
    """Overlap of the true and estimated top-``k`` sets as a fraction of the true set."""
    source = _source(truth, source)
    _, ids = _truth_top_k(truth, k, source)
    if ids.size == 0:
        return 1.0
    found = top_k(_values(est), ids.size, exclude=source)
    return np.intersect1d(ids, found).size / ids.size


@dataclass
class QueryMetrics:
    query: int
    avg_error_at_k: float
    precision_at_k: float
    max_error: float
    max_overestimate: float
    L: int
    n_attention: int
    time_sampling: float = 0.0
    time_source_push: float = 0.0
    time_gamma: float = 0.0
    time_reverse_push: float = 0.0
    time_total: float = 0.0


@dataclass
class MetricsReport:
    queries: list
    params: dict
    k: int
    peak_rss_kb: int = 0
    per_query: list = field(default_factory=list)

    def aggregate(self) -> dict:
        if not self.per_query:
            return {}
        # fixed order keeps the float sums identical however queries were scheduled
        rows = [asdict(q) for q in sorted(self.per_query, key=lambda q: q.query)]
        keys = [key for key in rows[0] if key != "query"]
        out = {key: float(np.mean([r[key] for r in rows])) for key in keys}
        out["max_error"] = float(max(r["max_error"] for r in rows))
        out["max_overestimate"] = float(max(r["max_overestimate"] for r in rows))
        return out

    def rows(self):
        """Long-format ``(query, metric, value)`` rows, parameters first."""
        for key, value in self.params.items():
            yield "param", key, value
        for q in sorted(self.per_query, key=lambda q: q.query):
            for key, value in asdict(q).items():
                if key != "query":
                    yield q.query, key, value
        for key, value in self.aggregate().items():
            yield "mean", key, value
        yield "all", "peak_rss_kb", self.peak_rss_kb

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["query", "metric", "value"])
            for query, metric, value in self.rows():
                w.writerow([query, metric, _fmt(value)])


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.10g}"
    return str(value)


def strip_timing(csv_text: str) -> str:
    """Drop the wall-clock and memory rows of a report for run-to-run comparison."""
    keep = []
    for line in csv_text.splitlines():
        parts = line.split(",")
        if len(parts) > 1 and parts[1].startswith(TIMING_PREFIXES):
            continue
        keep.append(line)
    return "\n".join(keep)


def worker_count() -> int:
    raw = os.environ.get("SIMPUSH_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def peak_rss_kb() -> int:
    return int(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)


def ground_truth(g: DirectedGraph, queries, c: float, truth=None, oracle: str = "exact",
                 iters: int = 40, samples: int = 100_000, seed: int = 0) -> dict:
    """``{query: dense truth vector}`` from a CSV path, a mapping, or an oracle run."""
    queries = sorted(set(queries))
    if truth is not None:
        table = read_pairs_csv(truth) if isinstance(truth, (str, os.PathLike)) else truth
        out = {}
        for u in queries:
            ext = g.external_id(u)
            if ext not in table:
                raise KeyError(f"truth has no rows for query node {ext}")
            vec = np.zeros(g.n)
            for v, s in table[ext].items():
                vec[g.internal_id(v)] = s
            vec[u] = 1.0
            out[u] = vec
        return out
    if oracle == "exact":
        if g.n > DEFAULT_NODE_CAP:
            raise ValueError(f"exact oracle refused for n={g.n}; supply --truth or use the MC oracle")
        S = exact_simrank(g, c, iters).matrix
        return {u: S[u].copy() for u in queries}
    if oracle == "mc":
        return {u: mc_single_source(g, u, c, samples, rng=[seed, u]).values for u in queries}
    raise ValueError(f"unknown oracle {oracle!r}")


def evaluate(g: DirectedGraph, queries, params: QueryParams, k: int, truth: dict,
             threads: int | None = None, extra_params: dict | None = None) -> MetricsReport:
    queries = [int(q) for q in queries]
    echo = {"c": params.c, "eps": params.eps, "delta": params.delta, "seed": params.seed,
            "k": k, "eps_h": params.eps_h, "L_star": params.L_star, "n_walks": params.n_walks,
            "n": g.n, "m": g.m, "n_queries": len(queries)}
    echo.update(extra_params or {})
    report = MetricsReport(queries, echo, k)

    def one(u):
        t0 = time.perf_counter()
        res = run_query(g, u, params)
        elapsed = time.perf_counter() - t0
        est, tv = res.vector.values, truth[u]
        diff = np.delete(tv - est, u)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TopKWarning)
            return QueryMetrics(
                query=g.external_id(u),
                avg_error_at_k=avg_error_at_k(tv, est, k, source=u),
                precision_at_k=precision_at_k(tv, est, k, source=u),
                max_error=float(diff.max(initial=0.0)),
                max_overestimate=float((-diff).max(initial=0.0)),
                L=res.L,
                n_attention=res.n_attention,
                time_sampling=res.timings["sampling"],
                time_source_push=res.timings["source_push"],
                time_gamma=res.timings["gamma"],
                time_reverse_push=res.timings["reverse_push"],
                time_total=elapsed,
            )

    threads = threads or worker_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            report.per_query = list(pool.map(one, queries))
    else:
        report.per_query = [one(u) for u in queries]
    report.peak_rss_kb = peak_rss_kb()
    return report


def run_eval(graph_path, queries, params: QueryParams, k: int, output_path=None, truth=None,
             oracle: str = "exact", iters: int = 40, samples: int = 100_000,
             directed: bool = True) -> MetricsReport:
    """Run the engine over ``queries`` (external ids), score against ground truth, write CSV."""
    g = load_graph(graph_path, directed=directed)
    if isinstance(queries, QuerySet):
        internal = [int(q) for q in queries.nodes]
    else:
        internal = [g.internal_id(q) for q in queries]
    log.info("evaluating %d queries on %r", len(internal), g)
    truth_vecs = ground_truth(g, internal, params.c, truth, oracle, iters, samples, params.seed)
    report = evaluate(g, internal, params, k, truth_vecs,
                      extra_params={"truth": "csv" if truth is not None else oracle})
    if output_path is not None:
        report.write_csv(output_path)
    return report
