from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..graph import DirectedGraph
from .last_meeting import (GammaTable, HitTable, compute_residues, hitting_in_source_graph,
                           last_meeting_all)
from .params import QueryParams, derive_params
from .reverse_push import SimRankVector, reverse_push
from .source_push import AttentionSets, SourceGraph, source_push
from .walks import detect_max_level, make_rng, sample_level_counts

STAGES = ("sampling", "source_push", "gamma", "reverse_push")


@dataclass
class QueryResult:
    """A single-source answer together with the intermediate structures."""

    vector: SimRankVector
    params: QueryParams
    L: int
    source_graph: SourceGraph | None = None
    attention: AttentionSets | None = None
    hit_table: HitTable | None = None
    gammas: GammaTable | None = None
    timings: dict = field(default_factory=dict)

    @property
    def n_attention(self) -> int:
        return 0 if self.attention is None else self.attention.total


def run_query(g: DirectedGraph, u: int, params: QueryParams) -> QueryResult:
    if not 0 <= u < g.n:
        raise IndexError(f"query node {u} out of range for n={g.n}")
    timings = dict.fromkeys(STAGES, 0.0)

    t0 = time.perf_counter()
    counts = sample_level_counts(g, u, params, make_rng(params.seed, u))
    L = detect_max_level(counts, params)
    timings["sampling"] = time.perf_counter() - t0
    if L == 0:
        values = np.zeros(g.n)
        values[u] = 1.0
        return QueryResult(SimRankVector(u, values), params, 0, timings=timings)

    t0 = time.perf_counter()
    sg, att = source_push(g, u, L, params)
    timings["source_push"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    hit = hitting_in_source_graph(sg, att)
    gammas = last_meeting_all(hit)
    compute_residues(sg, att, gammas)
    timings["gamma"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    vec = reverse_push(g, att, params, u)
    np.clip(vec.values, 0.0, 1.0, out=vec.values)
    timings["reverse_push"] = time.perf_counter() - t0
    return QueryResult(vec, params, L, sg, att, hit, gammas, timings)


def single_source(g: DirectedGraph, u: int, c: float = 0.6, eps: float = 0.02,
                  delta: float = 1e-4, seed: int = 0) -> SimRankVector:
    """Approximate s(u, v) for all v with additive error at most ``eps`` w.p. ``1 - delta``.

    Estimates never exceed the exact value; the result is a deterministic
    function of the arguments.
    """
    return run_query(g, u, derive_params(c, eps, delta, seed)).vector
