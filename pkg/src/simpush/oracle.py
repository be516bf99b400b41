"""Ground-truth SimRank: the iterative definition and a Monte-Carlo pair estimator.

Both are far slower than the engine and exist to check it.
"""
from __future__ import annotations

import csv
import math
import os
from collections import deque
from dataclasses import dataclass

import numba
import numpy as np

from .engine.reverse_push import SimRankVector
from .graph import DirectedGraph

DEFAULT_NODE_CAP = 2000
MAX_WALK_STEPS = 255

if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"


def _apply_thread_cap():
    cap = os.environ.get("SIMPUSH_THREADS")
    if cap and cap.isdigit() and int(cap) > 0:
        numba.set_num_threads(min(int(cap), numba.config.NUMBA_NUM_THREADS))


@dataclass
class ExactSimRankMatrix:
    matrix: np.ndarray
    iterations: int
    c: float

    def __getitem__(self, key):
        return self.matrix[key]

    def row(self, u: int) -> SimRankVector:
        return SimRankVector(u, self.matrix[u].copy())


@dataclass
class PairEstimate:
    value: float
    n_samples: int
    radius: float


def exact_simrank(g: DirectedGraph, c: float = 0.6, K: int = 40,
                  node_cap: int = DEFAULT_NODE_CAP) -> ExactSimRankMatrix:
    """Run ``K`` rounds of the SimRank recursion starting from the identity.

    s(a, b) = c / (|I(a)| |I(b)|) * sum of s over in-neighbour pairs, with
    s(a, a) = 1 and s(a, b) = 0 when either in-neighbour set is empty.
    Truncation error after ``K`` rounds is below ``c**(K + 1)``.
    """
    if g.n > node_cap:
        raise MemoryError(f"exact SimRank needs an n x n matrix; n={g.n} exceeds cap {node_cap}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    n = g.n
    deg = g.in_degree
    W = np.zeros((n, n))
    rows = np.repeat(np.arange(n), deg)
    W[rows, g.in_indices] = 1.0 / deg[rows]
    S = np.eye(n)
    diag = np.arange(n)
    for _ in range(K):
        S = c * (W @ S @ W.T)
        S = np.triu(S)
        S = S + np.triu(S, 1).T
        S[diag, diag] = 1.0
    return ExactSimRankMatrix(S, K, c)


@numba.njit(inline="always")
def _uniform(seed, counter):
    # splitmix64 of (seed, counter) -> double in [0, 1)
    z = seed + (counter + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(inline="always")
def _step(indptr, indices, node, sqrt_c, seed, base):
    # returns -1 when the walk stops
    d = indptr[node + 1] - indptr[node]
    if d == 0 or _uniform(seed, base) >= sqrt_c:
        return -1
    k = np.int64(_uniform(seed, base + np.uint64(1)) * d)
    return indices[indptr[node] + k]


@numba.njit(parallel=True, cache=True)
def _meet_counts(indptr, indices, u, targets, sqrt_c, n_samples, seeds, max_steps):
    counts = np.zeros(targets.size, dtype=np.int64)
    for t in numba.prange(targets.size):
        v = targets[t]
        seed = seeds[t]
        met = 0
        for k in range(n_samples):
            a = u
            b = v
            if a == b:
                met += 1
                continue
            base = np.uint64(k) * np.uint64(4 * (max_steps + 1))
            for step in range(max_steps):
                a = _step(indptr, indices, a, sqrt_c, seed, base + np.uint64(4 * step))
                if a < 0:
                    break
                b = _step(indptr, indices, b, sqrt_c, seed, base + np.uint64(4 * step + 2))
                if b < 0:
                    break
                if a == b:
                    met += 1
                    break
        counts[t] = met
    return counts


def hoeffding_radius(n_samples: int, delta: float) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n_samples))


def _seeds(rng, size):
    return rng.integers(0, 2 ** 63, size=size, dtype=np.int64).astype(np.uint64)


def mc_pair(g: DirectedGraph, u: int, v: int, c: float = 0.6, n_samples: int = 100_000,
            rng=None, delta: float = 0.01) -> PairEstimate:
    """Fraction of independent sqrt(c)-walk pairs from ``u`` and ``v`` that meet.

    ``radius`` is the two-sided Hoeffding bound at confidence ``1 - delta``.
    """
    for x in (u, v):
        if not 0 <= x < g.n:
            raise IndexError(f"node {x} out of range for n={g.n}")
    rng = np.random.default_rng(rng)
    _apply_thread_cap()
    counts = _meet_counts(g.in_indptr, g.in_indices, np.int64(u), np.array([v], dtype=np.int64),
                          math.sqrt(c), int(n_samples), _seeds(rng, 1), MAX_WALK_STEPS)
    return PairEstimate(counts[0] / n_samples, int(n_samples), hoeffding_radius(n_samples, delta))


def _bfs_levels(indptr, indices, start, depth):
    seen = np.zeros(indptr.size - 1, dtype=bool)
    seen[start] = True
    queue = deque([(s, 0) for s in np.atleast_1d(start)])
    while queue:
        x, d = queue.popleft()
        if d == depth:
            continue
        for y in indices[indptr[x]:indptr[x + 1]]:
            if not seen[y]:
                seen[y] = True
                queue.append((y, d + 1))
    return np.flatnonzero(seen)


def candidate_targets(g: DirectedGraph, u: int, depth: int) -> np.ndarray:
    """Nodes that could meet ``u``: descendants of ``u``'s ancestors, both within ``depth``."""
    ancestors = _bfs_levels(g.in_indptr, g.in_indices, u, depth)
    ancestors = ancestors[g.out_degree[ancestors] > 0]
    if ancestors.size == 0:
        return np.empty(0, dtype=np.int64)
    return _bfs_levels(g.out_indptr, g.out_indices, ancestors, depth)


def mc_single_source(g: DirectedGraph, u: int, c: float = 0.6, n_samples_per_target: int = 100_000,
                     rng=None, depth: int | None = None, targets=None) -> SimRankVector:
    """Monte-Carlo estimate of s(u, v) for every ``v``, or only for ``targets``.

    Without explicit targets only nodes within ``depth`` hops of a common
    ancestor are simulated; the default depth is where c**depth falls
    below 1e-12. Entries that are not simulated stay 0.
    """
    if not 0 <= u < g.n:
        raise IndexError(f"node {u} out of range for n={g.n}")
    rng = np.random.default_rng(rng)
    if depth is None:
        depth = math.ceil(math.log(1e-12) / math.log(c))
    if targets is None:
        targets = candidate_targets(g, u, depth)
    targets = np.unique(np.asarray(targets, dtype=np.int64))
    targets = targets[targets != u]
    values = np.zeros(g.n)
    if targets.size:
        _apply_thread_cap()
        counts = _meet_counts(g.in_indptr, g.in_indices, np.int64(u), targets, math.sqrt(c),
                              int(n_samples_per_target), _seeds(rng, targets.size),
                              MAX_WALK_STEPS)
        values[targets] = counts / n_samples_per_target
    values[u] = 1.0
    return SimRankVector(u, values)


def write_pairs_csv(path, rows) -> None:
    """Write ``(u, v, s)`` triples as CSV with 12 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "s"])
        for u, v, s in rows:
            w.writerow([int(u), int(v), f"{float(s):.12g}"])


def vector_rows(vec: SimRankVector, g: DirectedGraph | None = None, nonzero: bool = True):
    ext = (lambda x: x) if g is None else g.external_id
    for v in np.flatnonzero(vec.values) if nonzero else range(vec.values.size):
        yield ext(vec.source), ext(int(v)), vec.values[v]


def read_pairs_csv(path) -> dict:
    """Load a ``u,v,s`` CSV as ``{u: {v: s}}``."""
    out: dict = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["u"]), {})[int(row["v"])] = float(row["s"])
    return out
