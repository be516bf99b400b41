"""sqrt(c)-walk sampling used to pick the number of source-push levels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..graph import DirectedGraph
from .params import QueryParams


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox generator; ``stream`` selects an independent substream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class WalkLevelCounts:
    """Visit counts ``H[l][v]`` of ``n_walks`` walks from ``source``.

    ``levels[l]`` is a pair ``(nodes, counts)`` with ``nodes`` sorted.
    """

    source: int
    n_walks: int
    levels: dict = field(default_factory=dict)

    def count(self, step: int, v: int) -> int:
        if step not in self.levels:
            return 0
        nodes, counts = self.levels[step]
        i = np.searchsorted(nodes, v)
        return int(counts[i]) if i < nodes.size and nodes[i] == v else 0

    def total(self, step: int) -> int:
        return int(self.levels[step][1].sum()) if step in self.levels else 0

    @property
    def max_step(self) -> int:
        return max(self.levels) if self.levels else 0


def _split_uniform(rng, starts, lens, counts):
    """Multinomially distribute ``counts[k]`` over ``lens[k]`` equiprobable slots.

    Segments holding fewer walkers than slots draw each walker's slot
    directly; the rest use recursive binomial halving, vectorised over all
    segments. Returns ``(slot, amount)`` where ``slot`` is the absolute
    index ``starts[k] + offset``; a slot may appear more than once.
    """
    slots, amounts = [], []
    # sparse segments: place walkers one by one instead of halving
    few = counts < lens
    if few.any():
        reps = counts[few]
        slots.append(np.repeat(starts[few], reps) + rng.integers(0, np.repeat(lens[few], reps)))
        amounts.append(np.ones(slots[-1].size, dtype=np.int64))
        starts, lens, counts = starts[~few], lens[~few], counts[~few]
    while starts.size:
        live = counts > 0
        starts, lens, counts = starts[live], lens[live], counts[live]
        leaf = lens == 1
        slots.append(starts[leaf])
        amounts.append(counts[leaf])
        starts, lens, counts = starts[~leaf], lens[~leaf], counts[~leaf]
        if not starts.size:
            break
        half = lens // 2
        left = rng.binomial(counts, half / lens)
        starts = np.concatenate([starts, starts + half])
        lens = np.concatenate([half, lens - half])
        counts = np.concatenate([left, counts - left])
    if not slots:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(slots), np.concatenate(amounts)


def sample_level_counts(g: DirectedGraph, u: int, params: QueryParams, rng=None,
                        max_steps: int | None = None) -> WalkLevelCounts:
    """Simulate ``params.n_walks`` independent sqrt(c)-walks from ``u``.

    The walks are advanced as a population: the walkers sitting on a node
    survive a step with a binomial draw and spread over its in-neighbours
    with a uniform multinomial draw. This has exactly the distribution of
    per-walk simulation but costs time proportional to the distinct
    ``(step, node)`` pairs visited. Steps beyond ``max_steps`` (default
    ``L_star``) are not recorded.
    """
    if not 0 <= u < g.n:
        raise IndexError(f"query node {u} out of range for n={g.n}")
    if rng is None:
        rng = make_rng(params.seed, u)
    if max_steps is None:
        max_steps = params.L_star
    deg = g.in_degree
    nodes = np.array([u], dtype=np.int64)
    counts = np.array([params.n_walks], dtype=np.int64)
    out = WalkLevelCounts(u, params.n_walks, {0: (nodes, counts)})
    for step in range(1, max_steps + 1):
        movable = deg[nodes] > 0
        nodes, counts = nodes[movable], counts[movable]
        survivors = rng.binomial(counts, params.sqrt_c)
        slots, amounts = _split_uniform(rng, g.in_indptr[nodes], deg[nodes], survivors)
        if slots.size == 0:
            break
        nodes, inv = np.unique(g.in_indices[slots], return_inverse=True)
        counts = np.bincount(inv, weights=amounts, minlength=nodes.size).astype(np.int64)
        out.levels[step] = (nodes, counts)
    return out


def detect_max_level(counts: WalkLevelCounts, params: QueryParams) -> int:
    """Deepest step ``<= L_star`` where some node's visit frequency reaches ``eps_h / 2``."""
    for step in sorted(counts.levels, reverse=True):
        if step == 0 or step > params.L_star:
            continue
        if counts.levels[step][1].max() / counts.n_walks >= params.eps_h / 2:
            return step
    return 0
