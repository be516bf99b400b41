from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import DirectedGraph
from ._propagate import spread
from .params import QueryParams
from .source_push import AttentionSets


@dataclass
class SimRankVector:
    """Estimated similarities of every node to ``source``."""

    source: int
    values: np.ndarray

    def __getitem__(self, v):
        return self.values[v]

    def __len__(self) -> int:
        return self.values.size

    def top_k(self, k: int, include_source: bool = False) -> np.ndarray:
        """Node ids of the ``k`` largest scores, ties broken by ascending id."""
        order = np.lexsort((np.arange(self.values.size), -self.values))
        if not include_source:
            order = order[order != self.source]
        return order[:k]


def reverse_push(g: DirectedGraph, att: AttentionSets, params: QueryParams, u: int) -> SimRankVector:
    """Push attention residues back along out-edges for as many steps as their level.

    A residue ``r`` on level ``l`` is pushed only when ``sqrt(c) * r >= eps_h``;
    each out-neighbour ``v`` receives ``sqrt(c) * r / d_in(v)``. Residues that
    land on the same ``(level, node)`` are merged before that level is swept,
    and what reaches level 0 is the similarity estimate.
    """
    n = g.n
    sqrt_c = params.sqrt_c
    deg = g.in_degree
    scores = np.zeros(n)
    L = max((lv for lv in att.residues if att.level(lv).size), default=0)
    residue = {lv: np.zeros(n) for lv in range(1, L + 1)}
    for lv in range(1, L + 1):
        if att.level(lv).size:
            np.add.at(residue[lv], att.level(lv), att.residues[lv])
    for lv in range(L, 0, -1):
        r = residue.pop(lv)
        push = np.flatnonzero(sqrt_c * r >= params.eps_h)
        if push.size == 0:
            continue
        targets, mass = spread(g.out_indptr, g.out_indices, push, sqrt_c * r[push], n)
        # out-neighbours always have d_in >= 1
        mass /= deg[targets]
        if lv > 1:
            residue[lv - 1][targets] += mass
        else:
            scores[targets] += mass
    scores[u] = 1.0
    return SimRankVector(u, scores)
