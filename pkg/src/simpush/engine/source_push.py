"""Level-wise hitting-probability propagation from the query node."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..graph import DirectedGraph
from ._propagate import aggregate, gather
from .params import QueryParams


@dataclass
class SourceGraph:
    """Leveled subgraph reached by pushing hitting probabilities from ``source``.

    ``nodes[l]`` (sorted) and ``hit[l]`` list the occurrences on level ``l``
    and their probability h^(l)(source, .). ``edges[l]`` is a 0/1 CSR matrix
    of shape ``(len(nodes[l]), len(nodes[l + 1]))`` marking which level
    ``l + 1`` occurrences are in-neighbours of each level ``l`` occurrence.
    ``in_degree[l]`` is the in-degree in the full graph of ``nodes[l]``.
    """

    source: int
    c: float
    nodes: list
    hit: list
    edges: list
    in_degree: list

    @property
    def L(self) -> int:
        return len(self.nodes) - 1

    @property
    def n_occurrences(self) -> int:
        return sum(a.size for a in self.nodes)

    def position(self, level: int, node: int) -> int:
        """Row of ``node`` on ``level``, or -1 when it does not occur there."""
        if not 0 <= level <= self.L:
            return -1
        arr = self.nodes[level]
        i = int(np.searchsorted(arr, node))
        return i if i < arr.size and arr[i] == node else -1

    def hitting(self, level: int, node: int) -> float:
        i = self.position(level, node)
        return float(self.hit[level][i]) if i >= 0 else 0.0

    def level_mass(self, level: int) -> float:
        return float(self.hit[level].sum())

    def in_edges(self, level: int, node: int) -> np.ndarray:
        """Level ``level + 1`` occurrences feeding ``(level, node)``."""
        i = self.position(level, node)
        if i < 0 or level >= len(self.edges):
            return np.empty(0, dtype=np.int64)
        e = self.edges[level]
        return self.nodes[level + 1][e.indices[e.indptr[i]:e.indptr[i + 1]]]


@dataclass
class AttentionSets:
    """Attention occurrences per level plus their residues once known.

    Occurrences are numbered globally, level by level in increasing order
    and by node id within a level; ``offset[l]`` is the first number used
    by level ``l``.
    """

    nodes: dict
    hit: dict
    L: int
    residues: dict = field(default_factory=dict)

    def __post_init__(self):
        self.offset = {}
        total = 0
        for level in range(1, self.L + 1):
            self.offset[level] = total
            total += self.nodes[level].size
        self.total = total

    def level(self, level: int) -> np.ndarray:
        return self.nodes.get(level, np.empty(0, dtype=np.int64))

    def contains(self, level: int, node: int) -> bool:
        arr = self.level(level)
        i = int(np.searchsorted(arr, node))
        return i < arr.size and arr[i] == node

    def index(self, level: int, node: int) -> int:
        arr = self.level(level)
        i = int(np.searchsorted(arr, node))
        if i >= arr.size or arr[i] != node:
            raise KeyError(f"({level}, {node}) is not an attention occurrence")
        return self.offset[level] + i

    def occurrences(self):
        for level in range(1, self.L + 1):
            for w, h in zip(self.nodes[level], self.hit[level]):
                yield level, int(w), float(h)

    def residue(self, level: int, node: int) -> float:
        i = self.index(level, node) - self.offset[level]
        return float(self.residues[level][i])


def source_push(g: DirectedGraph, u: int, L: int, params: QueryParams):
    """Propagate hitting probabilities from ``u`` for up to ``L`` levels.

    Each level-``l`` occurrence ``v`` hands ``sqrt(c) * h / d_in(v)`` to every
    in-neighbour on level ``l + 1``. Stops early once a level is empty.
    Returns ``(SourceGraph, AttentionSets)``.
    """
    if L < 0:
        raise ValueError(f"L must be non-negative, got {L}")
    deg = g.in_degree
    nodes = [np.array([u], dtype=np.int64)]
    hit = [np.array([1.0])]
    edges = []
    for _ in range(L):
        frontier, h = nodes[-1], hit[-1]
        d = deg[frontier]
        mass = np.zeros_like(h)
        np.divide(params.sqrt_c * h, d, out=mass, where=d > 0)
        targets, owner = gather(g.in_indptr, g.in_indices, frontier)
        nxt, h_next = aggregate(targets, mass[owner], g.n)
        keep = h_next > 0
        nxt, h_next = nxt[keep], h_next[keep]
        if nxt.size == 0:
            break
        if 8 * targets.size < g.n:
            cols = np.minimum(np.searchsorted(nxt, targets), nxt.size - 1)
            linked = nxt[cols] == targets
        else:
            lookup = np.full(g.n, -1, dtype=np.int64)
            lookup[nxt] = np.arange(nxt.size)
            cols = lookup[targets]
            linked = cols >= 0
        # owner is non-decreasing, so the CSR row pointer is a running count
        indptr = np.zeros(frontier.size + 1, dtype=np.int64)
        np.cumsum(np.bincount(owner[linked], minlength=frontier.size), out=indptr[1:])
        edges.append(sp.csr_matrix((np.ones(int(linked.sum())), cols[linked], indptr),
                                   shape=(frontier.size, nxt.size)))
        nodes.append(nxt)
        hit.append(h_next)
    sg = SourceGraph(u, params.c, nodes, hit, edges, [deg[a] for a in nodes])

    att_nodes, att_hit = {}, {}
    for level in range(1, sg.L + 1):
        mask = sg.hit[level] >= params.eps_h
        att_nodes[level] = sg.nodes[level][mask]
        att_hit[level] = sg.hit[level][mask]
    return sg, AttentionSets(att_nodes, att_hit, sg.L)
