"""Hitting probabilities inside the source graph and last-meeting correction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .source_push import AttentionSets, SourceGraph

DROP_BELOW = 1e-15
RHO_TOLERANCE = 1e-9


class ConsistencyError(ArithmeticError):
    """A first-meeting probability came out negative beyond rounding noise."""


@dataclass
class HitTable:
    """In-source-graph hitting probabilities towards attention occurrences.

    ``rows[l]`` is a CSR matrix with one row per occurrence on level ``l``
    of the source graph and one column per attention occurrence (global
    numbering of :class:`AttentionSets`). Entry ``(w', t)`` holds the
    probability that a walk confined to the source graph goes from
    ``(l, w')`` to ``t``; the step count is ``level(t) - l``.
    """

    sg: SourceGraph
    att: AttentionSets
    rows: list
    _squared: dict = field(default_factory=dict, repr=False)
    _dense: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        levels = [np.full(self.att.level(lv).size, lv, dtype=np.int64)
                  for lv in range(1, self.att.L + 1)]
        nodes = [self.att.level(lv) for lv in range(1, self.att.L + 1)]
        self.col_level = np.concatenate(levels) if levels else np.empty(0, np.int64)
        self.col_node = np.concatenate(nodes) if nodes else np.empty(0, np.int64)

    def _row_index(self, level: int, node: int) -> int:
        i = self.sg.position(level, node)
        if i < 0 or self.rows[level] is None:
            raise KeyError(f"({level}, {node}) does not occur in the source graph")
        return i

    def row(self, level: int, node: int, attention_only: bool = True) -> dict:
        """Map ``(target_level, target_node) -> value`` for one source occurrence.

        By default only attention occurrences may act as sources.
        """
        if attention_only and not self.att.contains(level, node):
            raise KeyError(f"({level}, {node}) is not an attention occurrence")
        m = self.rows[level]
        i = self._row_index(level, node)
        cols = m.indices[m.indptr[i]:m.indptr[i + 1]]
        vals = m.data[m.indptr[i]:m.indptr[i + 1]]
        return {(int(self.col_level[c]), int(self.col_node[c])): float(v)
                for c, v in zip(cols, vals)}

    def value(self, src_level: int, src_node: int, dst_level: int, dst_node: int) -> float:
        """h~^(dst_level - src_level)(src_node, dst_node); 0 when absent."""
        if not self.att.contains(dst_level, dst_node) or not 1 <= src_level <= self.sg.L:
            return 0.0
        i = self.sg.position(src_level, src_node)
        if i < 0 or self.rows[src_level] is None:
            return 0.0
        return float(self.rows[src_level][i, self.att.index(dst_level, dst_node)])

    def attention_rows(self, level: int) -> np.ndarray:
        """Dense rows of the attention occurrences on ``level`` (cached)."""
        if level not in self._dense:
            a = self.att.level(level)
            if a.size == 0 or self.rows[level] is None:
                self._dense[level] = np.zeros((a.size, self.att.total))
            else:
                pos = np.searchsorted(self.sg.nodes[level], a)
                self._dense[level] = self.rows[level][pos].toarray()
        return self._dense[level]

    def block(self, src_level: int, dst_level: int) -> np.ndarray:
        """Dense ``(|A^src|, |A^dst|)`` values from attention to attention occurrences."""
        lo = self.att.offset.get(dst_level, 0)
        return self.attention_rows(src_level)[:, lo:lo + self.att.level(dst_level).size]

    def squared_block(self, src_level: int, dst_level: int) -> np.ndarray:
        key = (src_level, dst_level)
        if key not in self._squared:
            self._squared[key] = self.block(src_level, dst_level) ** 2
        return self._squared[key]

    def entries(self, attention_only: bool = True):
        """Yield ``(src_level, src_node, dst_level, dst_node, step, value)``."""
        for level in range(1, self.sg.L + 1):
            m = self.rows[level]
            if m is None:
                continue
            coo = m.tocoo()
            for i, c, v in zip(coo.row, coo.col, coo.data):
                node = int(self.sg.nodes[level][i])
                if attention_only and not self.att.contains(level, node):
                    continue
                dst = int(self.col_level[c])
                yield level, node, dst, int(self.col_node[c]), dst - level, float(v)


def _seed(sg: SourceGraph, att: AttentionSets, level: int, total: int):
    a = att.level(level)
    rows = np.searchsorted(sg.nodes[level], a)
    cols = att.offset[level] + np.arange(a.size)
    return sp.csr_matrix((np.ones(a.size), (rows, cols)), shape=(sg.nodes[level].size, total))


def hitting_in_source_graph(sg: SourceGraph, att: AttentionSets) -> HitTable:
    """Aggregate in-source-graph hitting probabilities bottom-up.

    Sweeping from the deepest level upwards, every occurrence on level
    ``l - 1`` collects ``sqrt(c) / d_in`` times the rows of its
    in-neighbours on level ``l``, then attention occurrences on ``l - 1``
    are seeded with ``h~^(0) = 1``. Values below 1e-15 are dropped.
    """
    rows = [None] * (sg.L + 1)
    if sg.L == 0:
        return HitTable(sg, att, rows)
    total = att.total
    sqrt_c = float(np.sqrt(sg.c))
    rows[sg.L] = _seed(sg, att, sg.L, total)
    for level in range(sg.L, 1, -1):
        d = sg.in_degree[level - 1].astype(np.float64)
        scale = np.zeros_like(d)
        np.divide(sqrt_c, d, out=scale, where=d > 0)
        pushed = (sp.diags(scale) @ sg.edges[level - 1] @ rows[level]).tocsr()
        pushed.data[pushed.data < DROP_BELOW] = 0.0
        pushed.eliminate_zeros()
        rows[level - 1] = (pushed + _seed(sg, att, level - 1, total)).tocsr()
    return HitTable(sg, att, rows)


@dataclass
class GammaTable:
    """gamma^(l)(w) per attention occurrence, aligned with ``att.nodes[l]``."""

    gamma: dict
    rho: dict = field(default_factory=dict)

    def value(self, att: AttentionSets, level: int, node: int) -> float:
        return float(self.gamma[level][att.index(level, node) - att.offset[level]])


def first_meeting_level(hit: HitTable, level: int, rows=None) -> dict:
    """First-meeting probabilities for the attention occurrences on ``level``.

    Returns ``{k: rho_k}`` for every deeper level ``k`` where ``rho_k`` has
    one row per selected source occurrence and one column per attention
    occurrence on ``k``. The direct meeting probability ``h~^2`` is reduced
    by the probability of having met first at an intermediate attention
    occurrence and meeting again at the target.
    """
    L = hit.sg.L
    rho = {}
    for k in range(level + 1, L + 1):
        h = hit.block(level, k)
        if rows is not None:
            h = h[rows]
        r = h ** 2
        for j in range(level + 1, k):
            if rho[j].size and r.size:
                r -= rho[j] @ hit.squared_block(j, k)
        if r.size and r.min() < -RHO_TOLERANCE:
            raise ConsistencyError(
                f"negative first-meeting probability {r.min():.3e} from level {level} to {k}")
        rho[k] = r
    return rho


def first_meeting(hit: HitTable, level: int, node: int) -> dict:
    """``{(target_level, target_node): rho}`` for one attention occurrence."""
    i = hit.att.index(level, node) - hit.att.offset[level]
    out = {}
    for k, r in first_meeting_level(hit, level, rows=[i]).items():
        for w, val in zip(hit.att.level(k), r[0]):
            if val != 0.0:
                out[(k, int(w))] = float(val)
    return out


def last_meeting(sg: SourceGraph, att: AttentionSets, hit: HitTable, level: int, node: int) -> float:
    """gamma^(level)(node): chance two confined walks never meet at a deeper attention occurrence."""
    return 1.0 - sum(first_meeting(hit, level, node).values())


def last_meeting_all(hit: HitTable, keep_rho: bool = False) -> GammaTable:
    att = hit.att
    table = GammaTable({})
    for level in range(1, att.L + 1):
        a = att.level(level)
        if a.size == 0:
            table.gamma[level] = np.empty(0)
            continue
        rho = first_meeting_level(hit, level)
        met = np.zeros(a.size)
        for r in rho.values():
            if r.size:
                met += r.sum(axis=1)
        table.gamma[level] = 1.0 - met
        if keep_rho:
            table.rho[level] = rho
    return table


def compute_residues(sg: SourceGraph, att: AttentionSets, gammas: GammaTable) -> AttentionSets:
    """Fill ``att.residues[l] = h^(l)(u, w) * gamma^(l)(w)`` and return ``att``."""
    for level in range(1, att.L + 1):
        att.residues[level] = att.hit[level] * gammas.gamma[level]
    return att
