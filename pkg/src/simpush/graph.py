"""Immutable directed graph with forward and backward CSR adjacency."""
from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass, field

import numpy as np

CACHE_MAGIC = b"SPGRAPH1"


class GraphFormatError(ValueError):
    """Raised when an edge list or cache file cannot be parsed."""


def _csr(src: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # src/dst already sorted by (src, dst) and deduplicated
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int64, copy=True)


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Directed graph over nodes ``0..n-1``.

    ``out_indptr``/``out_indices`` hold the sorted out-neighbours O(v) and
    ``in_indptr``/``in_indices`` the sorted in-neighbours I(v). ``labels``
    maps internal ids back to the ids found in the input, or is ``None``
    when the two coincide.
    """

    n: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    labels: np.ndarray | None = None
    _label_index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for arr in (self.out_indptr, self.out_indices, self.in_indptr, self.in_indices):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, edges, n: int | None = None, labels=None) -> "DirectedGraph":
        """Build a graph from an ``(m, 2)`` array of ``(src, dst)`` pairs.

        Duplicate edges are collapsed; self-loops are kept.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and edges.min() < 0:
            raise GraphFormatError("node ids must be non-negative")
        top = int(edges.max()) + 1 if edges.size else 0
        if n is None:
            n = top
        elif top > n:
            raise GraphFormatError(f"edge endpoint {top - 1} out of range for n={n}")
        edges = np.unique(edges, axis=0) if edges.size else edges
        src, dst = edges[:, 0], edges[:, 1]
        out_indptr, out_indices = _csr(src, dst, n)
        order = np.lexsort((src, dst))
        in_indptr, in_indices = _csr(dst[order], src[order], n)
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            labels.setflags(write=False)
        return cls(n, out_indptr, out_indices, in_indptr, in_indices, labels)

    @classmethod
    def from_scipy(cls, adjacency) -> "DirectedGraph":
        """Build from a square sparse/dense adjacency where ``A[i, j] != 0`` is edge i->j."""
        import scipy.sparse as sp

        coo = sp.coo_matrix(adjacency)
        if coo.shape[0] != coo.shape[1]:
            raise GraphFormatError(f"adjacency must be square, got {coo.shape}")
        mask = coo.data != 0
        return cls.from_edges(np.column_stack([coo.row[mask], coo.col[mask]]), n=coo.shape[0])

    @property
    def m(self) -> int:
        return int(self.out_indices.shape[0])

    @property
    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[v]:self.out_indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """Canonical ``(m, 2)`` edge array sorted by source then target."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degree)
        return np.column_stack([src, self.out_indices])

    def internal_id(self, label: int) -> int:
        """Map an id as written in the input file to the internal node id."""
        if self.labels is None:
            if not 0 <= label < self.n:
                raise IndexError(f"node {label} out of range for n={self.n}")
            return int(label)
        index = self._label_index
        if index is None:
            index = {int(x): i for i, x in enumerate(self.labels)}
            object.__setattr__(self, "_label_index", index)
        try:
            return index[int(label)]
        except KeyError:
            raise IndexError(f"node label {label} not present in graph") from None

    def external_id(self, v: int) -> int:
        return int(v) if self.labels is None else int(self.labels[v])

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, m={self.m})"


def degrees(g: DirectedGraph, v: int) -> tuple[int, int]:
    """Return ``(d_in, d_out)`` of node ``v``."""
    if not 0 <= v < g.n:
        raise IndexError(f"node {v} out of range for n={g.n}")
    return (int(g.in_indptr[v + 1] - g.in_indptr[v]),
            int(g.out_indptr[v + 1] - g.out_indptr[v]))


def _read_pairs(stream) -> np.ndarray:
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode() if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise GraphFormatError(f"line {lineno}: expected 'src dst', got {line!r}")
        try:
            a, b = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node id in {line!r}") from None
        if a < 0 or b < 0:
            raise GraphFormatError(f"line {lineno}: negative node id in {line!r}")
        pairs.append((a, b))
    if not pairs:
        raise GraphFormatError("edge list is empty")
    return np.array(pairs, dtype=np.int64)


def load_edge_list(source, directed: bool = True, relabel: bool | None = None) -> DirectedGraph:
    """Parse a whitespace separated ``src dst`` edge list.

    ``source`` is a path, a bytes payload or an open binary/text stream.
    Lines beginning with ``#`` or ``%`` are comments. In undirected mode
    every edge is inserted in both directions.

    With ``relabel=None`` ids are kept as-is (``n = 1 + max id``) unless
    they are sparse, meaning fewer than half of ``0..max id`` occur; then
    they are compacted to ``0..n-1`` and ``labels`` records the originals.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            pairs = _read_pairs(fh)
    elif isinstance(source, (bytes, bytearray)):
        pairs = _read_pairs(io.BytesIO(source))
    else:
        pairs = _read_pairs(source)

    if not directed:
        pairs = np.vstack([pairs, pairs[:, ::-1]])
    ids = np.unique(pairs)
    if relabel is None:
        relabel = 2 * ids.size < int(ids[-1]) + 1
    if relabel:
        return DirectedGraph.from_edges(np.searchsorted(ids, pairs), n=ids.size, labels=ids)
    return DirectedGraph.from_edges(pairs)


def write_edge_list(g: DirectedGraph, path) -> None:
    """Write the canonical edge list (external ids), one ``src dst`` per line."""
    edges = g.edges()
    if g.labels is not None:
        edges = g.labels[edges]
    with open(path, "w") as fh:
        for a, b in edges:
            fh.write(f"{a} {b}\n")


def save_cache(g: DirectedGraph, path) -> None:
    """Binary cache: magic, n, m, offsets and targets, little-endian int64.

    When the graph was relabelled the label table follows as n more int64.
    """
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<qq", g.n, g.m))
        for arr in (g.out_indptr, g.in_indptr, g.out_indices, g.in_indices):
            fh.write(np.asarray(arr, dtype="<i8").tobytes())
        if g.labels is not None:
            fh.write(np.asarray(g.labels, dtype="<i8").tobytes())


def load_cache(path) -> DirectedGraph:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != CACHE_MAGIC:
        raise GraphFormatError(f"{path}: bad magic bytes")
    n, m = struct.unpack_from("<qq", data, 8)
    body = np.frombuffer(data, dtype="<i8", offset=24).astype(np.int64)
    sizes = [n + 1, n + 1, m, m]
    if body.size not in (sum(sizes), sum(sizes) + n):
        raise GraphFormatError(f"{path}: truncated cache (n={n}, m={m})")
    parts = np.split(body, np.cumsum(sizes))
    labels = parts[4] if parts[4].size else None
    if labels is not None:
        labels.setflags(write=False)
    return DirectedGraph(n, parts[0], parts[2], parts[1], parts[3], labels)


def load_graph(path, directed: bool = True) -> DirectedGraph:
    """Load either a binary cache (detected by magic bytes) or an edge list."""
    with open(path, "rb") as fh:
        head = fh.read(len(CACHE_MAGIC))
    if head == CACHE_MAGIC:
        return load_cache(path)
    return load_edge_list(path, directed=directed)
