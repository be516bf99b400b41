"""Vectorised neighbour gathering shared by the push stages."""
from __future__ import annotations

import numpy as np


def gather(indptr: np.ndarray, indices: np.ndarray, nodes: np.ndarray):
    """Concatenate the adjacency slices of ``nodes``.

    Returns ``(targets, owner)`` where ``owner[k]`` is the position in
    ``nodes`` whose list produced ``targets[k]``.
    """
    starts = indptr[nodes]
    lens = indptr[nodes + 1] - starts
    total = int(lens.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    owner = np.repeat(np.arange(nodes.size, dtype=np.int64), lens)
    first = np.cumsum(lens) - lens
    pos = np.arange(total, dtype=np.int64) - first[owner] + starts[owner]
    return indices[pos], owner


def spread(indptr, indices, nodes, values, n):
    """Send ``values[k]`` to every neighbour of ``nodes[k]`` and sum per target.

    Returns sorted unique targets with their accumulated mass. Small pushes
    aggregate by sorting, large ones through a length-``n`` accumulator.
    """
    targets, owner = gather(indptr, indices, nodes)
    return aggregate(targets, values[owner], n)


def aggregate(targets, mass, n):
    """Sum ``mass`` per distinct target; returns sorted targets and totals."""
    if targets.size == 0:
        return targets, np.empty(0, dtype=np.float64)
    if 8 * targets.size < n:
        uniq, inv = np.unique(targets, return_inverse=True)
        return uniq, np.bincount(inv, weights=mass, minlength=uniq.size)
    dense = np.bincount(targets, weights=mass, minlength=n)
    touched = np.zeros(n, dtype=bool)
    touched[targets] = True
    uniq = np.flatnonzero(touched)
    return uniq, dense[uniq]
