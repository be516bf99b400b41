"""scikit-learn style wrappers so the engine composes with pipelines and grid search."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .engine import derive_params, run_query
from .graph import DirectedGraph
from .oracle import exact_simrank, mc_single_source


def check_graph(X) -> DirectedGraph:
    """Accept a DirectedGraph, an ``(m, 2)`` edge array, or a square adjacency matrix."""
    if isinstance(X, DirectedGraph):
        return X
    if sp.issparse(X):
        return DirectedGraph.from_scipy(X)
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 2 and not (arr.shape[0] == 2 and arr.dtype == bool):
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"edge array must hold integer node ids, got dtype {arr.dtype}")
        return DirectedGraph.from_edges(arr)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return DirectedGraph.from_scipy(arr)
    raise ValueError(f"cannot interpret input of shape {arr.shape} as a graph")


def check_nodes(nodes, n: int) -> np.ndarray:
    nodes = np.atleast_1d(np.asarray(nodes))
    if nodes.ndim != 1 or not np.issubdtype(nodes.dtype, np.integer):
        raise ValueError("query nodes must be a 1-d array of integer ids")
    if nodes.size and (nodes.min() < 0 or nodes.max() >= n):
        raise ValueError(f"query node ids must lie in [0, {n})")
    return nodes.astype(np.int64)


class SimPush(TransformerMixin, BaseEstimator):
    """Single-source SimRank estimator.

    ``fit`` stores the graph; ``transform(nodes)`` returns one row of
    similarity scores per query node, each within ``eps`` below the exact
    SimRank with probability ``1 - delta``.

    Parameters
    ----------
    c : float
        Decay factor.
    eps : float
        Additive error bound.
    delta : float
        Failure probability.
    random_state : int
        Seed; each query node gets its own substream.
    """

    def __init__(self, c=0.6, eps=0.02, delta=1e-4, random_state=0):
        self.c = c
        self.eps = eps
        self.delta = delta
        self.random_state = random_state

    def fit(self, X, y=None):
        self.params_ = derive_params(self.c, self.eps, self.delta, self.random_state or 0)
        self.graph_ = check_graph(X)
        self.n_features_in_ = self.graph_.n
        return self

    def query(self, u):
        """Full :class:`~simpush.engine.QueryResult` for one node."""
        check_is_fitted(self, "graph_")
        u = int(check_nodes([u], self.graph_.n)[0])
        return run_query(self.graph_, u, self.params_)

    def transform(self, X):
        check_is_fitted(self, "graph_")
        nodes = check_nodes(X, self.graph_.n)
        out = np.zeros((nodes.size, self.graph_.n))
        for i, u in enumerate(nodes):
            out[i] = run_query(self.graph_, int(u), self.params_).vector.values
        return out


class ExactSimRank(TransformerMixin, BaseEstimator):
    """All-pairs SimRank from the iterative definition (small graphs only)."""

    def __init__(self, c=0.6, n_iter=40):
        self.c = c
        self.n_iter = n_iter

    def fit(self, X, y=None):
        g = check_graph(X)
        self.similarity_ = exact_simrank(g, self.c, self.n_iter).matrix
        self.n_features_in_ = g.n
        return self

    def transform(self, X):
        check_is_fitted(self, "similarity_")
        return self.similarity_[check_nodes(X, self.n_features_in_)]


class MonteCarloSimRank(TransformerMixin, BaseEstimator):
    """Single-source SimRank by counting meetings of random walk pairs."""

    def __init__(self, c=0.6, n_samples=100_000, random_state=0):
        self.c = c
        self.n_samples = n_samples
        self.random_state = random_state

    def fit(self, X, y=None):
        self.graph_ = check_graph(X)
        self.n_features_in_ = self.graph_.n
        return self

    def transform(self, X):
        check_is_fitted(self, "graph_")
        nodes = check_nodes(X, self.graph_.n)
        return np.vstack([
            mc_single_source(self.graph_, int(u), self.c, self.n_samples,
                             rng=[self.random_state or 0, int(u)]).values
            for u in nodes
        ]) if nodes.size else np.zeros((0, self.graph_.n))
