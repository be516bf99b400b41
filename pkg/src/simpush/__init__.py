"""Index-free single-source SimRank queries with additive error guarantees."""
from .engine import QueryParams, QueryResult, SimRankVector, derive_params, run_query, single_source
from .estimator import ExactSimRank, MonteCarloSimRank, SimPush
from .graph import DirectedGraph, GraphFormatError, degrees, load_edge_list, load_graph
from .oracle import exact_simrank, mc_pair, mc_single_source

__version__ = "0.1.0"

__all__ = [
    "DirectedGraph", "ExactSimRank", "GraphFormatError", "MonteCarloSimRank", "QueryParams",
    "QueryResult", "SimPush", "SimRankVector", "degrees", "derive_params", "exact_simrank",
    "load_edge_list", "load_graph", "mc_pair", "mc_single_source", "run_query", "single_source",
]
