"""Single-source SimRank by source push, last-meeting correction and reverse push."""
from .last_meeting import (ConsistencyError, GammaTable, HitTable, compute_residues,
                           first_meeting, first_meeting_level, hitting_in_source_graph,
                           last_meeting, last_meeting_all)
from .params import QueryParams, attention_bound, derive_params
from .pipeline import QueryResult, run_query, single_source
from .reverse_push import SimRankVector, reverse_push
from .source_push import AttentionSets, SourceGraph, source_push
from .walks import WalkLevelCounts, detect_max_level, make_rng, sample_level_counts

__all__ = [
    "AttentionSets", "ConsistencyError", "GammaTable", "HitTable", "QueryParams",
    "QueryResult", "SimRankVector", "SourceGraph", "WalkLevelCounts", "attention_bound",
    "compute_residues", "derive_params", "detect_max_level", "first_meeting",
    "first_meeting_level", "hitting_in_source_graph", "last_meeting", "last_meeting_all",
    "make_rng", "reverse_push", "run_query", "sample_level_counts", "single_source",
    "source_push",
]
