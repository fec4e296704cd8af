"""Constraint-hierarchy core: comparators, ranking and explanations."""

from .explain import Explanation, explain_excluded, explain_included, explain_pair
from .hierarchy import (
    Aggregator,
    ComparatorSpec,
    ConsistencyError,
    Hierarchy,
    IncompleteMatrixError,
    OptionThought,
    PartialOrdering,
    ScoreMatrix,
    Slot,
    aggregate_slot,
    flatten,
    hierarchical_compare,
    level_compare,
)
from .ranking import FilterMode, RankedOutput, depth_map, hard_filter, maximal_set, progressive_top_k, top_k

__all__ = [
    "Aggregator",
    "ComparatorSpec",
    "ConsistencyError",
    "Explanation",
    "FilterMode",
    "Hierarchy",
    "IncompleteMatrixError",
    "OptionThought",
    "PartialOrdering",
    "RankedOutput",
    "ScoreMatrix",
    "Slot",
    "aggregate_slot",
    "depth_map",
    "explain_excluded",
    "explain_included",
    "explain_pair",
    "flatten",
    "hard_filter",
    "hierarchical_compare",
    "level_compare",
    "maximal_set",
    "progressive_top_k",
    "top_k",
]
