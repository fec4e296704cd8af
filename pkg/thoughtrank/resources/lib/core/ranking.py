"""Hard filtering, maximal sets and depth-based top-k over a hierarchy.

The depth of a document is the length of the longest strict dominance chain
above it, so the top-1 set is the maximal set and the top-k set holds every
document of depth below ``k``. Dominance is computed once per unordered pair and laid out
as a :mod:`networkx` digraph; depths follow from a topological sweep.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from ..common import ConfigurationError
from ..perf import timed
from .hierarchy import (
    ConsistencyError,
    Hierarchy,
    OptionThought,
    PartialOrdering,
    ScoreMatrix,
    hierarchical_compare,
)

SlotScorer = Callable[[Sequence[str], Sequence[OptionThought]], ScoreMatrix]


@dataclass(frozen=True)
class FilterMode:
    """``all`` or ``at-least`` with a positive ``k``."""

    kind: str = "all"
    k: int = 1

    @classmethod
    def all(cls) -> "FilterMode":
        return cls("all", 0)

    @classmethod
    def at_least(cls, k: int) -> "FilterMode":
        return cls("at-least", k)


@dataclass(frozen=True)
class RankedOutput:
    survivors: Tuple[str, ...]
    depths: Mapping[str, int]
    k: int
    considered: Tuple[str, ...] = ()
    pruned: Mapping[str, int] = field(default_factory=dict)

    def tier(self, depth: int) -> Tuple[str, ...]:
        return tuple(d for d in self.considered if self.depths.get(d) == depth)

    def within(self, k: int) -> Tuple[str, ...]:
        """Considered documents of depth below ``k`` (requires a full depth map)."""

        return tuple(d for d in self.considered if d in self.depths and self.depths[d] < k)


def _require_k(k: int) -> None:
    if k < 1:
        raise ConfigurationError(f"rank bound k must be a positive integer, got {k}")


def hard_filter(
    corpus: Sequence[str], matrix: ScoreMatrix, hard_slot: Sequence[OptionThought], mode: FilterMode
) -> List[str]:
    if mode.kind == "all":
        return [d for d in corpus if all(matrix.get(d, t.id) > 0 for t in hard_slot)]
    if mode.kind != "at-least":
        raise ConfigurationError(f"unknown filter mode {mode.kind!r}")
    if mode.k < 1:
        raise ConfigurationError("at-least filter needs k >= 1")
    if mode.k > len(hard_slot):
        raise ConfigurationError(f"at-least-{mode.k} over {len(hard_slot)} hard thoughts")
    return [d for d in corpus if sum(1 for t in hard_slot if matrix.get(d, t.id) > 0) >= mode.k]


def dominance_graph(docs: Sequence[str], matrix: ScoreMatrix, hierarchy: Hierarchy) -> nx.DiGraph:
    """Edge ``a -> b`` whenever ``a`` is strictly better than ``b``."""

    graph = nx.DiGraph()
    graph.add_nodes_from(docs)
    for i, a in enumerate(docs):
        for b in docs[i + 1:]:
            outcome = hierarchical_compare(matrix, a, b, hierarchy)
            if outcome is PartialOrdering.BETTER:
                graph.add_edge(a, b)
            elif outcome is PartialOrdering.WORSE:
                graph.add_edge(b, a)
    return graph


def maximal_set(docs: Sequence[str], matrix: ScoreMatrix, hierarchy: Hierarchy) -> List[str]:
    graph = dominance_graph(docs, matrix, hierarchy)
    return [d for d in docs if graph.in_degree(d) == 0]


def depth_map(docs: Sequence[str], matrix: ScoreMatrix, hierarchy: Hierarchy) -> Dict[str, int]:
    graph = dominance_graph(docs, matrix, hierarchy)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise ConsistencyError(f"dominance cycle among documents: {cycle}")
    depths: Dict[str, int] = {}
    for node in nx.topological_sort(graph):
        depths[node] = max((depths[p] + 1 for p in graph.predecessors(node)), default=0)
    return {d: depths[d] for d in docs}


def _order_by_depth(docs: Sequence[str], depths: Mapping[str, int], k: int) -> Tuple[str, ...]:
    kept = [(depths[d], i, d) for i, d in enumerate(docs) if depths[d] < k]
    return tuple(d for _, _, d in sorted(kept))


@timed("ranking.top_k", warn_threshold_ms=5000)
def top_k(docs: Sequence[str], matrix: ScoreMatrix, hierarchy: Hierarchy, k: int) -> RankedOutput:
    _require_k(k)
    depths = depth_map(docs, matrix, hierarchy)
    return RankedOutput(_order_by_depth(docs, depths, k), depths, k, tuple(docs))


@timed("ranking.progressive_top_k", warn_threshold_ms=5000)
def progressive_top_k(
    docs: Sequence[str],
    matrix: ScoreMatrix,
    hierarchy: Hierarchy,
    k: int,
    scorer: Optional[SlotScorer] = None,
) -> RankedOutput:
    """Prune with the strongest slots first, refining with weaker slots.

    When ``scorer`` is given, slot ``j`` is scored only for the survivors of
    stage ``j - 1`` and merged into the matrix before that stage runs.
    """

    _require_k(k)
    survivors = list(docs)
    pruned: Dict[str, int] = {}
    depths: Dict[str, int] = {d: 0 for d in docs}
    for stage in range(1, len(hierarchy) + 1):
        if scorer is not None and survivors:
            matrix = matrix.merged(scorer(survivors, hierarchy.slots[stage - 1].thoughts))
        depths = depth_map(survivors, matrix, hierarchy.prefix(stage))
        for d in survivors:
            if depths[d] >= k:
                pruned[d] = stage
        survivors = [d for d in survivors if depths[d] < k]
    final_depths = {d: depths[d] for d in survivors}
    return RankedOutput(tuple(sorted(survivors, key=lambda d: (final_depths[d], docs.index(d)))),
                        final_depths, k, tuple(docs), pruned)
