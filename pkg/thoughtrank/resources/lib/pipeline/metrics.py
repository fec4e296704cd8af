"""Aggregation metrics applied by a layer thought to its option thoughts' scores.

Multi-level layers are read strongest level first. Selection metrics keep the
documents whose per-level values are lexicographically best, so a weaker level
only separates documents tied on every stronger one. ``locally-better`` keeps
the maximal set under the layer's hierarchical comparator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..common import ContractError
from ..core.hierarchy import OptionThought, ScoreMatrix
from ..core.ranking import FilterMode, hard_filter, maximal_set
from .layers import LayerSpec

RankKey = Tuple[float, ...]


@dataclass(frozen=True)
class MetricOutcome:
    survivors: Tuple[str, ...]
    ranking: Tuple[Tuple[str, RankKey], ...] = ()
    truncated: bool = False


def _require_binary(layer: LayerSpec, matrix: ScoreMatrix, docs: Sequence[str]) -> None:
    for thought in layer.thoughts:
        if not thought.binary:
            raise ContractError(
                f"layer {layer.label}: {layer.metric.kind} needs binary thoughts, {thought.id!r} is not")
        for doc in docs:
            if matrix.get(doc, thought.id) not in (0.0, 1.0):
                raise ContractError(f"layer {layer.label}: binary thought {thought.id!r} scored "
                                    f"{matrix.get(doc, thought.id)} for {doc!r}")


def _level_value(matrix: ScoreMatrix, doc: str, level: Sequence[OptionThought], kind: str) -> float:
    if kind in ("max-count", "rank-count"):
        return float(sum(1 for t in level if matrix.get(doc, t.id) > 0))
    return sum(t.weight * matrix.get(doc, t.id) for t in level)


def rank_key(matrix: ScoreMatrix, doc: str, layer: LayerSpec) -> RankKey:
    return tuple(_level_value(matrix, doc, level, layer.metric.kind) for level in layer.levels)


def apply_filter_metric(docs: Sequence[str], matrix: ScoreMatrix, layer: LayerSpec) -> List[str]:
    metric = layer.metric
    if not metric.is_filter:
        raise ContractError(f"layer {layer.label}: {metric.kind} is not a filter metric")
    mode = FilterMode.all() if metric.kind == "all" else FilterMode.at_least(metric.k)
    return hard_filter(docs, matrix, layer.thoughts, mode)


def apply_optimal_metric(docs: Sequence[str], matrix: ScoreMatrix, layer: LayerSpec) -> List[str]:
    metric = layer.metric
    if not metric.is_optimal:
        raise ContractError(f"layer {layer.label}: {metric.kind} is not an optimal-selection metric")
    if not docs:
        return []
    if metric.kind == "locally-better":
        return maximal_set(list(docs), matrix, layer.hierarchy)
    if metric.requires_binary:
        _require_binary(layer, matrix, docs)
    survivors = list(docs)
    for level in layer.levels:
        values = {d: _level_value(matrix, d, level, metric.kind) for d in survivors}
        best = max(values.values())
        survivors = [d for d in survivors if values[d] == best]
    return survivors


def apply_rank_metric(docs: Sequence[str], matrix: ScoreMatrix, layer: LayerSpec) -> MetricOutcome:
    """Score every input, order descending (stable) and cut at ``top``."""

    metric = layer.metric
    if not metric.is_rank:
        raise ContractError(f"layer {layer.label}: {metric.kind} is not a rank metric")
    if metric.requires_binary:
        _require_binary(layer, matrix, docs)
    keyed = [(d, rank_key(matrix, d, layer)) for d in docs]
    ordered = sorted(keyed, key=lambda pair: tuple(-v for v in pair[1]))
    kept = ordered if metric.top is None else ordered[:metric.top]
    truncated = len(kept) < len(ordered) and kept[-1][1] == ordered[len(kept)][1]
    return MetricOutcome(tuple(d for d, _ in kept), tuple(ordered), truncated)


def apply_metric(docs: Sequence[str], matrix: ScoreMatrix, layer: LayerSpec) -> MetricOutcome:
    if layer.metric.is_filter:
        return MetricOutcome(tuple(apply_filter_metric(docs, matrix, layer)))
    if layer.metric.is_optimal:
        return MetricOutcome(tuple(apply_optimal_metric(docs, matrix, layer)))
    return apply_rank_metric(docs, matrix, layer)


def dense_tiers(ranking: Sequence[Tuple[str, RankKey]]) -> Dict[str, int]:
    """Depth per document: 0 for the best key, +1 at every change of key."""

    depths: Dict[str, int] = {}
    depth = -1
    previous: Optional[RankKey] = None
    for doc, key in ranking:
        if key != previous:
            depth += 1
            previous = key
        depths[doc] = depth
    return depths
