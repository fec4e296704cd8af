"""Pipeline traces: what every layer saw, scored, kept and retried.

A trace is enough to re-derive each layer's survivors without any provider,
and to rebuild explanations for the final output after the run.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from ..common import ConfigurationError, ContractError
from ..core.explain import Explanation, explain_excluded, explain_included
from ..core.hierarchy import (
    Aggregator,
    ComparatorSpec,
    ConsistencyError,
    Hierarchy,
    OptionThought,
    ScoreMatrix,
)
from ..core.ranking import RankedOutput, top_k
from ..providers.base import ProviderBinding
from .layers import AggregationMetric, LayerSpec
from .metrics import RankKey, apply_metric


@dataclass(frozen=True)
class BacktrackEvent:
    attempt: int
    criteria: Tuple[str, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"attempt": self.attempt, "criteria": list(self.criteria)}


@dataclass(frozen=True)
class LayerRecord:
    """One executed layer; ``levels`` and ``matrix`` are from the final attempt."""

    index: int
    name: str
    metric: AggregationMetric
    comparator: ComparatorSpec
    inputs: Tuple[str, ...]
    levels: Tuple[Tuple[OptionThought, ...], ...]
    matrix: ScoreMatrix
    survivors: Tuple[str, ...]
    ranking: Tuple[Tuple[str, RankKey], ...] = ()
    backtracks: Tuple[BacktrackEvent, ...] = ()
    flagged: bool = False
    truncated: bool = False

    @property
    def spec(self) -> LayerSpec:
        return LayerSpec(self.index, self.levels, self.metric, self.comparator, self.name, retries=0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "name": self.name,
            "metric": self.metric.to_dict(),
            "comparator": comparator_to_dict(self.comparator),
            "inputs": list(self.inputs),
            "levels": [[thought_to_dict(t) for t in level] for level in self.levels],
            "scores": self.matrix.nested(),
            "survivors": list(self.survivors),
            "ranking": [[doc, list(key)] for doc, key in self.ranking],
            "backtracks": [event.to_dict() for event in self.backtracks],
            "flagged": self.flagged,
            "truncated": self.truncated,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "LayerRecord":
        index = int(data["index"])
        levels = tuple(
            tuple(thought_from_dict(t, index, position) for t in level)
            for position, level in enumerate(data["levels"], start=1)
        )
        return cls(
            index=index,
            name=data.get("name", ""),
            metric=AggregationMetric.from_dict(data["metric"]),
            comparator=comparator_from_dict(data.get("comparator", {})),
            inputs=tuple(data["inputs"]),
            levels=levels,
            matrix=ScoreMatrix.from_nested(data.get("scores", {})),
            survivors=tuple(data["survivors"]),
            ranking=tuple((doc, tuple(float(v) for v in key)) for doc, key in data.get("ranking", [])),
            backtracks=tuple(
                BacktrackEvent(int(e["attempt"]), tuple(e.get("criteria", []))) for e in data.get("backtracks", [])
            ),
            flagged=bool(data.get("flagged", False)),
            truncated=bool(data.get("truncated", False)),
        )


@dataclass
class PipelineTrace:
    query: str
    layers: List[LayerRecord] = field(default_factory=list)
    output: Optional[RankedOutput] = None
    error: Optional[str] = None

    @property
    def matrix(self) -> ScoreMatrix:
        merged = ScoreMatrix()
        for record in self.layers:
            merged = merged.merged(record.matrix)
        return merged

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"query": self.query, "layers": [r.to_dict() for r in self.layers]}
        if self.output is not None:
            out["output"] = {
                "survivors": list(self.output.survivors),
                "depths": dict(self.output.depths),
                "k": self.output.k,
                "considered": list(self.output.considered),
            }
        if self.error is not None:
            out["error"] = self.error
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PipelineTrace":
        try:
            layers = [LayerRecord.from_dict(r) for r in data.get("layers", [])]
            output = None
            if data.get("output") is not None:
                raw = data["output"]
                output = RankedOutput(
                    tuple(raw["survivors"]), dict(raw["depths"]), int(raw["k"]), tuple(raw.get("considered", ()))
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed trace: {exc!r}") from None
        return cls(data.get("query", ""), layers, output, data.get("error"))

    @classmethod
    def load(cls, path: str) -> "PipelineTrace":
        try:
            with open(path, "r", encoding="utf-8") as stream:
                data = json.load(stream)
        except OSError as exc:
            raise ConfigurationError(f"cannot read trace: {exc.strerror or exc}", path=path) from None
        except ValueError as exc:
            raise ConfigurationError(f"trace is not valid JSON: {exc}", path=path) from None
        return cls.from_dict(data)


def comparator_to_dict(spec: ComparatorSpec) -> Dict[str, Any]:
    out: Dict[str, Any] = {"kind": spec.kind}
    if spec.aggregator is not None:
        out["aggregator"] = spec.aggregator.value
    if spec.tolerance:
        out["tolerance"] = spec.tolerance
    return out


def comparator_from_dict(data: Mapping[str, Any]) -> ComparatorSpec:
    aggregator = data.get("aggregator")
    try:
        return ComparatorSpec(
            data.get("kind", "local"),
            Aggregator(aggregator) if aggregator is not None else None,
            float(data.get("tolerance", 0.0)),
        )
    except ValueError:
        raise ConfigurationError(f"unknown aggregator {aggregator!r}") from None


def thought_to_dict(thought: OptionThought) -> Dict[str, Any]:
    out: Dict[str, Any] = {"id": thought.id, "weight": thought.weight, "binary": thought.binary}
    if thought.criterion:
        out["criterion"] = thought.criterion
    if isinstance(thought.provider, ProviderBinding):
        out["provider"] = thought.provider.to_dict()
    return out


def thought_from_dict(data: Mapping[str, Any], layer: int, level: int) -> OptionThought:
    provider = ProviderBinding.from_dict(data["provider"]) if data.get("provider") else None
    return OptionThought(
        str(data["id"]),
        layer,
        level,
        float(data.get("weight", 1.0)),
        data.get("criterion", ""),
        bool(data.get("binary", False)),
        provider,
    )


def replay_trace(trace: PipelineTrace) -> List[Tuple[str, ...]]:
    """Re-apply each recorded matrix through the recorded metric.

    A graded score recorded for a binary thought is a ``ContractError``.
    """

    survivors = []
    for record in trace.layers:
        spec = record.spec
        record.matrix.check_binary(spec.thoughts)
        survivors.append(apply_metric(record.inputs, record.matrix, spec).survivors)
    return survivors


def verify_trace(trace: PipelineTrace) -> None:
    replayed = replay_trace(trace)
    for position, (record, survivors) in enumerate(zip(trace.layers, replayed)):
        if survivors != record.survivors:
            raise ConsistencyError(
                f"layer {record.name or record.index}: replay kept {list(survivors)}, trace recorded "
                f"{list(record.survivors)}"
            )
        if position + 1 < len(trace.layers) and trace.layers[position + 1].inputs != record.survivors:
            raise ConsistencyError(f"layer {record.name or record.index}: survivors differ from next layer's inputs")


def soft_hierarchy(records: Sequence[LayerRecord]) -> Optional[Hierarchy]:
    """Slots of every selection or rank layer; filter layers hold hard thoughts."""

    slots = [slot for r in records if not r.metric.is_filter for slot in r.spec.hierarchy.slots]
    return Hierarchy(tuple(slots)) if slots else None


def hard_thoughts(records: Sequence[LayerRecord]) -> Tuple[OptionThought, ...]:
    return tuple(t for r in records if r.metric.is_filter for level in r.levels for t in level)


def explanation_ranking(trace: PipelineTrace) -> Tuple[Optional[Hierarchy], Optional[RankedOutput]]:
    """Depth map over the inputs of the last soft layer, under all soft slots.

    Those inputs passed every earlier layer, so they are scored on every
    soft thought.
    """

    hierarchy = soft_hierarchy(trace.layers)
    if hierarchy is None or trace.output is None:
        return hierarchy, None
    last_soft = [r for r in trace.layers if not r.metric.is_filter][-1]
    considered = list(last_soft.inputs)
    matrix = trace.matrix
    full = top_k(considered, matrix, hierarchy, max(len(considered), 1))
    survivors = [d for d in trace.output.survivors if d in full.depths]
    k = max((full.depths[d] for d in survivors), default=0) + 1
    return hierarchy, top_k(considered, matrix, hierarchy, k)


def explain_trace(trace: PipelineTrace) -> Dict[str, Explanation]:
    """Inclusion explanation for every document of the final output."""

    if trace.output is None:
        return {}
    matrix = trace.matrix
    hard = hard_thoughts(trace.layers)
    hierarchy, ranked = explanation_ranking(trace)
    out: Dict[str, Explanation] = {}
    for doc in trace.output.survivors:
        if hierarchy is None or ranked is None:
            hard_ids = tuple(t.id for t in hard if (doc, t.id) in matrix and matrix.get(doc, t.id) > 0)
            out[doc] = Explanation(subject=doc, kind="included", slots=(), k=1, fallback=True, hard=hard_ids)
            continue
        out[doc] = explain_included(matrix, doc, ranked.k, ranked, hierarchy, hard)
    return out


def explain_document(trace: PipelineTrace, doc: str) -> Explanation:
    """Inclusion explanation for an output document, exclusion otherwise."""

    if trace.output is not None and doc in trace.output.survivors:
        return explain_trace(trace)[doc]
    hierarchy, ranked = explanation_ranking(trace)
    if hierarchy is None or ranked is None or doc not in ranked.considered:
        raise ContractError(f"document {doc!r} did not reach the selection layers; no witness can be derived")
    return explain_excluded(trace.matrix, doc, ranked.k, ranked, hierarchy)
