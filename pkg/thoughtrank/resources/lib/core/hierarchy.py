"""Constraint-hierarchy comparison over document relevance scores.

Scores are merit oriented throughout: a higher relevance score is better.
Error-oriented criteria are expected to be negated (or inverted) by the
provider that produces them, so every comparator below is stated once.

A :class:`Hierarchy` is the flattened sequence of thought-sets
``<T1_1, ..., T1_m1, ..., Tn_mn>``; each slot carries the level comparator
used to compare two documents on that slot alone.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from ..common import ConfigurationError, ContractError, ThoughtRankError


class IncompleteMatrixError(ThoughtRankError):
    category = "contract"

    def __init__(self, doc: str, thought: str) -> None:
        self.doc = doc
        self.thought = thought
        super().__init__(f"no score for document {doc!r} on thought {thought!r}")


class ConsistencyError(ThoughtRankError):
    """Raised when a result contradicts the ordering semantics."""


class PartialOrdering(enum.Enum):
    BETTER = "better"
    WORSE = "worse"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"

    def flipped(self) -> "PartialOrdering":
        if self is PartialOrdering.BETTER:
            return PartialOrdering.WORSE
        if self is PartialOrdering.WORSE:
            return PartialOrdering.BETTER
        return self


class Aggregator(enum.Enum):
    WEIGHTED_SUM = "weighted-sum"
    WORST_CASE = "worst-case"
    LEAST_SQUARES = "least-squares"


@dataclass(frozen=True)
class ComparatorSpec:
    """Level comparator: ``local`` (componentwise) or ``global`` with an aggregator.

    ``tolerance`` is an absolute slack for float scores; ``0`` means exact.
    """

    kind: str = "local"
    aggregator: Optional[Aggregator] = None
    tolerance: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("local", "global"):
            raise ConfigurationError(f"unknown comparator kind {self.kind!r}")
        if self.kind == "global" and self.aggregator is None:
            raise ConfigurationError("a global comparator needs an aggregator")
        if self.kind == "local" and self.aggregator is not None:
            raise ConfigurationError("a local comparator takes no aggregator")
        if self.tolerance < 0:
            raise ConfigurationError("tolerance must be non-negative")

    @classmethod
    def local(cls, tolerance: float = 0.0) -> "ComparatorSpec":
        return cls("local", None, tolerance)

    @classmethod
    def global_(cls, aggregator: Aggregator, tolerance: float = 0.0) -> "ComparatorSpec":
        return cls("global", aggregator, tolerance)

    @property
    def is_global(self) -> bool:
        return self.kind == "global"

    @property
    def label(self) -> str:
        return "locally-better" if self.kind == "local" else f"{self.aggregator.value}-better"


@dataclass(frozen=True)
class OptionThought:
    """One criterion. ``level`` 1 is the strongest level of its layer."""

    id: str
    layer: int = 1
    level: int = 1
    weight: float = 1.0
    criterion: str = ""
    binary: bool = False
    provider: Optional[Any] = field(default=None, compare=False, hash=False)

    def __post_init__(self) -> None:
        if not self.id:
            raise ConfigurationError("thought id must be a non-empty string")
        if self.layer < 1 or self.level < 1:
            raise ConfigurationError(f"thought {self.id!r}: layer and level must be positive")
        if self.weight < 0 or math.isnan(self.weight):
            raise ConfigurationError(f"thought {self.id!r}: weight must be non-negative")


@dataclass(frozen=True)
class Slot:
    layer: int
    level: int
    thoughts: Tuple[OptionThought, ...]
    comparator: ComparatorSpec = ComparatorSpec()

    @property
    def thought_ids(self) -> Tuple[str, ...]:
        return tuple(t.id for t in self.thoughts)


@dataclass(frozen=True)
class Hierarchy:
    slots: Tuple[Slot, ...]

    def __post_init__(self) -> None:
        seen = set()
        previous = (0, 0)
        for slot in self.slots:
            if not slot.thoughts:
                raise ConfigurationError(f"empty level {slot.level} in layer {slot.layer}")
            position = (slot.layer, slot.level)
            if position <= previous:
                raise ConfigurationError(f"slot {position} out of layer-major, level-minor order")
            previous = position
            for thought in slot.thoughts:
                if thought.id in seen:
                    raise ConfigurationError(f"duplicate thought id {thought.id!r}")
                seen.add(thought.id)

    def __len__(self) -> int:
        return len(self.slots)

    def __iter__(self) -> Iterator[Slot]:
        return iter(self.slots)

    def prefix(self, count: int) -> "Hierarchy":
        return Hierarchy(self.slots[:count])

    @property
    def thoughts(self) -> Tuple[OptionThought, ...]:
        return tuple(t for slot in self.slots for t in slot.thoughts)

    @property
    def thought_ids(self) -> Tuple[str, ...]:
        return tuple(t.id for t in self.thoughts)


class ScoreMatrix:
    """Immutable mapping ``(document id, thought id) -> non-negative score``."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Optional[Mapping[Tuple[str, str], float]] = None) -> None:
        checked: Dict[Tuple[str, str], float] = {}
        for key, value in (entries or {}).items():
            score = float(value)
            if math.isnan(score) or score < 0 or math.isinf(score):
                raise ContractError(f"score for {key!r} must be a finite non-negative number, got {value!r}")
            checked[key] = score
        self._entries = checked

    def get(self, doc: str, thought: str) -> float:
        try:
            return self._entries[(doc, thought)]
        except KeyError:
            raise IncompleteMatrixError(doc, thought) from None

    def __contains__(self, key: Tuple[str, str]) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScoreMatrix) and self._entries == other._entries

    def items(self) -> Iterable[Tuple[Tuple[str, str], float]]:
        return self._entries.items()

    def row(self, doc: str, thoughts: Iterable[OptionThought]) -> Tuple[float, ...]:
        return tuple(self.get(doc, t.id) for t in thoughts)

    def merged(self, other: "ScoreMatrix") -> "ScoreMatrix":
        entries = dict(self._entries)
        entries.update(other._entries)
        return ScoreMatrix(entries)

    def restricted(self, docs: Iterable[str], thoughts: Iterable[OptionThought]) -> "ScoreMatrix":
        thought_ids = [t.id for t in thoughts]
        entries = self._entries
        return ScoreMatrix({(d, t): entries[(d, t)] for d in docs for t in thought_ids if (d, t) in entries})

    def check_binary(self, thoughts: Iterable[OptionThought]) -> None:
        binary = {t.id for t in thoughts if t.binary}
        for (doc, thought), score in self._entries.items():
            if thought in binary and score not in (0.0, 1.0):
                raise ContractError(f"binary thought {thought!r} scored {score} for document {doc!r}")

    def nested(self) -> Dict[str, Dict[str, float]]:
        """Return ``{doc: {thought: score}}`` with keys in insertion order."""

        out: Dict[str, Dict[str, float]] = {}
        for (doc, thought), score in self._entries.items():
            out.setdefault(doc, {})[thought] = score
        return out

    @classmethod
    def from_nested(cls, rows: Mapping[str, Mapping[str, float]]) -> "ScoreMatrix":
        return cls({(doc, thought): score for doc, row in rows.items() for thought, score in row.items()})


def aggregate_slot(matrix: ScoreMatrix, doc: str, slot: Sequence[OptionThought], aggregator: Aggregator) -> float:
    weighted = [(t.weight, matrix.get(doc, t.id)) for t in slot]
    if aggregator is Aggregator.WEIGHTED_SUM:
        return sum(w * s for w, s in weighted)
    if aggregator is Aggregator.WORST_CASE:
        return min((w * s for w, s in weighted), default=0.0)
    if aggregator is Aggregator.LEAST_SQUARES:
        return sum(w * s * s for w, s in weighted)
    raise ConfigurationError(f"unknown aggregator {aggregator!r}")


def _compare_values(a: float, b: float, tolerance: float) -> int:
    if abs(a - b) <= tolerance:
        return 0
    return 1 if a > b else -1


def level_compare(
    matrix: ScoreMatrix, a: str, b: str, slot: Sequence[OptionThought], spec: ComparatorSpec
) -> PartialOrdering:
    if spec.is_global:
        outcome = _compare_values(
            aggregate_slot(matrix, a, slot, spec.aggregator),
            aggregate_slot(matrix, b, slot, spec.aggregator),
            spec.tolerance,
        )
        if outcome > 0:
            return PartialOrdering.BETTER
        if outcome < 0:
            return PartialOrdering.WORSE
        return PartialOrdering.EQUIVALENT

    some_better = some_worse = False
    for thought in slot:
        outcome = _compare_values(matrix.get(a, thought.id), matrix.get(b, thought.id), spec.tolerance)
        if outcome > 0:
            some_better = True
        elif outcome < 0:
            some_worse = True
    if some_better and some_worse:
        return PartialOrdering.INCOMPARABLE
    if some_better:
        return PartialOrdering.BETTER
    if some_worse:
        return PartialOrdering.WORSE
    return PartialOrdering.EQUIVALENT


def hierarchical_compare(matrix: ScoreMatrix, a: str, b: str, hierarchy: Hierarchy) -> PartialOrdering:
    """Compare level by level; the first non-equivalent slot decides."""

    for slot in hierarchy.slots:
        outcome = level_compare(matrix, a, b, slot.thoughts, slot.comparator)
        if outcome is not PartialOrdering.EQUIVALENT:
            return outcome
    return PartialOrdering.EQUIVALENT


def flatten(
    layers: Sequence[Sequence[Sequence[OptionThought]]],
    comparators: Optional[Sequence[ComparatorSpec]] = None,
) -> Hierarchy:
    """Turn the nested hierarchy ``<<T1_1..>, <T2_1..>, ..>`` into the flat one.

    ``comparators`` gives one level comparator per layer (default: local).
    """

    slots = []
    seen: Dict[str, Tuple[int, int]] = {}
    for layer_index, levels in enumerate(layers, start=1):
        comparator = comparators[layer_index - 1] if comparators else ComparatorSpec.local()
        for level_index, thoughts in enumerate(levels, start=1):
            if not thoughts:
                raise ConfigurationError(f"empty level {level_index} in layer {layer_index}")
            for thought in thoughts:
                if thought.id in seen:
                    first = seen[thought.id]
                    raise ConfigurationError(
                        f"thought {thought.id!r} listed at layer {first[0]} level {first[1]} "
                        f"and again at layer {layer_index} level {level_index}"
                    )
                if (thought.layer, thought.level) != (layer_index, level_index):
                    raise ConfigurationError(
                        f"thought {thought.id!r} declares layer {thought.layer} level {thought.level} "
                        f"but is placed at layer {layer_index} level {level_index}"
                    )
                seen[thought.id] = (layer_index, level_index)
            slots.append(Slot(layer_index, level_index, tuple(thoughts), comparator))
    return Hierarchy(tuple(slots))
