"""Layer specifications: metric, level-partitioned thoughts and comparator."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

from ..common import ConfigurationError
from ..core.hierarchy import ComparatorSpec, Hierarchy, OptionThought, Slot

FILTER_METRICS = ("all", "at-least-k")
OPTIMAL_METRICS = ("locally-better", "max-count", "max-weight")
RANK_METRICS = ("rank-count", "rank-weight")
METRIC_KINDS = FILTER_METRICS + OPTIMAL_METRICS + RANK_METRICS

Levels = Tuple[Tuple[OptionThought, ...], ...]


@dataclass(frozen=True)
class AggregationMetric:
    kind: str
    k: int = 0
    top: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in METRIC_KINDS:
            raise ConfigurationError(f"unknown aggregation metric {self.kind!r}")
        if self.kind == "at-least-k" and self.k < 1:
            raise ConfigurationError("at-least-k needs a positive k")
        if self.kind != "at-least-k" and self.k:
            raise ConfigurationError(f"metric {self.kind} takes no k")
        if self.top is not None:
            if self.kind not in RANK_METRICS:
                raise ConfigurationError(f"metric {self.kind} takes no top")
            if self.top < 1:
                raise ConfigurationError("top must be a positive integer")

    @property
    def is_filter(self) -> bool:
        return self.kind in FILTER_METRICS

    @property
    def is_optimal(self) -> bool:
        return self.kind in OPTIMAL_METRICS

    @property
    def is_rank(self) -> bool:
        return self.kind in RANK_METRICS

    @property
    def requires_binary(self) -> bool:
        return self.kind in ("max-count", "rank-count")

    @property
    def label(self) -> str:
        if self.kind == "at-least-k":
            return f"at-least-{self.k}"
        if self.top is not None:
            return f"{self.kind}(top {self.top})"
        return self.kind

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind}
        if self.k:
            out["k"] = self.k
        if self.top is not None:
            out["top"] = self.top
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AggregationMetric":
        return cls(data["kind"], int(data.get("k", 0)), data.get("top"))


@dataclass(frozen=True)
class GenerateSpec:
    """Option thoughts proposed by the model at run time."""

    template: str
    count: int
    levels: int = 1
    binary: bool = True
    provider: Mapping[str, Any] = field(default_factory=dict)
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.template not in ("suggest-keywords", "suggest-criteria"):
            raise ConfigurationError(f"generate uses suggest-keywords or suggest-criteria, not {self.template!r}")
        if self.count < 1 or self.levels < 1 or self.levels > self.count:
            raise ConfigurationError("generate needs 1 <= levels <= count")


@dataclass(frozen=True)
class LayerSpec:
    index: int
    levels: Levels
    metric: AggregationMetric
    comparator: ComparatorSpec = ComparatorSpec()
    name: str = ""
    retries: int = 1
    refine: Optional[Any] = field(default=None, compare=False)
    generate: Optional[GenerateSpec] = None

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ConfigurationError("layer index must be positive")
        if self.retries < 0:
            raise ConfigurationError(f"layer {self.label}: retry budget must be non-negative")
        if not self.levels and self.generate is None:
            raise ConfigurationError(f"layer {self.label} declares no thoughts")
        for position, level in enumerate(self.levels, start=1):
            if not level:
                raise ConfigurationError(f"layer {self.label}: level {position} is empty")
            for thought in level:
                if (thought.layer, thought.level) != (self.index, position):
                    raise ConfigurationError(
                        f"layer {self.label}: thought {thought.id!r} declares layer {thought.layer} "
                        f"level {thought.level}, expected layer {self.index} level {position}"
                    )
        if self.levels and self.metric.kind == "at-least-k" and self.metric.k > len(self.thoughts):
            raise ConfigurationError(
                f"layer {self.label}: at-least-{self.metric.k} over {len(self.thoughts)} thoughts"
            )

    @property
    def label(self) -> str:
        return self.name or f"L{self.index}"

    @property
    def thoughts(self) -> Tuple[OptionThought, ...]:
        return tuple(t for level in self.levels for t in level)

    @property
    def hierarchy(self) -> Hierarchy:
        return Hierarchy(tuple(
            Slot(self.index, position, level, self.comparator) for position, level in enumerate(self.levels, start=1)
        ))

    def with_levels(self, levels: Sequence[Sequence[OptionThought]]) -> "LayerSpec":
        return replace(self, levels=place_levels(levels, self.index), generate=None)

    def reindexed(self, index: int) -> "LayerSpec":
        if index == self.index:
            return self
        return replace(self, index=index, levels=place_levels(self.levels, index))


def place_levels(levels: Sequence[Sequence[OptionThought]], index: int) -> Levels:
    """Stamp each thought with its layer index and level position."""

    return tuple(
        tuple(replace(t, layer=index, level=position) for t in level)
        for position, level in enumerate(levels, start=1)
    )


def split_levels(items: Sequence[Any], count: int) -> Tuple[Tuple[Any, ...], ...]:
    """Cut an importance-ordered list into ``count`` consecutive, near-equal levels."""

    count = max(1, min(count, len(items)))
    size, extra = divmod(len(items), count)
    out = []
    start = 0
    for position in range(count):
        end = start + size + (1 if position < extra else 0)
        out.append(tuple(items[start:end]))
        start = end
    return tuple(out)
