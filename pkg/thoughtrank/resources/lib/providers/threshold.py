"""Binary wrapper turning a graded inner score into pass/fail."""
from __future__ import annotations

from dataclasses import replace
from typing import TYPE_CHECKING

from ..core.hierarchy import OptionThought
from ..corpus import Document
from .base import ProviderBinding

if TYPE_CHECKING:
    from .base import ProviderRegistry


def score_threshold(inner: float, tau: float) -> float:
    return 1.0 if inner >= tau else 0.0


class ThresholdProvider:
    """Scores the inner binding through the registry, then applies ``tau``."""

    def __init__(self, registry: "ProviderRegistry") -> None:
        self.registry = registry

    def score(self, doc: Document, thought: OptionThought, query: str, binding: ProviderBinding) -> float:
        # the inner score is graded even though the wrapped thought is binary
        inner = self.registry.score_binding(doc, replace(thought, binary=False), query, binding.inner)
        return score_threshold(inner, float(binding.params["tau"]))
