"""Refinement hooks invoked when a layer keeps no document."""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Protocol, Sequence, Tuple

from ..common import ConfigurationError
from ..core.hierarchy import OptionThought
from ..perf import get_logger
from ..providers.base import ProviderBinding
from ..providers.chat import ChatClient, suggest_lines
from ..providers.templates import get_template
from .layers import LayerSpec, split_levels


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Refine] {message}")


class RefinementHook(Protocol):
    def refine(self, layer: LayerSpec, attempt: int, query: str) -> Optional[LayerSpec]:
        ...


@dataclass(frozen=True)
class StaticRefinement:
    """Attempt ``n`` (1-based) swaps in alternative ``n``."""

    alternatives: Tuple[Tuple[Tuple[OptionThought, ...], ...], ...]

    def refine(self, layer: LayerSpec, attempt: int, query: str) -> Optional[LayerSpec]:
        if attempt > len(self.alternatives):
            return None
        return layer.with_levels(self.alternatives[attempt - 1])


@dataclass(frozen=True)
class ChatRefinement:
    """Asks the model for less restrictive wording of the failed criteria."""

    client: Optional[ChatClient] = None
    model: Optional[str] = None

    def bind(self, client: ChatClient) -> "ChatRefinement":
        return replace(self, client=client)

    def refine(self, layer: LayerSpec, attempt: int, query: str) -> Optional[LayerSpec]:
        if self.client is None:
            raise ConfigurationError(f"layer {layer.label}: chat refinement needs a chat model")
        failed = layer.thoughts
        criteria = "\n".join(f"- {t.criterion or t.id}" for t in failed)
        lines = suggest_lines(self.client, get_template("refine-criteria"), query, len(failed), criteria, self.model)
        _log(logging.INFO, f"Layer {layer.label}: {len(lines)} refined criteria for attempt {attempt + 1}")
        thoughts = [
            refined_thought(failed[min(i, len(failed) - 1)], f"{layer.label}.r{attempt}.{i + 1}", line)
            for i, line in enumerate(lines)
        ]
        return layer.with_levels(split_levels(thoughts, len(layer.levels)))


def refined_thought(template: OptionThought, thought_id: str, text: str) -> OptionThought:
    """Same provider kind as ``template`` with the criterion replaced."""

    binding = template.provider
    if isinstance(binding, ProviderBinding) and binding.kind == "keyword":
        binding = binding.with_params(keywords=[text])
    elif isinstance(binding, ProviderBinding) and binding.kind == "threshold" and binding.inner.kind == "keyword":
        binding = ProviderBinding("threshold", binding.params, binding.inner.with_params(keywords=[text]))
    return replace(template, id=thought_id, criterion=text, provider=binding)


def bind_refinements(layers: Sequence[LayerSpec], client: ChatClient) -> Tuple[LayerSpec, ...]:
    return tuple(
        replace(layer, refine=layer.refine.bind(client)) if isinstance(layer.refine, ChatRefinement) else layer
        for layer in layers
    )
