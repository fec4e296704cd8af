"""Option thoughts proposed by the model for a layer's conceptual step."""
from __future__ import annotations

import logging
from typing import List, Optional

from ..core.hierarchy import OptionThought
from ..perf import get_logger
from ..providers.base import ProviderBinding
from ..providers.chat import ChatClient, suggest_lines
from ..providers.templates import get_template
from .layers import LayerSpec, split_levels


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Initiate] {message}")


class ChatInitiator:
    """Turns a layer's ``generate`` section into concrete option thoughts.

    Keyword suggestions become one keyword binding per thought. Criteria
    suggestions become bindings of the configured provider (a ``criterion``
    chat judgement by default) with the suggestion as criterion text.
    """

    def __init__(self, client: ChatClient, model: Optional[str] = None) -> None:
        self.client = client
        self.model = model

    def __call__(self, layer: LayerSpec, query: str) -> LayerSpec:
        spec = layer.generate
        lines = suggest_lines(self.client, get_template(spec.template), query, spec.count, model=self.model)
        lines = lines[:spec.count]
        thoughts: List[OptionThought] = []
        for position, line in enumerate(lines, start=1):
            if spec.template == "suggest-keywords":
                binding = ProviderBinding("keyword", {"keywords": [line]})
            else:
                binding = ProviderBinding.from_dict(spec.provider or {"kind": "chat", "template": "criterion"})
            thoughts.append(OptionThought(
                f"{layer.label}.g{position}", layer.index, 1, spec.weight, line, spec.binary, binding
            ))
        _log(logging.INFO, f"Layer {layer.label}: generated {len(thoughts)} option thoughts")
        return layer.with_levels(split_levels(thoughts, spec.levels))
