"""Pipeline configuration: JSON document validated against the shipped schema."""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from ..common import ConfigurationError, Globals
from ..core.hierarchy import ComparatorSpec, OptionThought
from ..perf import get_logger
from ..providers.base import ProviderBinding
from ..providers.chat import ChatSettings
from ..providers.templates import YES_NO, get_template
from .layers import AggregationMetric, GenerateSpec, LayerSpec
from .refinement import ChatRefinement, StaticRefinement
from .trace import comparator_from_dict


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Config] {message}")


@lru_cache(maxsize=1)
def _validator() -> Draft202012Validator:
    with open(Globals().SCHEMA_PATH, "r", encoding="utf-8") as stream:
        schema = json.load(stream)
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def json_path(parts: Sequence[Any]) -> str:
    out = "$"
    for part in parts:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def validate_document(data: Any, source: str = "<config>") -> None:
    error = best_match(_validator().iter_errors(data))
    if error is not None:
        raise ConfigurationError(f"{json_path(error.absolute_path)}: {error.message}", path=source)


@dataclass(frozen=True)
class PipelineConfig:
    layers: Tuple[LayerSpec, ...]
    query: str = ""
    corpus: Optional[str] = None
    scores: Optional[str] = None
    transcripts: Optional[str] = None
    mode: str = "live"
    top_k: Optional[int] = None
    parallelism: Optional[int] = None
    chat: Optional[ChatSettings] = None
    source: str = ""
    raw: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @property
    def bindings(self) -> List[ProviderBinding]:
        found: List[ProviderBinding] = []
        for layer in self.layers:
            thoughts = list(layer.thoughts)
            if isinstance(layer.refine, StaticRefinement):
                thoughts += [t for alt in layer.refine.alternatives for level in alt for t in level]
            for thought in thoughts:
                binding = thought.provider
                while binding is not None:
                    found.append(binding)
                    binding = binding.inner
        return found

    @property
    def uses_table(self) -> bool:
        return any(b.kind == "table" for b in self.bindings)

    @property
    def uses_chat(self) -> bool:
        return (
            any(b.kind == "chat" for b in self.bindings)
            or any(layer.generate is not None or isinstance(layer.refine, ChatRefinement) for layer in self.layers)
        )

    def restricted(self, keep: Sequence[str]) -> "PipelineConfig":
        """Only the named layers, in configured order (layer ablations)."""

        names = {layer.label for layer in self.layers}
        unknown = [name for name in keep if name not in names]
        if unknown:
            raise ConfigurationError(
                f"unknown layer name(s) {', '.join(unknown)}; configured: {', '.join(sorted(names))}")
        kept = [layer for layer in self.layers if layer.label in keep]
        return replace(self, layers=tuple(layer.reindexed(i) for i, layer in enumerate(kept, start=1)))


def _resolve(base_dir: str, value: Optional[str]) -> Optional[str]:
    if not value:
        return None
    return value if os.path.isabs(value) else os.path.normpath(os.path.join(base_dir, value))


def _binding_is_binary(binding: ProviderBinding) -> bool:
    if binding.is_binary:
        return True
    return binding.kind == "chat" and get_template(binding.params["template"]).contract == YES_NO


def _thought(entry: Mapping[str, Any], layer: int, level: int) -> OptionThought:
    binding = ProviderBinding.from_dict(entry["provider"])
    if binding.kind == "chat":
        get_template(binding.params["template"])
    return OptionThought(
        id=entry["id"],
        layer=layer,
        level=level,
        weight=float(entry.get("weight", 1.0)),
        criterion=entry.get("criterion", ""),
        binary=bool(entry.get("binary", _binding_is_binary(binding))),
        provider=binding,
    )


def _levels(raw_levels: Sequence[Sequence[Mapping[str, Any]]], layer: int) -> Tuple[Tuple[OptionThought, ...], ...]:
    return tuple(
        tuple(_thought(entry, layer, position) for entry in level) for position, level in enumerate(raw_levels, start=1)
    )


def _layer(entry: Mapping[str, Any], index: int, comparator: Optional[ComparatorSpec]) -> LayerSpec:
    metric = AggregationMetric.from_dict(entry["metric"])
    levels = _levels(entry.get("levels", []), index)
    refine = None
    if "refine" in entry:
        spec = entry["refine"]
        if spec["kind"] == "static":
            refine = StaticRefinement(tuple(_levels(alt, index) for alt in spec["alternatives"]))
        else:
            refine = ChatRefinement(model=spec.get("model"))
    generate = None
    if "generate" in entry:
        g = entry["generate"]
        generate = GenerateSpec(
            template=g["template"],
            count=int(g["count"]),
            levels=int(g.get("levels", 1)),
            binary=bool(g.get("binary", True)),
            provider=dict(g.get("provider", {})),
            weight=float(g.get("weight", 1.0)),
        )
    layer_comparator = comparator_from_dict(entry["comparator"]) if "comparator" in entry else None
    return LayerSpec(
        index=index,
        levels=levels,
        metric=metric,
        comparator=layer_comparator or comparator or ComparatorSpec.local(),
        name=entry.get("name", ""),
        retries=int(entry.get("retries", 1)),
        refine=refine,
        generate=generate,
    )


def _check_unique_ids(layers: Sequence[LayerSpec], source: str) -> None:
    seen: Dict[str, str] = {}
    names: Dict[str, int] = {}
    for layer in layers:
        if layer.label in names:
            raise ConfigurationError(f"layer name {layer.label!r} used twice", path=source)
        names[layer.label] = layer.index
        own = list(layer.thoughts)
        if isinstance(layer.refine, StaticRefinement):
            own += [t for alt in layer.refine.alternatives for level in alt for t in level]
        for thought in own:
            owner = seen.get(thought.id)
            if owner is not None and owner != layer.label:
                raise ConfigurationError(f"thought id {thought.id!r} appears in layers {owner} and {layer.label}",
                                         path=source)
            seen[thought.id] = layer.label
        ids = [t.id for t in layer.thoughts]
        for thought in layer.thoughts:
            if ids.count(thought.id) > 1:
                raise ConfigurationError(f"thought id {thought.id!r} repeated in layer {layer.label}", path=source)


def parse_config(data: Any, base_dir: str = ".", source: str = "<config>") -> PipelineConfig:
    validate_document(data, source)
    try:
        default_comparator = comparator_from_dict(data["comparator"]) if "comparator" in data else None
        layers = tuple(_layer(entry, i, default_comparator) for i, entry in enumerate(data["layers"], start=1))
        chat = ChatSettings.from_dict(data["chat"]) if "chat" in data else None
    except ConfigurationError as exc:
        raise ConfigurationError(str(exc), path=source) from None
    _check_unique_ids(layers, source)
    query = data.get("query", "")
    query_file = _resolve(base_dir, data.get("query_file"))
    if query_file:
        try:
            with open(query_file, "r", encoding="utf-8") as stream:
                query = stream.read().strip()
        except OSError as exc:
            raise ConfigurationError(
                f"cannot read query file {query_file}: {exc.strerror or exc}", path=source) from None
    config = PipelineConfig(
        layers=layers,
        query=query,
        corpus=_resolve(base_dir, data.get("corpus")),
        scores=_resolve(base_dir, data.get("scores")),
        transcripts=_resolve(base_dir, data.get("transcripts")),
        mode=data.get("mode", "live"),
        top_k=data.get("top_k"),
        parallelism=data.get("parallelism"),
        chat=chat,
        source=source,
        raw=data,
    )
    if config.uses_chat and config.chat is None:
        raise ConfigurationError("chat bindings need a chat section", path=source)
    return config


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path, "r", encoding="utf-8") as stream:
            data = json.load(stream)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc.strerror or exc}", path=path) from None
    except ValueError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}", path=path) from None
    config = parse_config(data, os.path.dirname(os.path.abspath(path)), path)
    _log(logging.INFO, f"Loaded {len(config.layers)} layers from {path}")
    return config
