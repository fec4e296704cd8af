"""Provider bindings, errors and the registry resolving them to scorers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Protocol

from ..common import ConfigurationError, ContractError, ThoughtRankError
from ..core.hierarchy import OptionThought
from ..corpus import Document

KINDS = ("table", "keyword", "threshold", "bm25", "chat")


class ProviderError(ThoughtRankError):
    category = "provider"


class MissingEntryError(ProviderError):
    def __init__(self, what: str, key: str) -> None:
        self.key = key
        super().__init__(f"missing {what} entry for {key}")


@dataclass(frozen=True)
class ProviderBinding:
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    inner: Optional["ProviderBinding"] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown provider kind {self.kind!r}")
        if self.kind == "threshold":
            if self.inner is None:
                raise ConfigurationError("threshold binding wraps exactly one inner binding")
            tau = self.params.get("tau")
            if not isinstance(tau, (int, float)) or tau < 0:
                raise ConfigurationError(f"threshold tau must be a non-negative number, got {tau!r}")
        elif self.inner is not None:
            raise ConfigurationError(f"{self.kind} binding takes no inner binding")
        if self.kind == "keyword":
            if not self.params.get("keywords"):
                raise ConfigurationError("keyword binding declares no keywords")
            if self.params.get("normalization", "token") not in ("token", "substring"):
                raise ConfigurationError(f"unknown keyword normalization {self.params.get('normalization')!r}")
        if self.kind == "chat" and not self.params.get("template"):
            raise ConfigurationError("chat binding needs a template id")

    @property
    def is_binary(self) -> bool:
        return self.kind in ("keyword", "threshold")

    def with_params(self, **updates: Any) -> "ProviderBinding":
        params = dict(self.params)
        params.update(updates)
        return ProviderBinding(self.kind, params, self.inner)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind}
        out.update(self.params)
        if self.inner is not None:
            out["inner"] = self.inner.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProviderBinding":
        params = {k: v for k, v in data.items() if k not in ("kind", "inner")}
        inner = cls.from_dict(data["inner"]) if data.get("inner") is not None else None
        return cls(data.get("kind", ""), params, inner)


class Provider(Protocol):
    def score(self, doc: Document, thought: OptionThought, query: str, binding: ProviderBinding) -> float:
        ...


class ProviderRegistry:
    """Resolves each thought's binding to the provider of its kind."""

    def __init__(self, providers: Optional[Mapping[str, Provider]] = None) -> None:
        self._providers: Dict[str, Provider] = dict(providers or {})

    def register(self, kind: str, provider: Provider) -> None:
        if kind not in KINDS:
            raise ConfigurationError(f"unknown provider kind {kind!r}")
        self._providers[kind] = provider

    def provider_for(self, binding: ProviderBinding) -> Provider:
        try:
            return self._providers[binding.kind]
        except KeyError:
            raise ConfigurationError(f"no provider registered for kind {binding.kind!r}") from None

    def check(self, thought: OptionThought) -> None:
        binding = thought.provider
        if not isinstance(binding, ProviderBinding):
            raise ConfigurationError(f"thought {thought.id!r} has no provider binding")
        self.provider_for(binding)
        if binding.kind == "threshold":
            self.provider_for(binding.inner)

    def score(self, doc: Document, thought: OptionThought, query: str) -> float:
        binding = thought.provider
        if not isinstance(binding, ProviderBinding):
            raise ConfigurationError(f"thought {thought.id!r} has no provider binding")
        value = self.score_binding(doc, thought, query, binding)
        if value < 0:
            raise ContractError(f"provider {binding.kind} returned negative score {value} for {doc.id!r}")
        if thought.binary and value not in (0.0, 1.0):
            raise ContractError(f"binary thought {thought.id!r} scored {value} for document {doc.id!r}")
        return value

    def score_binding(self, doc: Document, thought: OptionThought, query: str, binding: ProviderBinding) -> float:
        return float(self.provider_for(binding).score(doc, thought, query, binding))
