"""Relevance-score providers and the registry wiring them together."""
from __future__ import annotations

from typing import Optional, Sequence

from ..corpus import Document
from .base import KINDS, MissingEntryError, ProviderBinding, ProviderError, ProviderRegistry
from .bm25 import BM25Provider, CorpusStatistics, bm25_rank, score_bm25
from .chat import ChatClient, ChatProvider, ChatSettings, score_chat, suggest_lines
from .keyword import KeywordProvider, SynonymHook, score_keyword
from .table import ScoreFixture, TableProvider, score_table
from .templates import ResponseParseError, get_template
from .threshold import ThresholdProvider, score_threshold
from .transcripts import TranscriptStore, request_digest


def build_registry(
    corpus: Sequence[Document],
    fixture: Optional[ScoreFixture] = None,
    chat: Optional[ChatClient] = None,
    synonyms: Optional[SynonymHook] = None,
) -> ProviderRegistry:
    """Register every provider whose backing resource is available."""

    registry = ProviderRegistry()
    registry.register("keyword", KeywordProvider(synonyms))
    registry.register("threshold", ThresholdProvider(registry))
    if corpus:
        registry.register("bm25", BM25Provider(CorpusStatistics.build(corpus)))
    if fixture is not None:
        registry.register("table", TableProvider(fixture))
    if chat is not None:
        registry.register("chat", ChatProvider(chat))
    return registry


__all__ = [
    "KINDS",
    "BM25Provider",
    "ChatClient",
    "ChatProvider",
    "ChatSettings",
    "CorpusStatistics",
    "KeywordProvider",
    "MissingEntryError",
    "ProviderBinding",
    "ProviderError",
    "ProviderRegistry",
    "ResponseParseError",
    "ScoreFixture",
    "TableProvider",
    "ThresholdProvider",
    "TranscriptStore",
    "bm25_rank",
    "build_registry",
    "get_template",
    "request_digest",
    "score_bm25",
    "score_chat",
    "score_keyword",
    "score_table",
    "score_threshold",
    "suggest_lines",
]
