"""Normalized keyword matching for keyword-filter layers."""
from __future__ import annotations

import re
import unicodedata
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from ..core.hierarchy import OptionThought
from ..corpus import Document
from .base import ProviderBinding

_TOKEN = re.compile(r"\w+")

# keyword -> extra surface forms accepted for it
SynonymHook = Callable[[str], Iterable[str]]


def normalize(text: str) -> str:
    return unicodedata.normalize("NFKC", text).casefold()


def tokenize(text: str) -> List[str]:
    return _TOKEN.findall(normalize(text))


def _contains_run(tokens: Sequence[str], needle: Sequence[str]) -> bool:
    width = len(needle)
    if width == 0:
        return False
    return any(tuple(tokens[i:i + width]) == tuple(needle) for i in range(len(tokens) - width + 1))


def keyword_matches(text: str, keyword: str, mode: str = "token") -> bool:
    if mode == "substring":
        needle = normalize(keyword).strip()
        return bool(needle) and needle in normalize(text)
    return _contains_run(tokenize(text), tokenize(keyword))


def score_keyword(
    doc: Document,
    keywords: Sequence[str],
    mode: str = "token",
    synonyms: Optional[SynonymHook] = None,
) -> float:
    """1.0 when any keyword (or a synonym of it) occurs in the text."""

    if not doc.text:
        return 0.0
    for keyword in keywords:
        forms: Tuple[str, ...] = (keyword,) + tuple(synonyms(keyword) if synonyms else ())
        if any(keyword_matches(doc.text, form, mode) for form in forms):
            return 1.0
    return 0.0


class KeywordProvider:
    def __init__(self, synonyms: Optional[SynonymHook] = None) -> None:
        self.synonyms = synonyms

    def score(self, doc: Document, thought: OptionThought, query: str, binding: ProviderBinding) -> float:
        keywords = binding.params["keywords"]
        if isinstance(keywords, str):
            keywords = [keywords]
        return score_keyword(doc, keywords, binding.params.get("normalization", "token"), self.synonyms)
