"""Okapi BM25 over the run's corpus, used as provider and as baseline."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..common import ConfigurationError
from ..core.hierarchy import OptionThought
from ..corpus import Document
from ..perf import timed
from .base import ProviderBinding
from .keyword import tokenize

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

Reranker = Callable[[str, List[Tuple[Document, float]]], List[Tuple[Document, float]]]


@dataclass(frozen=True)
class CorpusStatistics:
    doc_count: int
    avg_length: float
    doc_freq: Dict[str, int] = field(default_factory=dict)
    term_freqs: Dict[str, Counter] = field(default_factory=dict)
    lengths: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, documents: Sequence[Document]) -> "CorpusStatistics":
        doc_freq: Counter = Counter()
        term_freqs: Dict[str, Counter] = {}
        lengths: Dict[str, int] = {}
        for doc in documents:
            tokens = tokenize(doc.text)
            counts = Counter(tokens)
            term_freqs[doc.id] = counts
            lengths[doc.id] = len(tokens)
            doc_freq.update(counts.keys())
        total = sum(lengths.values())
        avg = total / len(documents) if documents else 0.0
        return cls(len(documents), avg, dict(doc_freq), term_freqs, lengths)

    def idf(self, term: str) -> float:
        n = self.doc_freq.get(term, 0)
        return math.log(1.0 + (self.doc_count - n + 0.5) / (n + 0.5))


def score_bm25(
    stats: CorpusStatistics, query: str, doc: Document, k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> float:
    if stats.doc_count == 0:
        raise ConfigurationError("BM25 needs corpus statistics over at least one document")
    counts = stats.term_freqs.get(doc.id)
    if counts is None:
        counts = Counter(tokenize(doc.text))
        length = sum(counts.values())
    else:
        length = stats.lengths[doc.id]
    norm = 1.0 - b + b * (length / stats.avg_length) if stats.avg_length > 0 else 1.0
    score = 0.0
    for term in set(tokenize(query)):
        tf = counts.get(term, 0)
        if tf == 0:
            continue
        score += stats.idf(term) * (tf * (k1 + 1.0)) / (tf + k1 * norm)
    return score


@timed("bm25.rank", warn_threshold_ms=2000)
def bm25_rank(
    documents: Sequence[Document],
    query: str,
    top_k: int = 10,
    stats: Optional[CorpusStatistics] = None,
    rerank: Optional[Reranker] = None,
) -> List[Tuple[Document, float]]:
    """Top ``top_k`` documents by BM25, ties kept in corpus order.

    ``rerank`` receives the retrieved candidates and may reorder them.
    """

    stats = stats or CorpusStatistics.build(documents)
    scored = [(doc, score_bm25(stats, query, doc)) for doc in documents]
    ranked = sorted(scored, key=lambda pair: -pair[1])[:top_k]
    if rerank is not None:
        ranked = rerank(query, ranked)
    return ranked


class BM25Provider:
    """Scores against the thought's criterion text, or the query when it has none."""

    def __init__(self, stats: CorpusStatistics) -> None:
        self.stats = stats

    def score(self, doc: Document, thought: OptionThought, query: str, binding: ProviderBinding) -> float:
        text = binding.params.get("query") or thought.criterion or query
        return score_bm25(
            self.stats,
            text,
            doc,
            float(binding.params.get("k1", DEFAULT_K1)),
            float(binding.params.get("b", DEFAULT_B)),
        )
