"""Run-local score cache shared by the layer workers of one pipeline run.

Scores are keyed by document, thought id, criterion text and provider
binding, so a refined criterion is never served a stale score. Entries live
only as long as the cache object; nothing is persisted between runs.
"""

from __future__ import annotations

import json
import threading
from hashlib import sha1
from typing import Callable, Dict, Optional

from .core.hierarchy import OptionThought


def score_key(doc: str, thought: OptionThought) -> str:
    binding = thought.provider.to_dict() if hasattr(thought.provider, "to_dict") else None
    raw = json.dumps([doc, thought.id, thought.criterion, binding], sort_keys=True, ensure_ascii=False)
    return sha1(raw.encode("utf-8")).hexdigest()


class ScoreCache:
    """Thread-safe in-memory score cache."""

    def __init__(self) -> None:
        self._entries: Dict[str, float] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, doc: str, thought: OptionThought) -> Optional[float]:
        with self._lock:
            value = self._entries.get(score_key(doc, thought))
            if value is None:
                self.misses += 1
            else:
                self.hits += 1
            return value

    def set(self, doc: str, thought: OptionThought, score: float) -> None:
        with self._lock:
            self._entries[score_key(doc, thought)] = score

    def get_or_compute(self, doc: str, thought: OptionThought, compute: Callable[[], float]) -> float:
        cached = self.get(doc, thought)
        if cached is not None:
            return cached
        # computed outside the lock; two workers may score the same pair once each
        value = compute()
        self.set(doc, thought, value)
        return value

    def __len__(self) -> int:
        return len(self._entries)
