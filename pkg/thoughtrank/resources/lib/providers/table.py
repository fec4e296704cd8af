"""Deterministic score fixtures: the canonical provider for offline runs."""
from __future__ import annotations

import json
import logging
from typing import Dict, Iterable, List, Optional, Tuple

from ..core.hierarchy import OptionThought, ScoreMatrix
from ..corpus import Document
from ..common import ConfigurationError, ContractError
from ..perf import get_logger
from .base import MissingEntryError, ProviderBinding


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Table] {message}")


class ScoreFixture:
    """Recorded ``(document, thought) -> score`` entries, read-only after load."""

    def __init__(self, entries: Optional[Dict[Tuple[str, str], float]] = None) -> None:
        self._entries: Dict[Tuple[str, str], float] = {}
        for key, score in (entries or {}).items():
            self._add(key, score)

    def _add(self, key: Tuple[str, str], score: float, where: str = "") -> None:
        if key in self._entries:
            raise ConfigurationError(f"duplicate fixture entry for document {key[0]!r} thought {key[1]!r}{where}")
        if not isinstance(score, (int, float)) or isinstance(score, bool) or score < 0:
            raise ConfigurationError(f"fixture score for {key!r} must be a non-negative number{where}")
        self._entries[key] = float(score)

    @classmethod
    def from_records(cls, lines: Iterable[str], path: str = "<fixture>") -> "ScoreFixture":
        fixture = cls()
        for number, raw in enumerate(lines, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
                key = (str(record["doc"]), str(record["thought"]))
                score = record["score"]
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigurationError(f"malformed fixture record ({exc})", path=f"{path}:{number}") from None
            fixture._add(key, score, where=f" ({path}:{number})")
        return fixture

    @classmethod
    def load(cls, path: str) -> "ScoreFixture":
        try:
            with open(path, "r", encoding="utf-8") as stream:
                fixture = cls.from_records(stream, path)
        except OSError as exc:
            raise ConfigurationError(f"cannot read score fixture: {exc.strerror or exc}", path=path) from None
        _log(logging.INFO, f"Loaded {len(fixture)} fixture scores from {path}")
        return fixture

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def documents(self) -> List[str]:
        """Document ids in order of first appearance."""

        return list(dict.fromkeys(doc for doc, _ in self._entries))

    def lookup(self, doc: str, thought: str) -> float:
        try:
            return self._entries[(doc, thought)]
        except KeyError:
            raise MissingEntryError("score fixture", f"document {doc!r} thought {thought!r}") from None

    def to_matrix(self) -> ScoreMatrix:
        return ScoreMatrix(self._entries)


def score_table(fixture: ScoreFixture, doc: str, thought: OptionThought) -> float:
    score = fixture.lookup(doc, thought.id)
    if thought.binary and score not in (0.0, 1.0):
        raise ContractError(f"binary thought {thought.id!r} has recorded score {score} for document {doc!r}")
    return score


class TableProvider:
    def __init__(self, fixture: ScoreFixture) -> None:
        self.fixture = fixture

    def score(self, doc: Document, thought: OptionThought, query: str, binding: ProviderBinding) -> float:
        key = binding.params.get("thought", thought.id)
        if key != thought.id:
            thought = OptionThought(
                key, thought.layer, thought.level, thought.weight, thought.criterion, thought.binary)
        return score_table(self.fixture, doc.id, thought)
