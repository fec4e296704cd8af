"""Corpus ingestion from line-delimited JSON records."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional

from .common import ThoughtRankError
from .perf import get_logger


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Corpus] {message}")


class IngestionError(ThoughtRankError):
    category = "ingestion"

    def __init__(self, message: str, path: str = "", line: Optional[int] = None) -> None:
        self.path = path
        self.line = line
        where = f"{path}:{line}: " if line is not None else (f"{path}: " if path else "")
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "text": self.text, "meta": dict(self.meta)}


def parse_corpus(lines: Iterable[str], path: str = "<corpus>") -> List[Document]:
    documents: List[Document] = []
    seen: Dict[str, int] = {}
    for number, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except ValueError as exc:
            raise IngestionError(f"malformed record: {exc}", path, number) from None
        if not isinstance(record, dict):
            raise IngestionError("record must be a JSON object", path, number)
        doc_id = record.get("id")
        if not isinstance(doc_id, str) or not doc_id:
            raise IngestionError("document id must be a non-empty string", path, number)
        text = record.get("text", "")
        if not isinstance(text, str):
            raise IngestionError(f"document {doc_id!r}: text must be a string", path, number)
        meta = record.get("meta", {})
        if not isinstance(meta, dict):
            raise IngestionError(f"document {doc_id!r}: meta must be an object", path, number)
        if doc_id in seen:
            raise IngestionError(f"duplicate document id {doc_id!r} (first seen on line {seen[doc_id]})", path, number)
        seen[doc_id] = number
        documents.append(Document(doc_id, text, meta))
    return documents


def load_corpus(path: str) -> List[Document]:
    try:
        with open(path, "r", encoding="utf-8") as stream:
            documents = parse_corpus(stream, path)
    except OSError as exc:
        raise IngestionError(f"cannot read corpus: {exc.strerror or exc}", path) from None
    _log(logging.INFO, f"Loaded {len(documents)} documents from {path}")
    return documents
