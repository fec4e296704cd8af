"""Recorded chat replies keyed by the digest of the rendered request."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from typing import Any, Dict, Iterable, Mapping, Optional

from ..common import ConfigurationError
from ..perf import get_logger
from .base import MissingEntryError


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Transcripts] {message}")


def canonical_json(payload: Mapping[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def request_digest(payload: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


class TranscriptStore:
    """Thread-safe digest -> reply map backed by a JSONL file."""

    def __init__(self, path: Optional[str] = None, entries: Optional[Dict[str, str]] = None) -> None:
        self.path = path
        self._entries: Dict[str, str] = dict(entries or {})
        self._lock = threading.Lock()
        self._dirty = False

    @classmethod
    def from_records(cls, lines: Iterable[str], path: str = "<transcripts>") -> "TranscriptStore":
        entries: Dict[str, str] = {}
        for number, raw in enumerate(lines, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
                digest, response = record["digest"], record["response"]
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigurationError(f"malformed transcript record ({exc})", path=f"{path}:{number}") from None
            if not isinstance(digest, str) or not isinstance(response, str):
                raise ConfigurationError("transcript digest and response must be strings", path=f"{path}:{number}")
            entries[digest] = response
        return cls(path, entries)

    @classmethod
    def load(cls, path: str, missing_ok: bool = False) -> "TranscriptStore":
        if missing_ok and not os.path.exists(path):
            return cls(path)
        try:
            with open(path, "r", encoding="utf-8") as stream:
                store = cls.from_records(stream, path)
        except OSError as exc:
            raise ConfigurationError(f"cannot read transcripts: {exc.strerror or exc}", path=path) from None
        store.path = path
        _log(logging.INFO, f"Loaded {len(store)} transcripts from {path}")
        return store

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, digest: str) -> bool:
        return digest in self._entries

    def lookup(self, digest: str) -> str:
        with self._lock:
            try:
                return self._entries[digest]
            except KeyError:
                raise MissingEntryError("transcript", f"request digest {digest}") from None

    def record(self, digest: str, response: str) -> None:
        with self._lock:
            self._entries[digest] = response
            self._dirty = True

    def save(self, path: Optional[str] = None) -> None:
        target = path or self.path
        if not target:
            raise ConfigurationError("no transcript path to save to")
        with self._lock:
            lines = [
                json.dumps({"digest": d, "response": self._entries[d]}, ensure_ascii=False, sort_keys=True)
                for d in sorted(self._entries)
            ]
            with open(target, "w", encoding="utf-8") as stream:
                stream.write("".join(line + "\n" for line in lines))
            self._dirty = False
        _log(logging.INFO, f"Saved {len(lines)} transcripts to {target}")

    @property
    def dirty(self) -> bool:
        return self._dirty
