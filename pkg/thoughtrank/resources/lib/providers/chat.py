"""
Chat-completion client for scoring, criteria generation and refinement.

Requests carry fixed decoding settings (temperature 0, top-p 1, no
penalties). In ``replay`` mode every reply comes from the transcript store and
no network operation happens; ``record`` calls the endpoint and stores each
reply under the request digest.
"""
from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import requests

from ..common import ConfigurationError
from ..core.hierarchy import OptionThought
from ..corpus import Document
from ..perf import get_logger, log_duration
from .base import ProviderBinding, ProviderError
from .session import SessionManager
from .templates import PromptTemplate, get_template
from .transcripts import TranscriptStore, request_digest

MODES = ("live", "replay", "record")
_REQUEST_WARN_MS = 15000


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Chat] {message}")


@dataclass(frozen=True)
class ChatSettings:
    endpoint: str = ""
    model: str = ""
    credential_env: str = ""
    timeout: float = 60.0
    max_in_flight: int = 4
    attempts: int = 3

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ChatSettings":
        return cls(
            endpoint=data.get("endpoint", ""),
            model=data.get("model", ""),
            credential_env=data.get("credential_env", ""),
            timeout=float(data.get("timeout", 60.0)),
            max_in_flight=int(data.get("max_in_flight", 4)),
            attempts=int(data.get("attempts", 3)),
        )


def build_payload(model: str, messages: List[Dict[str, str]]) -> Dict[str, Any]:
    return {
        "model": model,
        "messages": messages,
        "temperature": 0,
        "top_p": 1,
        "frequency_penalty": 0,
        "presence_penalty": 0,
    }


class ChatClient:
    """Shareable across threads; at most ``max_in_flight`` requests run at once."""

    def __init__(
        self,
        settings: ChatSettings,
        mode: str = "live",
        transcripts: Optional[TranscriptStore] = None,
        session: Optional[requests.Session] = None,
        environ: Optional[Dict[str, str]] = None,
    ) -> None:
        if mode not in MODES:
            raise ConfigurationError(f"unknown chat mode {mode!r}")
        if mode in ("replay", "record") and transcripts is None:
            raise ConfigurationError(f"{mode} mode needs a transcript store")
        self.settings = settings
        self.mode = mode
        self.transcripts = transcripts
        self._session = session
        self._manager: Optional[SessionManager] = None
        self._session_lock = threading.Lock()
        self._environ = environ if environ is not None else os.environ
        self._slots = threading.BoundedSemaphore(max(settings.max_in_flight, 1))
        self.requests_sent = 0
        self._count_lock = threading.Lock()

    def _get_session(self) -> requests.Session:
        with self._session_lock:
            if self._session is None:
                self._manager = SessionManager(self.settings.attempts, pool_size=max(self.settings.max_in_flight, 1))
                self._session = self._manager.get_session()
            return self._session

    def _credential(self) -> str:
        name = self.settings.credential_env
        if not name:
            raise ConfigurationError("chat settings declare no credential_env")
        value = self._environ.get(name)
        if not value:
            raise ConfigurationError(f"environment variable {name} is not set")
        return value

    def complete(self, messages: List[Dict[str, str]], model: Optional[str] = None) -> str:
        payload = build_payload(model or self.settings.model, messages)
        digest = request_digest(payload)
        if self.mode == "replay":
            return self.transcripts.lookup(digest)
        reply = self._post(payload, digest)
        if self.mode == "record":
            self.transcripts.record(digest, reply)
        return reply

    def _post(self, payload: Dict[str, Any], digest: str) -> str:
        if not self.settings.endpoint:
            raise ConfigurationError("chat settings declare no endpoint")
        headers = {"Authorization": f"Bearer {self._credential()}", "Content-Type": "application/json"}
        with self._slots:
            start = time.perf_counter()
            try:
                response = self._get_session().post(
                    self.settings.endpoint, json=payload, headers=headers, timeout=self.settings.timeout
                )
                response.raise_for_status()
                body = response.json()
            except requests.exceptions.RequestException as exc:
                _log(logging.ERROR, f"Request {digest[:12]} failed: {exc}")
                raise ProviderError(f"chat request failed after {self.settings.attempts} attempts: {exc}") from exc
            except ValueError as exc:
                raise ProviderError(f"chat endpoint returned a non-JSON body: {exc}") from exc
            finally:
                with self._count_lock:
                    self.requests_sent += 1
            log_duration("chat.request", (time.perf_counter() - start) * 1000.0,
                         threshold_ms=_REQUEST_WARN_MS, details=digest[:12])
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise ProviderError(f"chat response has no message content: {str(body)[:200]}") from None
        if not isinstance(content, str):
            raise ProviderError("chat message content is not text")
        return content

    def finish(self) -> None:
        """Persist recorded transcripts and close a session this client opened."""

        try:
            if self.mode == "record" and self.transcripts is not None and self.transcripts.dirty:
                self.transcripts.save()
        finally:
            with self._session_lock:
                if self._manager is not None:
                    self._manager.close()
                    self._manager = None
                    self._session = None


def score_chat(
    client: ChatClient,
    template: PromptTemplate,
    query: str,
    criterion: str,
    doc: Document,
    model: Optional[str] = None,
) -> float:
    reply = client.complete(template.render(query=query, criterion=criterion, document=doc.text), model)
    return template.parse_score(reply)


def suggest_lines(
    client: ChatClient, template: PromptTemplate, query: str, count: int, criterion: str = "",
    model: Optional[str] = None,
) -> List[str]:
    reply = client.complete(template.render(query=query, criterion=criterion, count=count), model)
    return template.parse_lines(reply)


class ChatProvider:
    def __init__(self, client: ChatClient) -> None:
        self.client = client

    def score(self, doc: Document, thought: OptionThought, query: str, binding: ProviderBinding) -> float:
        template = get_template(binding.params["template"])
        return score_chat(self.client, template, query, thought.criterion, doc, binding.params.get("model"))
