"""
Session manager handing out a shared requests.Session for the chat endpoint.
"""
from __future__ import annotations

import logging
import threading
from typing import Optional

import requests
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry

from ..perf import get_logger

RETRY_STATUSES = (408, 429, 500, 502, 503, 504)


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Session] {message}")


def build_retry(attempts: int = 3, backoff_factor: float = 0.5) -> Retry:
    """Retry transport failures only; ``attempts`` counts the first try."""

    return Retry(
        total=max(attempts - 1, 0),
        backoff_factor=backoff_factor,
        status_forcelist=list(RETRY_STATUSES),
        allowed_methods=frozenset({"POST"}),
        raise_on_status=True,
    )


class SessionManager:
    def __init__(self, attempts: int = 3, backoff_factor: float = 0.5, pool_size: int = 4) -> None:
        self._attempts = attempts
        self._backoff_factor = backoff_factor
        self._pool_size = pool_size
        self._session: Optional[requests.Session] = None
        self._lock = threading.Lock()

    def get_session(self) -> requests.Session:
        with self._lock:
            if self._session is None:
                session = requests.Session()
                adapter = HTTPAdapter(
                    pool_connections=self._pool_size,
                    pool_maxsize=self._pool_size,
                    max_retries=build_retry(self._attempts, self._backoff_factor),
                )
                session.mount("https://", adapter)
                session.mount("http://", adapter)
                self._session = session
                _log(logging.DEBUG, f"Opened HTTP session ({self._attempts} attempts, pool {self._pool_size})")
            return self._session

    def close(self) -> None:
        with self._lock:
            if self._session is not None:
                self._session.close()
                self._session = None
