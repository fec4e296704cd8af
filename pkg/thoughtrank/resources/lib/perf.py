"""Timing and logger wiring shared by every ThoughtRank module.

All records go to the ``thoughtrank`` logger. Per-call timings are only
emitted when ``THOUGHTRANK_PERF_LOGGING`` is on; a call slower than its
threshold is reported at WARNING regardless.
"""

from __future__ import annotations

import functools
import logging
import time
from typing import Callable, Optional

from .common import Settings, ThoughtRankError

LOG_PREFIX = "[ThoughtRank]"
LOGGER_NAME = "thoughtrank"
_perf_enabled_cache: Optional[bool] = None


def get_logger() -> logging.Logger:
    return logging.getLogger(LOGGER_NAME)


def configure_logging(level: Optional[str] = None) -> None:
    """Attach a stderr handler once and apply ``level`` or the ``log_level`` setting."""

    logger = get_logger()
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
        logger.addHandler(handler)
    name = (level or Settings().log_level or "WARNING").upper()
    logger.setLevel(getattr(logging, name, logging.WARNING))


def is_perf_logging_enabled() -> bool:
    global _perf_enabled_cache
    if _perf_enabled_cache is None:
        try:
            _perf_enabled_cache = bool(Settings().get_bool("perf_logging"))
        except Exception:
            _perf_enabled_cache = False
    return _perf_enabled_cache


def _ms_since(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def log_duration(
    label: str,
    elapsed_ms: float,
    *,
    threshold_ms: Optional[float] = None,
    details: str = "",
) -> None:
    suffix = f" {details}" if details else ""
    logger = get_logger()
    if threshold_ms is not None and elapsed_ms > threshold_ms:
        logger.warning(
            "%s %s exceeded target: %.2f ms (threshold %.0f ms)%s", LOG_PREFIX, label, elapsed_ms, threshold_ms, suffix
        )
    elif is_perf_logging_enabled():
        logger.info("%s %s completed in %.2f ms%s", LOG_PREFIX, label, elapsed_ms, suffix)


def timed(label: str, warn_threshold_ms: Optional[float] = None) -> Callable:
    """Time every call of the decorated function under ``label``.

    Domain failures (``ThoughtRankError``) are reported at WARNING with their
    category since the CLI turns them into an exit status; anything else is
    logged at ERROR. The exception is always re-raised.
    """

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except ThoughtRankError as exc:
                get_logger().warning(
                    "%s %s failed [%s] after %.2f ms: %s", LOG_PREFIX, label, exc.category, _ms_since(start), exc
                )
                raise
            except Exception as exc:
                get_logger().error("%s %s errored after %.2f ms: %s", LOG_PREFIX, label, _ms_since(start), exc)
                raise
            log_duration(label, _ms_since(start), threshold_ms=warn_threshold_ms)
            return result

        return wrapper

    return decorator
