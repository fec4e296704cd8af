"""
Common utilities and singleton classes for ThoughtRank.
Provides a centralized way to reach resource paths and runtime settings,
plus the error base class every module raises from.
"""
from __future__ import annotations
import os
from typing import Any, Dict, Optional

_ENV_PREFIX = "THOUGHTRANK_"


class Singleton(type):
    _instances: Dict[type, Any] = {}

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            cls._instances[cls] = super(Singleton, cls).__call__(*args, **kwargs)
        return cls._instances[cls]


class ThoughtRankError(Exception):
    """Base error. ``category`` selects the CLI exit status."""

    category = "internal"


class ConfigurationError(ThoughtRankError):
    category = "config"

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ContractError(ThoughtRankError):
    category = "contract"


class Globals(metaclass=Singleton):
    """A singleton for resource locations."""

    def __init__(self):
        self.APP_PATH = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
        self.RESOURCES_PATH = os.path.join(self.APP_PATH, "resources")
        self.SCHEMA_PATH = os.path.join(self.RESOURCES_PATH, "schema", "pipeline_config.schema.json")
        self.FIXTURES_PATH = os.path.join(self.RESOURCES_PATH, "fixtures")


class Settings(metaclass=Singleton):
    """A singleton for runtime settings read from ``THOUGHTRANK_*`` variables."""

    _DEFAULTS = {
        "perf_logging": "false",
        "log_level": "WARNING",
        "parallelism": "4",
    }

    def __init__(self, environ: Optional[Dict[str, str]] = None):
        self._environ = environ if environ is not None else os.environ

    def __getattr__(self, name: str) -> str:
        if name.startswith("_"):
            raise AttributeError(name)
        value = self._environ.get(_ENV_PREFIX + name.upper())
        if value is None:
            return self._DEFAULTS.get(name, "")
        return value

    def get_bool(self, name: str) -> bool:
        return str(getattr(self, name)).strip().lower() in ("1", "true", "yes", "on")

    def get_int(self, name: str) -> int:
        raw = getattr(self, name)
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ConfigurationError(f"expected an integer, got {raw!r}", path=_ENV_PREFIX + name.upper())
