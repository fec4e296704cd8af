"""Capability checks run after config validation and before any provider call."""
from __future__ import annotations

import os
from typing import Mapping, Optional

from .common import ConfigurationError
from .pipeline.config import PipelineConfig


class PreflightError(ConfigurationError):
    pass


def ensure_ready_or_raise(
    config: PipelineConfig,
    corpus_path: Optional[str],
    mode: str,
    environ: Optional[Mapping[str, str]] = None,
) -> None:
    """
    Ensures the inputs a run needs exist: corpus, score fixture, transcripts and credential.
    """
    environ = environ if environ is not None else os.environ
    if not corpus_path:
        raise PreflightError("no corpus given (use --corpus or the config's corpus field)")
    if not os.path.isfile(corpus_path):
        raise PreflightError(f"corpus file {corpus_path} does not exist")
    if config.uses_table:
        if not config.scores:
            raise PreflightError("table bindings need the config's scores file")
        if not os.path.isfile(config.scores):
            raise PreflightError(f"score fixture {config.scores} does not exist")
    if not config.uses_chat:
        return
    if mode in ("replay", "record") and not config.transcripts:
        raise PreflightError(f"{mode} mode needs the config's transcripts file")
    if mode == "replay" and not os.path.isfile(config.transcripts):
        raise PreflightError(f"transcript file {config.transcripts} does not exist")
    if mode in ("live", "record"):
        chat = config.chat
        if not chat.endpoint:
            raise PreflightError(f"{mode} mode needs chat.endpoint")
        if not chat.credential_env or not environ.get(chat.credential_env):
            raise PreflightError(f"{mode} mode needs the credential variable {chat.credential_env or '(unset)'}")
