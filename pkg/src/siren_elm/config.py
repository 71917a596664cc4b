"""
Environment configuration and logging setup.

Environment (all optional):
  SIREN_ELM_THREADS     worker cap for per-clip decoding / feature extraction
  SIREN_ELM_LOG_LEVEL   DEBUG | INFO | WARNING | ERROR (default WARNING)
  SIREN_ELM_LOG_FILE    also log to this file (rotating, 5 MiB x 3)

Unparsable values fall back to the defaults; they never raise.
"""

from __future__ import annotations

import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOGGER_NAME = "siren_elm"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DEFAULT_LOG_LEVEL = logging.WARNING
_LOG_MAX_BYTES = 5 * 1024 * 1024
_LOG_BACKUPS = 3


def get_threads() -> int:
    """Return the worker cap (`SIREN_ELM_THREADS`) or the CPU count."""
    raw = os.environ.get("SIREN_ELM_THREADS")
    if raw is not None and raw != "":
        try:
            return max(1, int(raw))
        except (ValueError, TypeError):
            pass
    return max(1, os.cpu_count() or 1)


def get_log_level() -> int:
    """Return the level named by `SIREN_ELM_LOG_LEVEL` or WARNING."""
    raw = os.environ.get("SIREN_ELM_LOG_LEVEL")
    if raw:
        level = logging.getLevelName(raw.strip().upper())
        if isinstance(level, int):
            return level
    return DEFAULT_LOG_LEVEL


def get_log_file() -> Path | None:
    raw = os.environ.get("SIREN_ELM_LOG_FILE")
    return Path(raw).expanduser() if raw else None


def setup_logging(level: int | None = None, log_file: Path | None = None) -> logging.Logger:
    """Configure the package logger once; later calls only adjust the level.

    Logs go to stderr so stdout stays reserved for command output.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(get_log_level() if level is None else level)
    if not logger.handlers:
        formatter = logging.Formatter(LOG_FORMAT)
        stream = logging.StreamHandler(sys.stderr)
        stream.setFormatter(formatter)
        logger.addHandler(stream)
        log_file = log_file or get_log_file()
        if log_file is not None:
            handler = RotatingFileHandler(
                log_file, maxBytes=_LOG_MAX_BYTES, backupCount=_LOG_BACKUPS,
            )
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.propagate = False
    return logger
