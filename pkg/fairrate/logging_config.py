"""
Logging setup for fairrate.

Library modules log through ``logging.getLogger(__name__)`` under the
``fairrate`` logger; :func:`setup_logging` attaches the one handler the CLI
uses. Structured output carries the oracle context (phase, players, call
counts) that modules pass through ``extra=``.
"""

from __future__ import annotations

import json
import logging
from logging import Logger
from typing import Optional, TextIO, Union

DEFAULT_LOGGER_NAME = "fairrate"
DEFAULT_FORMAT = "%(asctime)s | %(name)s | %(levelname)s | %(message)s"
DEFAULT_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Record attributes copied into structured payloads when a module sets them.
CONTEXT_FIELDS = ("phase", "players", "blocks", "oracle_calls", "raw_oracle_calls")


class StructuredFormatter(logging.Formatter):
    """One JSON object per record, with any oracle context fields attached."""

    def format(self, record: logging.LogRecord) -> str:  # noqa: D401
        payload = {
            "timestamp": self.formatTime(record, self.datefmt),
            "name": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }
        for name in CONTEXT_FIELDS:
            if hasattr(record, name):
                payload[name] = getattr(record, name)
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


def resolve_level(level: Union[int, str]) -> int:
    """Translate a level name such as ``"debug"`` into its numeric value."""
    if isinstance(level, int):
        return level
    numeric = logging.getLevelName(level.strip().upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level!r}")
    return numeric


def setup_logging(
    level: Union[int, str] = logging.INFO,
    *,
    structured: bool = False,
    stream: Optional[TextIO] = None,
    force: bool = False,
) -> Logger:
    """
    Configure and return the ``fairrate`` logger.

    Args:
        level: Level name or number for the logger and its handler
        structured: Emit newline-delimited JSON instead of the text format
        stream: Target stream; stderr when omitted
        force: Drop previously attached handlers first
    """
    numeric_level = resolve_level(level)
    logger = logging.getLogger(DEFAULT_LOGGER_NAME)

    if force:
        for handler in list(logger.handlers):
            logger.removeHandler(handler)

    attached = [h for h in logger.handlers if not isinstance(h, logging.NullHandler)]
    if attached:
        for handler in attached:
            handler.setLevel(numeric_level)
    else:
        handler = logging.StreamHandler(stream)
        if structured:
            handler.setFormatter(StructuredFormatter(datefmt=DEFAULT_DATE_FORMAT))
        else:
            handler.setFormatter(logging.Formatter(DEFAULT_FORMAT, DEFAULT_DATE_FORMAT))
        handler.setLevel(numeric_level)
        logger.addHandler(handler)

    logger.setLevel(numeric_level)
    logger.propagate = False
    return logger
