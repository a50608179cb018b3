"""Structured logging setup shared by the library and the CLI."""

from __future__ import annotations

import logging
import sys
from typing import Optional

import structlog

from phasetk.core.config import settings

_STRUCTLOG_CONFIGURED = False


def _numeric_level(name: str) -> int:
    value = logging.getLevelName(str(name).upper())
    return value if isinstance(value, int) else logging.WARNING


def _configure_structlog(fmt: str) -> None:
    global _STRUCTLOG_CONFIGURED
    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if fmt == "json"
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.format_exc_info,
            renderer,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )
    _STRUCTLOG_CONFIGURED = True


def configure_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """Route structlog through stdlib logging on stderr.

    Library modules emit dotted event names (``flow.completed``) with key/value
    context; the renderer is chosen by ``LOG_FORMAT``.
    """

    numeric_level = _numeric_level(level or settings.LOG_LEVEL)

    logging.basicConfig(stream=sys.stderr, level=numeric_level, format="%(message)s", force=True)
    logging.getLogger("phasetk").setLevel(numeric_level)
    _configure_structlog((fmt or settings.LOG_FORMAT).lower())


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """Logger for library modules; never prints unless stdlib logging lets it through."""

    if not _STRUCTLOG_CONFIGURED:
        logging.getLogger("phasetk").setLevel(_numeric_level(settings.LOG_LEVEL))
        _configure_structlog(settings.LOG_FORMAT)
    return structlog.get_logger(name)


__all__ = ["configure_logging", "get_logger"]
