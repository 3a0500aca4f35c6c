"""Structured logging for randlattice.

Log records go to stderr; stdout carries residue maps, reports and CSV.
"""

import logging
import sys
from contextlib import contextmanager
from typing import Any, Iterator, List, Optional

import structlog

from ..config import settings
from .exceptions import ValidationError

LOG_FORMATS = ("console", "json")


def _level(name: str) -> int:
    level = logging.getLevelName(name.upper())
    if not isinstance(level, int):
        raise ValidationError(f"Unknown log level {name!r}")
    return level


def _processors(log_format: str) -> List[Any]:
    if log_format not in LOG_FORMATS:
        raise ValidationError(f"Unknown log format {log_format!r}, expected one of {LOG_FORMATS}")
    renderer = structlog.processors.JSONRenderer() if log_format == "json" else structlog.dev.ConsoleRenderer()
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        renderer,
    ]


def setup_logging(program: str, log_level: Optional[str] = None, log_format: Optional[str] = None) -> None:
    """
    Route structlog through the standard library at the requested level.

    Raises:
        ValidationError: For an unknown level or format name
    """
    level = _level(log_level or settings.log_level)
    processors = _processors(log_format or settings.log_format)

    # force: repeated CLI invocations in one process must rebind stderr
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=level, force=True)
    structlog.configure(
        processors=processors,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(program=program)


@contextmanager
def log_context(**values: Any) -> Iterator[None]:
    """Bind keys such as n or seed to every record logged in this block."""
    with structlog.contextvars.bound_contextvars(**values):
        yield


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    return structlog.get_logger(name)
