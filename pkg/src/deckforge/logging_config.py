"""Logging configuration for Deckforge.

Structured stdout lines that stay readable on a stage laptop and parseable
by scripts:
- [SUCCESS] and [ERROR] prefixes for machine parsing
- Key metrics in success logs
- Full tracebacks in error logs
"""

import logging
import sys
import traceback
from datetime import datetime

LOGGER_NAME = "deckforge"


def sanitize_log_input(value: str, max_length: int = 200) -> str:
    """Sanitize user input (topics, seeds, captions) for safe logging.

    Prevents log injection by:
    - Escaping newlines
    - Limiting length
    - Removing control characters
    """
    if not isinstance(value, str):
        value = str(value)

    sanitized = "".join(c if c.isprintable() or c == " " else "?" for c in value)
    sanitized = sanitized.replace("\n", "\\n").replace("\r", "\\r")

    if len(sanitized) > max_length:
        sanitized = sanitized[:max_length] + "..."

    return sanitized


class StructuredFormatter(logging.Formatter):
    """Formatter producing `[YYYY-MM-DD HH:MM:SS] [LEVEL] message` lines."""

    def format(self, record: logging.LogRecord) -> str:
        timestamp = datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S")
        message = record.getMessage()

        if record.exc_info:
            exc_text = "".join(traceback.format_exception(*record.exc_info))
            message = f"{message}\n[ERROR] Traceback:\n{exc_text}"

        return f"[{timestamp}] [{record.levelname}] {message}"


def setup_logging(level: int = logging.WARNING, stream=None) -> logging.Logger:
    """Configure the package logger.

    Calling it again only adjusts the level; handlers are never duplicated.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)

    if not logger.handlers:
        handler = logging.StreamHandler(stream or sys.stderr)
        handler.setFormatter(StructuredFormatter())
        logger.addHandler(handler)

    for handler in logger.handlers:
        handler.setLevel(level)

    return logger


logger = logging.getLogger(LOGGER_NAME)


def _format_pairs(pairs: dict) -> str:
    safe = {k: sanitize_log_input(str(v)) for k, v in pairs.items()}
    return ", ".join(f"{k}={v}" for k, v in safe.items())


def log_success(event: str, **metrics) -> None:
    """Log a successful operation with key metrics.

    Example:
        log_success("assembly.round", round=1, regenerated=[2, 5])
        # Output: [SUCCESS] assembly.round - round=1, regenerated=[2, 5]
    """
    logger.info(f"[SUCCESS] {sanitize_log_input(event)} - {_format_pairs(metrics)}")


def log_error(event: str, exception: Exception, **context) -> None:
    """Log an error with exception details, context and traceback."""
    error_msg = f"[ERROR] {sanitize_log_input(event)} - Exception: {type(exception).__name__}"
    if context:
        error_msg += f" - {_format_pairs(context)}"
    error_msg += f"\n[ERROR] Details: {exception}"

    logger.error(error_msg, exc_info=exception)
