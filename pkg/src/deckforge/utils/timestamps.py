"""Timestamp utilities for Deckforge."""

from datetime import datetime, timezone

# Constant used for archive entries and document properties under fixed_epoch.
FIXED_EPOCH = datetime(1980, 1, 1, 0, 0, 0, tzinfo=timezone.utc)


def format_duration(ms: float) -> str:
    """Deck generation time: `412ms` under a second, `2.31s` otherwise."""
    if ms < 1000:
        return f"{ms:.0f}ms"
    return f"{ms / 1000:.2f}s"
