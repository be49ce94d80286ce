"""Utility functions for Deckforge."""

from .ids import derive_seed, make_asset_id, make_rng, cache_key
from .sampling import roulette_select
from .manifest import canonical_json
from .timestamps import FIXED_EPOCH, format_duration

__all__ = [
    "derive_seed",
    "make_asset_id",
    "make_rng",
    "cache_key",
    "roulette_select",
    "canonical_json",
    "FIXED_EPOCH",
    "format_duration",
]
