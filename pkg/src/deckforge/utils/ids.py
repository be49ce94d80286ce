"""Identity and random-stream derivation utilities for Deckforge."""

import hashlib
import os
from pathlib import PurePosixPath

import numpy as np

UINT64_MASK = (1 << 64) - 1


def derive_seed(master_seed: int, *parts: object) -> int:
    """Derive an independent 64-bit seed from a master seed and a path of labels.

    `derive_seed(master, slide_index, round_index)` is the per-slide,
    per-round stream; it does not depend on worker count or scheduling order.

    Args:
        master_seed: 64-bit master seed of the run
        *parts: Stream labels (ints or strings)

    Returns:
        64-bit unsigned integer
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(master_seed & UINT64_MASK).encode("ascii"))
    for part in parts:
        h.update(b"\x1f")
        h.update(repr(part).encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


def make_rng(master_seed: int, *parts: object) -> np.random.Generator:
    """Build a numpy Generator for the derived stream."""
    return np.random.default_rng(derive_seed(master_seed, *parts))


def random_master_seed() -> int:
    """Draw a fresh 64-bit master seed from system entropy."""
    return int.from_bytes(os.urandom(8), "big")


def make_asset_id(source_name: str, locator: str) -> str:
    """Build a stable asset identity from the source name and canonical locator.

    Format: {source_name}:{locator}
    """
    if "://" not in locator:
        locator = PurePosixPath(locator.replace("\\", "/")).as_posix()
    return f"{source_name}:{locator}"


def cache_key(*parts: str) -> str:
    """SHA-256 hex digest over `|`-joined parts, used for cache file names."""
    return hashlib.sha256("|".join(parts).encode("utf-8")).hexdigest()
