"""Roulette-wheel selection."""

from typing import Sequence

import numpy as np


def roulette_select(weights: Sequence[float], rng: np.random.Generator) -> int:
    """Pick an index with probability proportional to its weight.

    Zero-weight entries are never picked. Consumes exactly one uniform draw.

    Raises:
        ValueError: if weights are empty, negative or sum to zero
    """
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise ValueError("roulette_select needs at least one weight")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError(f"weights must be finite and non-negative: {list(weights)}")

    cumulative = np.cumsum(w)
    total = cumulative[-1]
    if total <= 0:
        raise ValueError("weights sum to zero")

    r = rng.random() * total
    index = int(np.searchsorted(cumulative, r, side="right"))
    # r < total always, but guard float rounding
    index = min(index, w.size - 1)
    while w[index] == 0:
        index -= 1
    return index
