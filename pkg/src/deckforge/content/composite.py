"""Weighted composition of same-kind content sources."""

import logging
from typing import Optional, Sequence

import numpy as np

from ..errors import AllChildrenFailedError, MixedKindsError, SourceError
from ..utils.sampling import roulette_select
from .base import NO_EXCLUDE, Content, ContentSource, content_asset_ids

logger = logging.getLogger(__name__)


class CompositeSource(ContentSource):
    """Roulette-selects a child by weight and delegates to it.

    A failing child is dropped for the rest of the call and the remaining
    children are tried by weight before giving up. A child that can only
    offer excluded assets also gives way to its siblings.
    """

    def __init__(
        self,
        name: str,
        children: Sequence[tuple[ContentSource, float]],
        flavour: Optional[str] = None,
    ):
        if not children:
            raise ValueError(f"composite {name!r} needs at least one child")
        kinds = {child.kind for child, _ in children}
        if len(kinds) > 1:
            raise MixedKindsError(f"composite {name!r} mixes kinds {sorted(kinds)}")
        weights = [w for _, w in children]
        if any(w < 0 for w in weights) or sum(weights) <= 0:
            raise ValueError(f"composite {name!r} weights must be non-negative with a positive sum")

        tags: list[str] = []
        for child, _ in children:
            tags.extend(t for t in child.tags if t not in tags)
        super().__init__(
            name,
            flavour=flavour or children[0][0].flavour,
            supports_seed=any(child.supports_seed for child, _ in children),
            tags=tags,
        )
        self.kind = kinds.pop()
        self.children = [(child, float(w)) for child, w in children]

    @property
    def online(self) -> bool:
        return any(child.online for child, _ in self.children)

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> Content:
        remaining = [(c, w) for c, w in self.children if w > 0]
        failures = []
        reused: Optional[Content] = None
        while remaining:
            index = roulette_select([w for _, w in remaining], rng)
            child, _ = remaining.pop(index)
            try:
                content = child.fetch(seed, rng, exclude)
            except SourceError as e:
                logger.warning(f"{self.name}: child {child.name} failed, trying the others: {e}")
                failures.append(f"{child.name}: {e}")
                continue
            if not exclude or not set(content_asset_ids(content)) & exclude:
                return content
            # Child has nothing unused; keep its answer in case no sibling does
            if reused is None:
                reused = content
        if reused is not None:
            return reused
        raise AllChildrenFailedError(self.name, "; ".join(failures))


def combine(
    children: Sequence[tuple[ContentSource, float]],
    name: Optional[str] = None,
    flavour: Optional[str] = None,
) -> CompositeSource:
    """Build a composite over same-kind children.

    Raises:
        MixedKindsError: children of different kinds
    """
    if name is None:
        name = "+".join(child.name for child, _ in children)
    return CompositeSource(name, children, flavour)
