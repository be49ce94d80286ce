"""Content source contract and the typed fetch entry points."""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Sequence, TypeVar, Union

import numpy as np

from ..models.content import ImageAsset, TextContent

logger = logging.getLogger(__name__)

T = TypeVar("T")

TupleItem = tuple[str, Union[TextContent, ImageAsset]]
Content = Union[TextContent, ImageAsset, list[TupleItem]]

NO_EXCLUDE: frozenset[str] = frozenset()


class ContentSource(ABC):
    """A text, image or tupled content provider.

    `fetch` returns seed-related content when the provider finds any and a
    random item otherwise; it never returns empty content. An empty seed
    means "ignore the seed". `exclude` holds asset ids the caller would
    rather not get: an unused unrelated item beats a used seed match, and an
    excluded item comes back only when the source has nothing else.
    """

    kind: str = "text"
    online: bool = False

    def __init__(
        self,
        name: str,
        flavour: str = "neutral",
        supports_seed: bool = True,
        tags: Sequence[str] = (),
    ):
        self.name = name
        self.flavour = flavour
        self.supports_seed = supports_seed
        self.tags = tuple(tags)

    @abstractmethod
    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> Content:
        ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r}, kind={self.kind}, flavour={self.flavour})"


def pick(
    pool: Sequence[T],
    rng: np.random.Generator,
    exclude: frozenset[str] = NO_EXCLUDE,
    key: Callable[[T], str] = str,
) -> T:
    """Uniform choice from `pool`, preferring items whose key is not excluded.

    Consumes exactly one draw whatever the exclusion set.
    """
    candidates = pool
    if exclude:
        preferred = unused(pool, exclude, key)
        candidates = preferred or pool
    return candidates[int(rng.integers(len(candidates)))]


def unused(
    pool: Sequence[T], exclude: frozenset[str], key: Callable[[T], str] = str
) -> list[T]:
    """Items of `pool` whose key is not in `exclude`."""
    return [item for item in pool if key(item) not in exclude]


def _require_kind(source: ContentSource, kind: str) -> None:
    if source.kind != kind:
        raise TypeError(f"{source.name} is a {source.kind} source, expected {kind}")


def fetch_text(source: ContentSource, seed: str, rng: np.random.Generator) -> TextContent:
    _require_kind(source, "text")
    return source.fetch(seed, rng)


def fetch_image(
    source: ContentSource,
    seed: str,
    rng: np.random.Generator,
    exclude: frozenset[str] = NO_EXCLUDE,
) -> ImageAsset:
    _require_kind(source, "image")
    return source.fetch(seed, rng, exclude)


def fetch_tuple(
    source: ContentSource,
    seed: str,
    rng: np.random.Generator,
    exclude: frozenset[str] = NO_EXCLUDE,
) -> list[TupleItem]:
    _require_kind(source, "tupled")
    return source.fetch(seed, rng, exclude)


def content_asset_ids(content: Content) -> list[str]:
    """Image asset ids carried by a fetch result."""
    if isinstance(content, ImageAsset):
        return [content.asset_id]
    if isinstance(content, list):
        return [item.asset_id for _, item in content if isinstance(item, ImageAsset)]
    return []
