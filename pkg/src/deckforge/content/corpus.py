"""Offline corpus sources: text lines, quotes, how-to titles and image folders."""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..errors import ContentIOError, SourceEmptyError
from ..models.content import ImageAsset, TextContent
from ..utils.ids import make_asset_id
from .base import NO_EXCLUDE, ContentSource, pick, unused

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".gif"}
ANIMATED_SUFFIXES = {".gif"}

_HOWTO_PREFIX = re.compile(r"^\s*(?:how\s+to|\d+\s+ways\s+to)\s+", re.IGNORECASE)
_HOWTO_SUFFIX = re.compile(r"\s*\(\s*with\s+pictures\s*\)\s*$", re.IGNORECASE)


def extract_action(title: str) -> str:
    """Infinitive action phrase of a how-to title.

    "How to Pet a Cat" -> "pet a cat"; "5 Ways to Bake Bread (with Pictures)"
    -> "bake bread". Acronyms written in capitals keep their casing.
    """
    text = _HOWTO_SUFFIX.sub("", _HOWTO_PREFIX.sub("", title.strip()))
    words = [w if len(w) > 1 and w.isupper() else w.lower() for w in text.split()]
    return " ".join(words)


def _read_lines(path: Path) -> list[str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ContentIOError(f"cannot read corpus file {path}: {e}") from e
    return [
        line.rstrip("\r")
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    ]


def _matches(seed: str, haystack: str) -> bool:
    return seed.lower() in haystack.lower()


class SeededCorpusSource(ContentSource):
    """Shared seed matching and random fallback for offline corpora."""

    def __init__(self, *args, random_fallback_probability: float = 0.0, **kwargs):
        super().__init__(*args, **kwargs)
        if not 0.0 <= random_fallback_probability <= 1.0:
            raise ValueError("random_fallback_probability must be in [0, 1]")
        self.random_fallback_probability = random_fallback_probability

    def _use_seed(self, seed: str, rng: np.random.Generator) -> bool:
        if not (self.supports_seed and seed):
            return False
        # Only draw when the feature is on, so default runs keep their streams
        if self.random_fallback_probability > 0 and rng.random() < self.random_fallback_probability:
            return False
        return True


class TextCorpusSource(SeededCorpusSource):
    """One text item per line; quote corpora carry `text<TAB>author`."""

    kind = "text"

    def __init__(self, name: str, items: Sequence[TextContent], **kwargs):
        super().__init__(name, **kwargs)
        self.items = list(items)

    @classmethod
    def from_lines(
        cls, name: str, path: Path, quotes: bool = False, **kwargs
    ) -> "TextCorpusSource":
        items = []
        for line in _read_lines(path):
            text, _, author = line.partition("\t") if quotes else (line, "", "")
            items.append(
                TextContent(text=text, source_name=name, attribution=author.strip() or None)
            )
        return cls(name, items, **kwargs)

    def _finish(self, item: TextContent, related: bool) -> TextContent:
        return item.model_copy(update={"related_to_seed": related})

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> TextContent:
        if not self.items:
            raise SourceEmptyError(self.name, "corpus has no items")
        if self._use_seed(seed, rng):
            matches = [item for item in self.items if _matches(seed, item.text)]
            if matches:
                return self._finish(pick(matches, rng), True)
            logger.debug(f"{self.name}: nothing matches {seed!r}, picking at random")
        return self._finish(pick(self.items, rng), False)


class HowToSource(TextCorpusSource):
    """How-to titles; fetch yields the extracted action phrase."""

    def _finish(self, item: TextContent, related: bool) -> TextContent:
        return TextContent(
            text=extract_action(item.text), source_name=self.name, related_to_seed=related
        )


@dataclass(frozen=True)
class ImageEntry:
    filename: str
    keywords: str = ""
    upvotes: Optional[float] = None
    attribution: str = ""

    @property
    def searchable(self) -> str:
        return f"{Path(self.filename).stem.replace('_', ' ')} {self.keywords}"


def read_image_meta(path: Path) -> dict[str, ImageEntry]:
    """Parse `filename<TAB>keywords<TAB>upvotes[<TAB>attribution]` rows."""
    entries = {}
    for line in _read_lines(path):
        fields = line.split("\t")
        filename = fields[0].strip()
        keywords = fields[1].strip() if len(fields) > 1 else ""
        upvotes = None
        if len(fields) > 2 and fields[2].strip():
            try:
                upvotes = float(fields[2])
            except ValueError:
                logger.warning(f"{path}: ignoring non-numeric upvotes for {filename}")
        attribution = fields[3].strip() if len(fields) > 3 else ""
        entries[filename] = ImageEntry(filename, keywords, upvotes, attribution)
    return entries


def quality_filter(entries: Sequence[ImageEntry], quantile: float) -> list[ImageEntry]:
    """Keep entries at or above the upvote quantile; entries without upvotes stay."""
    votes = [e.upvotes for e in entries if e.upvotes is not None]
    if not votes:
        return list(entries)
    threshold = float(np.quantile(np.asarray(votes, dtype=float), quantile))
    return [e for e in entries if e.upvotes is None or e.upvotes >= threshold]


class ImageCorpusSource(SeededCorpusSource):
    """A directory of media files with optional `meta.tsv`.

    Asset ids are `<source name>:<path relative to the corpus root>`;
    `.gif` files are animated.
    """

    kind = "image"

    def __init__(
        self,
        name: str,
        directory: Path,
        corpus_root: Optional[Path] = None,
        quality_quantile: float = 0.5,
        **kwargs,
    ):
        super().__init__(name, **kwargs)
        self.directory = Path(directory)
        self.corpus_root = Path(corpus_root) if corpus_root else self.directory.parent
        if not self.directory.is_dir():
            raise ContentIOError(f"image corpus {self.directory} is not a directory")

        meta_path = self.directory / "meta.tsv"
        meta = read_image_meta(meta_path) if meta_path.exists() else {}
        files = sorted(
            p.name for p in self.directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
        )
        entries = [meta.get(f, ImageEntry(f)) for f in files]
        self.entries = quality_filter(entries, quality_quantile)

    def _asset(self, entry: ImageEntry, related: bool) -> ImageAsset:
        locator = (self.directory / entry.filename).relative_to(self.corpus_root).as_posix()
        animated = Path(entry.filename).suffix.lower() in ANIMATED_SUFFIXES
        return ImageAsset(
            asset_id=make_asset_id(self.name, locator),
            locator=locator,
            media_kind="animated" if animated else "still",
            attribution=entry.attribution,
            source_name=self.name,
            related_to_seed=related,
        )

    def _key(self, entry: ImageEntry) -> str:
        return self._asset(entry, False).asset_id

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> ImageAsset:
        if not self.entries:
            raise SourceEmptyError(self.name, "image corpus has no files")
        if self._use_seed(seed, rng):
            matches = [e for e in self.entries if _matches(seed, e.searchable)]
            fresh = unused(matches, exclude, self._key)
            if fresh:
                return self._asset(pick(fresh, rng), True)
            if matches:
                logger.debug(f"{self.name}: every image for {seed!r} is used, picking another")
            else:
                logger.debug(f"{self.name}: no image matches {seed!r}, picking at random")
        return self._asset(pick(self.entries, rng, exclude, self._key), False)
