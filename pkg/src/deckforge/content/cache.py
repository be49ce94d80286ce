"""On-disk cache for online content sources."""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import ContentIOError
from ..models.content import ImageAsset, TextContent
from ..utils.ids import cache_key
from .base import NO_EXCLUDE, Content, ContentSource, content_asset_ids

logger = logging.getLogger(__name__)


def encode_content(content: Content) -> dict[str, Any]:
    if isinstance(content, TextContent):
        return {"kind": "text", "value": content.model_dump()}
    if isinstance(content, ImageAsset):
        return {"kind": "image", "value": content.model_dump()}
    return {
        "kind": "tupled",
        "value": [{"caption": caption, **encode_content(item)} for caption, item in content],
    }


def decode_content(data: dict[str, Any]) -> Content:
    kind = data["kind"]
    if kind == "text":
        return TextContent.model_validate(data["value"])
    if kind == "image":
        return ImageAsset.model_validate(data["value"])
    if kind == "tupled":
        return [(item["caption"], decode_content(item)) for item in data["value"]]
    raise ValueError(f"unknown cached content kind {kind!r}")


class CachedSource(ContentSource):
    """Serves repeat `(source, seed)` fetches from `<cache_dir>/content/`.

    Entries are written to a temporary file and renamed into place, so
    concurrent misses on one key both fetch and the last writer wins. A
    cached item the caller excludes is bypassed rather than served.
    """

    online = True

    def __init__(self, inner: ContentSource, cache_dir: Path):
        super().__init__(inner.name, inner.flavour, inner.supports_seed, inner.tags)
        self.kind = inner.kind
        self.inner = inner
        self.directory = Path(cache_dir) / "content"
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ContentIOError(f"cache directory {self.directory} is not usable: {e}") from e
        if not os.access(self.directory, os.W_OK):
            raise ContentIOError(f"cache directory {self.directory} is not writable")

    def _path(self, seed: str) -> Path:
        return self.directory / f"{cache_key(self.inner.name, seed)}.json"

    def _read(self, path: Path):
        try:
            return decode_content(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as e:
            logger.warning(f"Ignoring unreadable cache entry {path.name}: {e}")
            return None

    def _write(self, path: Path, content: Content) -> None:
        try:
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        except OSError as e:
            logger.warning(f"Could not write cache entry {path.name}: {e}")
            return
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(encode_content(content), f, ensure_ascii=False, sort_keys=True)
            os.replace(tmp, path)
        except (OSError, TypeError, ValueError) as e:
            logger.warning(f"Could not write cache entry {path.name}: {e}")
            Path(tmp).unlink(missing_ok=True)

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> Content:
        path = self._path(seed)
        if path.exists():
            content = self._read(path)
            if content is not None:
                if not exclude or not set(content_asset_ids(content)) & exclude:
                    logger.debug(f"{self.name}: cache hit for {seed!r}")
                    return content
                return self.inner.fetch(seed, rng, exclude)

        content = self.inner.fetch(seed, rng, exclude)
        self._write(path, content)
        return content


def cached(source: ContentSource, cache_dir: Path) -> ContentSource:
    """Wrap an online source with the disk cache; offline sources pass through.

    Raises:
        ContentIOError: cache directory cannot be created or written
    """
    if not source.online:
        return source
    return CachedSource(source, cache_dir)
