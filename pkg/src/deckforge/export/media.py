"""Resolving image assets to bytes for embedding."""

import logging
import os
import tempfile
from pathlib import Path, PurePosixPath
from typing import Optional
from urllib.parse import urlparse

import httpx

from ..errors import OversizedMediaError, UnresolvableMediaError
from ..models.content import ImageAsset
from ..utils.ids import cache_key

logger = logging.getLogger(__name__)

DEFAULT_MAX_MEDIA_BYTES = 20 * 1024 * 1024

MIME_TYPES = {
    ".png": "image/png",
    ".gif": "image/gif",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".bmp": "image/bmp",
}


def media_suffix(locator: str) -> str:
    path = urlparse(locator).path if "://" in locator else locator
    return PurePosixPath(path).suffix.lower()


def mime_type(locator: str) -> str:
    return MIME_TYPES.get(media_suffix(locator), "application/octet-stream")


class MediaResolver:
    """Loads asset bytes from the corpus directory or from downloaded copies.

    URLs are read from `cache_dir/media/` first; without a client an uncached
    URL cannot be resolved.
    """

    def __init__(
        self,
        corpus_dir: Path,
        cache_dir: Optional[Path] = None,
        client: Optional[httpx.Client] = None,
        max_bytes: int = DEFAULT_MAX_MEDIA_BYTES,
    ):
        self.corpus_dir = Path(corpus_dir)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.client = client
        self.max_bytes = max_bytes

    def _check_size(self, asset: ImageAsset, size: int) -> None:
        if size > self.max_bytes:
            raise OversizedMediaError(asset.asset_id, size, self.max_bytes)

    def _cache_path(self, locator: str) -> Optional[Path]:
        if self.cache_dir is None:
            return None
        return self.cache_dir / "media" / f"{cache_key(locator)}{media_suffix(locator)}"

    def _download(self, asset: ImageAsset) -> bytes:
        cached = self._cache_path(asset.locator)
        if cached is not None and cached.exists():
            return cached.read_bytes()
        if self.client is None:
            raise UnresolvableMediaError(asset.asset_id)
        try:
            response = self.client.get(asset.locator)
            response.raise_for_status()
        except httpx.HTTPError as e:
            logger.error(f"Download of {asset.locator} failed: {e}")
            raise UnresolvableMediaError(asset.asset_id) from e
        data = response.content
        self._check_size(asset, len(data))
        if cached is not None:
            self._store(cached, data)
        return data

    @staticmethod
    def _store(path: Path, data: bytes) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".part")
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, path)
        except OSError as e:
            logger.warning(f"Could not cache media at {path}: {e}")

    def resolve(self, asset: ImageAsset) -> bytes:
        """Bytes of `asset`.

        Raises:
            UnresolvableMediaError: missing file or failed download
            OversizedMediaError: larger than `max_bytes`
        """
        if "://" in asset.locator:
            return self._download(asset)
        path = self.corpus_dir / asset.locator
        try:
            size = path.stat().st_size
        except OSError as e:
            raise UnresolvableMediaError(asset.asset_id) from e
        self._check_size(asset, size)
        return path.read_bytes()
