"""Optional online adapters behind the content source contract.

Each adapter queries one provider over HTTP and falls back to its offline
corpus when the request fails or finds nothing for the seed.
"""

import logging
from abc import abstractmethod
from pathlib import PurePosixPath
from typing import Any, Optional
from urllib.parse import urlparse

import httpx
import numpy as np

from ..errors import SourceUnavailableError
from ..models.content import ImageAsset, TextContent
from ..utils.ids import make_asset_id
from .base import NO_EXCLUDE, Content, ContentSource, pick, unused
from .corpus import ANIMATED_SUFFIXES, IMAGE_SUFFIXES, extract_action

logger = logging.getLogger(__name__)

USER_AGENT = "deckforge (+https://pypi.org/project/deckforge/)"


def make_client(timeout: float = 10.0) -> httpx.Client:
    return httpx.Client(timeout=timeout, headers={"user-agent": USER_AGENT}, follow_redirects=True)


def _url_suffix(url: str) -> str:
    return PurePosixPath(urlparse(url).path).suffix.lower()


class OnlineSource(ContentSource):
    """Base adapter: search the provider, pick a hit, else use the fallback."""

    online = True
    provider = "online"

    def __init__(
        self,
        name: str,
        base_url: str,
        client: httpx.Client,
        fallback: Optional[ContentSource] = None,
        api_key: Optional[str] = None,
        **kwargs,
    ):
        super().__init__(name, **kwargs)
        if fallback is not None and fallback.kind != self.kind:
            raise ValueError(f"{name}: fallback {fallback.name} is not a {self.kind} source")
        self.base_url = base_url.rstrip("/")
        self.client = client
        self.fallback = fallback
        self.api_key = api_key

    def _get_json(self, url: str, params: dict[str, Any]) -> Any:
        response = self.client.get(url, params=params)
        response.raise_for_status()
        return response.json()

    @abstractmethod
    def search(self, seed: str) -> list[Content]:
        """Seed-related results from the provider (may be empty)."""

    def _key(self, item: Content) -> str:
        return item.asset_id if isinstance(item, ImageAsset) else str(item)

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> Content:
        try:
            results = self.search(seed) if seed else []
        except (httpx.HTTPError, ValueError, KeyError, TypeError) as e:
            if self.fallback is None:
                raise SourceUnavailableError(
                    self.name, f"{self.provider} request failed: {e}"
                ) from e
            logger.warning(f"{self.name}: {self.provider} failed, using offline corpus: {e}")
            return self.fallback.fetch(seed, rng, exclude)

        fresh = unused(results, exclude, self._key)
        if fresh:
            return pick(fresh, rng)
        if results and self.fallback is None:
            return pick(results, rng)
        if self.fallback is None:
            raise SourceUnavailableError(self.name, f"{self.provider} found nothing for {seed!r}")
        if results:
            logger.debug(f"{self.name}: every {self.provider} hit is used, trying the corpus")
            return self.fallback.fetch(seed, rng, exclude)
        logger.debug(f"{self.name}: no {self.provider} hits for {seed!r}, random corpus item")
        return self.fallback.fetch("", rng, exclude)


class GifSearchSource(OnlineSource):
    """Giphy-style search: `GET /v1/gifs/search?q=…` -> data[].images.original.url."""

    kind = "image"
    provider = "gif-search"

    def search(self, seed: str) -> list[Content]:
        payload = self._get_json(
            f"{self.base_url}/v1/gifs/search",
            {"api_key": self.api_key or "", "q": seed, "limit": 25, "rating": "pg"},
        )
        assets = []
        for item in payload.get("data", []):
            url = item["images"]["original"]["url"]
            assets.append(
                ImageAsset(
                    asset_id=make_asset_id(self.name, url),
                    locator=url,
                    media_kind="animated",
                    attribution=item.get("username") or "",
                    source_name=self.name,
                    related_to_seed=True,
                )
            )
        return assets


class SubredditSource(OnlineSource):
    """Reddit-style listing search; image posts at or above the upvote quantile."""

    kind = "image"
    provider = "subreddit"

    def __init__(self, *args, subreddit: str, quality_quantile: float = 0.5, **kwargs):
        super().__init__(*args, **kwargs)
        self.subreddit = subreddit
        self.quality_quantile = quality_quantile

    def search(self, seed: str) -> list[Content]:
        payload = self._get_json(
            f"{self.base_url}/r/{self.subreddit}/search.json",
            {"q": seed, "restrict_sr": 1, "limit": 50},
        )
        posts = [child["data"] for child in payload["data"]["children"]]
        posts = [p for p in posts if _url_suffix(p.get("url", "")) in IMAGE_SUFFIXES]
        if not posts:
            return []

        ups = np.asarray([float(p.get("ups", 0)) for p in posts])
        threshold = float(np.quantile(ups, self.quality_quantile))
        return [
            ImageAsset(
                asset_id=make_asset_id(self.name, p["url"]),
                locator=p["url"],
                media_kind="animated" if _url_suffix(p["url"]) in ANIMATED_SUFFIXES else "still",
                attribution=f"r/{self.subreddit}",
                source_name=self.name,
                related_to_seed=True,
            )
            for p, votes in zip(posts, ups)
            if votes >= threshold
        ]


class ImageSearchSource(OnlineSource):
    """Generic JSON image search: `GET <base>?q=…&key=…` -> items[].link."""

    kind = "image"
    provider = "image-search"

    def search(self, seed: str) -> list[Content]:
        params = {"q": seed, "searchType": "image", "num": 10}
        if self.api_key:
            params["key"] = self.api_key
        payload = self._get_json(self.base_url, params)
        return [
            ImageAsset(
                asset_id=make_asset_id(self.name, item["link"]),
                locator=item["link"],
                media_kind=(
                    "animated" if _url_suffix(item["link"]) in ANIMATED_SUFFIXES else "still"
                ),
                attribution=item.get("displayLink", ""),
                source_name=self.name,
                related_to_seed=True,
            )
            for item in payload.get("items", [])
        ]


class HowToSearchSource(OnlineSource):
    """MediaWiki-style title search over a how-to wiki; yields action phrases."""

    kind = "text"
    provider = "howto-search"

    def search(self, seed: str) -> list[Content]:
        payload = self._get_json(
            f"{self.base_url}/api.php",
            {
                "action": "query",
                "list": "search",
                "srsearch": seed,
                "format": "json",
                "srlimit": 20,
            },
        )
        results = []
        for hit in payload["query"]["search"]:
            action = extract_action(hit["title"])
            if action:
                results.append(
                    TextContent(text=action, source_name=self.name, related_to_seed=True)
                )
        return results


ADAPTERS: dict[str, type[OnlineSource]] = {
    "gif-search": GifSearchSource,
    "subreddit": SubredditSource,
    "image-search": ImageSearchSource,
    "howto-search": HowToSearchSource,
}
