"""Content sources: offline corpora, composites, tupled sources, online adapters."""

from .base import (
    ContentSource,
    Content,
    TupleItem,
    content_asset_ids,
    fetch_image,
    fetch_text,
    fetch_tuple,
    pick,
    unused,
)
from .cache import CachedSource, cached
from .catalog import SourceCatalog, load_catalog
from .composite import CompositeSource, combine
from .corpus import HowToSource, ImageCorpusSource, TextCorpusSource, extract_action
from .online import GifSearchSource, HowToSearchSource, ImageSearchSource, SubredditSource
from .tupled import CaptionPairSource, GrammarTextSource, LinkedTupleSource

__all__ = [
    "ContentSource",
    "Content",
    "TupleItem",
    "content_asset_ids",
    "fetch_image",
    "fetch_text",
    "fetch_tuple",
    "pick",
    "unused",
    "CachedSource",
    "cached",
    "SourceCatalog",
    "load_catalog",
    "CompositeSource",
    "combine",
    "HowToSource",
    "ImageCorpusSource",
    "TextCorpusSource",
    "extract_action",
    "GifSearchSource",
    "HowToSearchSource",
    "ImageSearchSource",
    "SubredditSource",
    "CaptionPairSource",
    "GrammarTextSource",
    "LinkedTupleSource",
]
