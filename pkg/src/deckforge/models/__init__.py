"""Data models for Deckforge."""

from .chart import ChartCategory, ChartSpec
from .content import CONTENT_KINDS, FLAVOURS, ImageAsset, TextContent
from .deck import (
    TEXT_KINDS,
    Deck,
    Fill,
    Geometry,
    Placeholder,
    Slide,
    SlideMeta,
    SlideTemplate,
    Topic,
    Violation,
    check_fills,
)
from .schema import (
    Binding,
    PresentationSchema,
    SlideGeneratorSpec,
    TagCap,
    WalkConfig,
    WeightFunction,
    load_schema,
)
from .validation import validate_deck

__all__ = [
    "ChartCategory",
    "ChartSpec",
    "CONTENT_KINDS",
    "FLAVOURS",
    "ImageAsset",
    "TextContent",
    "TEXT_KINDS",
    "Deck",
    "Fill",
    "Geometry",
    "Placeholder",
    "Slide",
    "SlideMeta",
    "SlideTemplate",
    "Topic",
    "Violation",
    "check_fills",
    "Binding",
    "PresentationSchema",
    "SlideGeneratorSpec",
    "TagCap",
    "WalkConfig",
    "WeightFunction",
    "load_schema",
    "validate_deck",
]
