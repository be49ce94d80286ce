"""Corpus descriptors: turning `corpus/<name>/source.yaml` files into sources."""

import logging
from pathlib import Path
from typing import Literal, Mapping, Optional

import httpx
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config import get_provider_key
from ..errors import ContentIOError, SchemaError
from ..grammar.expand import ExpansionBudget
from ..grammar.functions import FunctionRegistry
from ..grammar.grammar import Grammar
from .base import ContentSource
from .cache import cached
from .composite import CompositeSource
from .corpus import HowToSource, ImageCorpusSource, TextCorpusSource
from .online import ADAPTERS
from .tupled import CaptionPairSource, GrammarTextSource, LinkedTupleSource, read_caption_table

logger = logging.getLogger(__name__)

DESCRIPTOR_FILE = "source.yaml"
COMPOSITES_FILE = "composites.yaml"

SourceFormat = Literal["lines", "quotes", "howto", "images", "grammar", "caption_table", "linked"]

FORMAT_KINDS = {
    "lines": "text",
    "quotes": "text",
    "howto": "text",
    "grammar": "text",
    "images": "image",
    "caption_table": "tupled",
    "linked": "tupled",
}


class OnlineSpec(BaseModel):
    """Online adapter block of a descriptor."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    provider: Literal["gif-search", "subreddit", "image-search", "howto-search"]
    base_url: str
    key: Optional[str] = Field(None, description="Credential name, read from DECKFORGE_<KEY>_KEY")
    subreddit: Optional[str] = None


class LinkedPart(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    image: str


class SourceDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    kind: Literal["text", "image", "tupled"]
    format: SourceFormat
    flavour: Literal[
        "neutral", "odd", "cute", "vintage", "inspirational", "chart", "gif"
    ] = "neutral"
    tags: tuple[str, ...] = ()
    supports_seed: bool = True
    file: Optional[str] = None
    rule: Optional[str] = None
    children: tuple[str, ...] = ()
    parts: tuple[LinkedPart, ...] = ()
    online: Optional[OnlineSpec] = None

    @model_validator(mode="after")
    def _check_format(self) -> "SourceDescriptor":
        if FORMAT_KINDS[self.format] != self.kind:
            raise ValueError(
                f"format {self.format} produces {FORMAT_KINDS[self.format]}, not {self.kind}"
            )
        if self.format in ("lines", "quotes", "howto", "caption_table") and not self.file:
            raise ValueError(f"format {self.format} needs a file")
        if self.format == "grammar" and not self.rule:
            raise ValueError("format grammar needs a rule")
        if self.format == "caption_table" and not self.children:
            raise ValueError("format caption_table needs children")
        if self.format == "linked" and not self.parts:
            raise ValueError("format linked needs parts")
        return self


class CompositeChild(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: str
    weight: float = Field(1.0, ge=0.0)


class CompositeDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    flavour: Optional[str] = None
    children: tuple[CompositeChild, ...] = Field(..., min_length=1)


def _read_yaml(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ContentIOError(f"cannot read {path}: {e}") from e
    except yaml.YAMLError as e:
        raise SchemaError(f"{path} is not valid YAML: {e}") from e
    if not isinstance(data, dict):
        raise SchemaError(f"{path} must hold a mapping")
    return data


class SourceCatalog:
    """Lazily builds named sources from descriptors.

    Text, quote, how-to and image corpora can be built at once; grammar,
    caption and linked sources need `bind_grammar` first.
    """

    def __init__(
        self,
        corpus_dir: Path,
        descriptors: Mapping[str, SourceDescriptor],
        composites: Mapping[str, CompositeDescriptor],
        random_fallback_probability: float = 0.0,
        quality_quantile: float = 0.5,
    ):
        self.corpus_dir = Path(corpus_dir)
        self.descriptors = dict(descriptors)
        self.composites = dict(composites)
        self.random_fallback_probability = random_fallback_probability
        self.quality_quantile = quality_quantile
        clashes = sorted(set(self.descriptors) & set(self.composites))
        if clashes:
            raise SchemaError(f"source names declared twice: {clashes}")

        self._built: dict[str, ContentSource] = {}
        self._building: list[str] = []
        self._grammar: Optional[Grammar] = None
        self._registry: Optional[FunctionRegistry] = None
        self._budget: Optional[ExpansionBudget] = None
        self._client: Optional[httpx.Client] = None
        self._cache_dir: Optional[Path] = None
        self._env: Optional[Mapping[str, str]] = None

    def names(self) -> list[str]:
        return sorted([*self.descriptors, *self.composites])

    def enable_online(
        self, client: httpx.Client, cache_dir: Path, env: Optional[Mapping[str, str]] = None
    ) -> None:
        """Wrap descriptors with an `online:` block in their adapter plus the disk cache."""
        self._client = client
        self._cache_dir = Path(cache_dir)
        self._env = env

    def bind_grammar(
        self, grammar: Grammar, registry: FunctionRegistry, budget: Optional[ExpansionBudget] = None
    ) -> None:
        self._grammar = grammar
        self._registry = registry
        self._budget = budget

    def get(self, name: str) -> ContentSource:
        if name in self._built:
            return self._built[name]
        if name in self._building:
            cycle = " -> ".join([*self._building, name])
            raise SchemaError(f"source descriptors reference each other in a cycle: {cycle}")
        if name not in self.descriptors and name not in self.composites:
            raise SchemaError(f"unknown content source {name!r}")

        self._building.append(name)
        try:
            if name in self.composites:
                source = self._build_composite(self.composites[name])
            else:
                source = self._build(self.descriptors[name])
        finally:
            self._building.pop()
        self._built[name] = source
        return source

    def build_all(self) -> dict[str, ContentSource]:
        return {name: self.get(name) for name in self.names()}

    def _path(self, descriptor: SourceDescriptor) -> Path:
        return self.corpus_dir / descriptor.name / descriptor.file

    def _build(self, d: SourceDescriptor) -> ContentSource:
        common = {"flavour": d.flavour, "supports_seed": d.supports_seed, "tags": d.tags}
        corpus = {**common, "random_fallback_probability": self.random_fallback_probability}

        if d.format in ("lines", "quotes"):
            source = TextCorpusSource.from_lines(
                d.name, self._path(d), quotes=d.format == "quotes", **corpus
            )
        elif d.format == "howto":
            source = HowToSource.from_lines(d.name, self._path(d), **corpus)
        elif d.format == "images":
            source = ImageCorpusSource(
                d.name,
                self.corpus_dir / d.name,
                corpus_root=self.corpus_dir,
                quality_quantile=self.quality_quantile,
                **corpus,
            )
        elif d.format == "grammar":
            self._require_grammar(d.name)
            source = GrammarTextSource(
                d.name, self._grammar, d.rule, self._registry, self._budget, **common
            )
        elif d.format == "caption_table":
            rows = read_caption_table(self._path(d))
            source = CaptionPairSource(d.name, rows, [self.get(c) for c in d.children], **common)
        else:
            parts = [(self.get(p.text), self.get(p.image)) for p in d.parts]
            source = LinkedTupleSource(d.name, parts, **common)

        if d.online is not None and self._client is not None:
            source = self._wrap_online(d, source)
        return source

    def _wrap_online(self, d: SourceDescriptor, fallback: ContentSource) -> ContentSource:
        spec = d.online
        adapter_cls = ADAPTERS[spec.provider]
        extra = {}
        if spec.provider == "subreddit":
            extra = {
                "subreddit": spec.subreddit or d.name,
                "quality_quantile": self.quality_quantile,
            }
        adapter = adapter_cls(
            d.name,
            spec.base_url,
            self._client,
            fallback=fallback,
            api_key=get_provider_key(spec.key, self._env) if spec.key else None,
            flavour=d.flavour,
            supports_seed=d.supports_seed,
            tags=d.tags,
            **extra,
        )
        logger.debug(f"{d.name}: online via {spec.provider} ({spec.base_url})")
        return cached(adapter, self._cache_dir)

    def _build_composite(self, d: CompositeDescriptor) -> ContentSource:
        children = [(self.get(c.source), c.weight) for c in d.children]
        return CompositeSource(d.name, children, d.flavour)

    def _require_grammar(self, name: str) -> None:
        if self._grammar is None or self._registry is None:
            raise SchemaError(f"{name}: grammar sources need bind_grammar() first")


def load_catalog(
    corpus_dir: Path | str,
    random_fallback_probability: float = 0.0,
    quality_quantile: float = 0.5,
) -> SourceCatalog:
    """Read every `corpus/<name>/source.yaml` and `corpus/composites.yaml`.

    Raises:
        ContentIOError: corpus directory or descriptor unreadable
        SchemaError: descriptor content invalid
    """
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise ContentIOError(f"corpus directory {corpus_dir} does not exist")

    descriptors: dict[str, SourceDescriptor] = {}
    for path in sorted(corpus_dir.glob(f"*/{DESCRIPTOR_FILE}")):
        data = {"name": path.parent.name, **_read_yaml(path)}
        try:
            descriptors[path.parent.name] = SourceDescriptor.model_validate(data)
        except ValidationError as e:
            raise SchemaError(f"invalid source descriptor {path}: {e}") from e

    composites: dict[str, CompositeDescriptor] = {}
    composites_path = corpus_dir / COMPOSITES_FILE
    if composites_path.exists():
        for name, data in _read_yaml(composites_path).items():
            try:
                composites[name] = CompositeDescriptor.model_validate(
                    {"name": name, **(data or {})}
                )
            except ValidationError as e:
                raise SchemaError(f"invalid composite {name!r} in {composites_path}: {e}") from e

    logger.debug(f"Catalog {corpus_dir}: {len(descriptors)} sources, {len(composites)} composites")
    return SourceCatalog(
        corpus_dir, descriptors, composites, random_fallback_probability, quality_quantile
    )
