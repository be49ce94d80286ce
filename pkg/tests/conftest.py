"""Test fixtures for Deckforge."""

import shutil
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pytest

from deckforge.config import DeckforgeConfig, bundled_schema_path, get_data_dir
from deckforge.content.base import NO_EXCLUDE, ContentSource, pick
from deckforge.content.corpus import HowToSource, ImageCorpusSource
from deckforge.grammar.expand import ExpansionBudget
from deckforge.grammar.functions import default_registry
from deckforge.grammar.grammar import build_grammar
from deckforge.models.content import ImageAsset, TextContent
from deckforge.models.schema import PresentationSchema, load_schema
from deckforge.semantic.graph import Relation, SemanticGraph
from deckforge.services import Services, bind_lookups, build_services

FIXTURE_TOPICS = (
    "cat", "dog", "rug", "car", "coffee", "pizza", "ocean", "robot", "garden", "music",
    "bicycle", "book", "rain", "tree", "money", "phone", "bread", "moon", "shoe", "chair",
)

FIXTURE_NOUNS = frozenset({"cat", "dog", "rug", "fish", "car", "baker"})


def sample_png() -> bytes:
    """Bytes of a small bundled PNG (32x18)."""
    return (get_data_dir() / "corpus" / "images_neutral" / "cat_sofa.png").read_bytes()


class CountingSource(ContentSource):
    """In-memory source over fixed items that counts fetch calls."""

    def __init__(self, name: str, items: Sequence, kind: str = "text", **kwargs):
        super().__init__(name, **kwargs)
        self.kind = kind
        self.items = list(items)
        self.calls = 0
        self.seeds: list[str] = []

    def fetch(self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE):
        self.calls += 1
        self.seeds.append(seed)
        key = (lambda item: item.asset_id) if self.kind == "image" else str
        return pick(self.items, rng, exclude, key)


def image_asset(name: str, source: str = "fixture") -> ImageAsset:
    return ImageAsset(asset_id=f"{source}:{name}", locator=name, source_name=source)


@pytest.fixture
def rng():
    """Fixed-seed numpy generator."""
    return np.random.default_rng(42)


@pytest.fixture
def fixture_graph():
    """Small word graph: cat -> rug -> floor -> wood -> tree, plus locations."""
    rows = [
        ("cat", "related_to", "rug", 1.0),
        ("cat", "related_to", "mouse", 0.5),
        ("rug", "related_to", "floor", 1.0),
        ("rug", "related_to", "cat", 1.0),
        ("floor", "related_to", "wood", 1.0),
        ("wood", "related_to", "tree", 1.0),
        ("tree", "related_to", "leaf", 1.0),
        ("leaf", "related_to", "garden", 1.0),
        ("mouse", "related_to", "cheese", 1.0),
        ("cheese", "related_to", "pizza", 1.0),
        ("sun", "related_to", "sky", 3.0),
        ("sun", "related_to", "beach", 2.0),
        ("sun", "related_to", "summer", 1.0),
        ("fish", "at_location", "aquarium", 3.0),
        ("fish", "at_location", "river", 2.0),
        ("fish", "at_location", "market", 1.0),
        ("fish", "related_to", "water", 1.0),
    ]
    return SemanticGraph(
        Relation(from_term=f, relation_kind=k, to_term=t, weight=w) for f, k, t, w in rows
    )


@pytest.fixture
def write_file(tmp_path):
    """Write text to a path under tmp_path and return the path."""

    def _write(relative: str, text: str) -> Path:
        path = tmp_path / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def image_dir(tmp_path):
    """Create an image corpus directory with the given PNG files and meta rows."""

    def _make(name: str, files: Sequence[str], meta: Optional[Sequence[str]] = None) -> Path:
        directory = tmp_path / "corpus" / name
        directory.mkdir(parents=True, exist_ok=True)
        source = get_data_dir() / "corpus" / "images_neutral" / "cat_sofa.png"
        for filename in files:
            shutil.copyfile(source, directory / filename)
        if meta is not None:
            (directory / "meta.tsv").write_text("\n".join(meta) + "\n", encoding="utf-8")
        return directory

    return _make


@pytest.fixture
def howto_source():
    """How-to titles containing "How to Pet a Cat"."""
    items = [
        TextContent(text=title, source_name="howto_titles")
        for title in ("How to Pet a Cat", "How to Walk a Dog", "How to Bake Bread")
    ]
    return HowToSource("howto_titles", items)


@pytest.fixture
def make_services(fixture_graph, howto_source):
    """Build a Services bundle from a grammar dict and named sources."""

    def _make(
        rules: dict,
        sources: Optional[dict[str, ContentSource]] = None,
        graph=None,
        presenter: Optional[str] = None,
        corpus_dir: Optional[Path] = None,
    ) -> Services:
        graph = graph or fixture_graph
        registry = bind_lookups(default_registry(FIXTURE_NOUNS), graph, howto_source)
        return Services(
            graph=graph,
            grammar=build_grammar(rules),
            registry=registry,
            sources=dict(sources or {}),
            corpus_dir=corpus_dir or get_data_dir() / "corpus",
            generic_locations=("home", "the office", "the park", "the beach"),
            presenter=presenter,
            budget=ExpansionBudget(),
        )

    return _make


@pytest.fixture
def single_image_corpus(image_dir):
    """An image source holding exactly one file."""
    directory = image_dir("only_one", ["lonely.png"])
    return ImageCorpusSource("only_one", directory, corpus_root=directory.parent)


def _placeholder(pid: str, kind: str, y: float = 0.1) -> dict:
    return {"id": pid, "kind": kind, "geometry": {"x": 0.1, "y": y, "width": 0.8, "height": 0.3}}


@pytest.fixture
def build_schema():
    """Build a PresentationSchema around a title generator plus extra generators."""

    def _build(
        generators: Sequence[dict] = (),
        templates: Sequence[dict] = (),
        tag_caps: Sequence[dict] = (),
        fallback: Optional[str] = None,
        walk: Optional[dict] = None,
    ) -> PresentationSchema:
        title = {
            "name": "title_slide",
            "template_id": "title",
            "tags": ["title"],
            "weight_fn": {"curve": "only_first", "level": 1.0},
            "bindings": {"title": {"kind": "grammar", "ref": "talk_title"}},
        }
        data = {
            "name": "fixture_schema",
            "seed_generator": walk or {"min_gap": 3, "max_gap": 6},
            "generators": [title, *generators],
            "templates": [
                {"template_id": "title", "placeholders": [_placeholder("title", "title_text")]},
                {"template_id": "picture", "placeholders": [_placeholder("image", "image")]},
                {
                    "template_id": "statement",
                    "placeholders": [_placeholder("body", "body_text")],
                },
                *templates,
            ],
            "tag_caps": list(tag_caps),
            "fallback_generator": fallback,
        }
        return PresentationSchema.model_validate(data)

    return _build


@pytest.fixture(scope="session")
def default_schema():
    """The bundled improvised TED talk schema."""
    return load_schema(bundled_schema_path())


@pytest.fixture(scope="session")
def pecha_kucha_schema():
    return load_schema(bundled_schema_path("pecha_kucha"))


@pytest.fixture(scope="session")
def offline_services():
    """Services over the bundled corpora and graph, offline."""
    return build_services(DeckforgeConfig(), online=False)


@pytest.fixture
def counting_source():
    """The CountingSource class, for building in-memory sources."""
    return CountingSource


@pytest.fixture
def asset():
    """Factory for in-memory image assets."""
    return image_asset
