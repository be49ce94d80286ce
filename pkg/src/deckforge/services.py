"""Wiring: corpora, graph and grammars bundled into the services generators use."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import httpx
import numpy as np

from .config import DeckforgeConfig, get_data_dir
from .content.base import ContentSource, fetch_text
from .content.catalog import load_catalog
from .content.online import make_client
from .errors import ContentIOError, SourceError
from .grammar.expand import ExpansionBudget
from .grammar.functions import FunctionRegistry, default_registry, load_word_list
from .grammar.grammar import Grammar, load_grammar_dir
from .semantic.conceptnet import ConceptNetClient
from .semantic.graph import RelationProvider, load_graph, related_locations, related_terms

logger = logging.getLogger(__name__)

HOWTO_SOURCE = "howto_titles"
RELATED_LIMIT = 10


@dataclass(frozen=True)
class Services:
    """Everything a slide generator reads. Shared read-only across workers."""

    graph: RelationProvider
    grammar: Grammar
    registry: FunctionRegistry
    sources: Mapping[str, ContentSource]
    corpus_dir: Path
    generic_locations: tuple[str, ...] = ()
    presenter: Optional[str] = None
    budget: ExpansionBudget = field(default_factory=ExpansionBudget)

    def source(self, name: str) -> ContentSource:
        try:
            return self.sources[name]
        except KeyError:
            raise KeyError(f"no content source named {name!r}") from None


def _pick_neighbour(
    provider: RelationProvider, lookup, value: str, rng: np.random.Generator
) -> Optional[str]:
    try:
        relations = lookup(provider, value, RELATED_LIMIT)
    except SourceError as e:
        logger.warning(f"Neighbour lookup for {value!r} failed, rejecting the slot: {e}")
        return None
    if not relations:
        return None
    return relations[int(rng.integers(len(relations)))].to_term


def bind_lookups(
    registry: FunctionRegistry,
    graph: RelationProvider,
    howto: Optional[ContentSource] = None,
) -> FunctionRegistry:
    """Register the content-backed functions `related_term`, `related_location`
    and (when a how-to source exists) `wikihow_action`."""
    registry = registry.register(
        "related_term",
        "transform",
        lambda value, rng: _pick_neighbour(graph, related_terms, value, rng),
        takes_rng=True,
    ).register(
        "related_location",
        "transform",
        lambda value, rng: _pick_neighbour(graph, related_locations, value, rng),
        takes_rng=True,
    )
    if howto is not None:
        registry = registry.register(
            "wikihow_action",
            "transform",
            lambda value, rng: fetch_text(howto, value, rng).text,
            takes_rng=True,
        )
    return registry


def load_generic_locations(path: Path) -> tuple[str, ...]:
    if not path.exists():
        return ()
    return tuple(sorted(load_word_list(path)))


def build_services(
    config: DeckforgeConfig,
    online: bool = False,
    presenter: Optional[str] = None,
    client: Optional[httpx.Client] = None,
    env: Optional[Mapping[str, str]] = None,
) -> Services:
    """Load graph, grammars and corpora named by `config` into a Services bundle.

    In online mode the graph becomes a ConceptNet client and descriptors with
    an `online:` block get their adapter, offline corpus fallback and cache.

    Raises:
        ContentIOError: unreadable graph, grammar or corpus files
        SchemaError: invalid source descriptors
    """
    data_dir = get_data_dir()
    corpus_dir = config.resolved_corpus_dir()

    if online:
        client = client or make_client(config.http_timeout)
        graph: RelationProvider = ConceptNetClient(
            config.conceptnet_url, cache_dir=config.cache_dir, client=client
        )
    else:
        graph = load_graph(config.resolved_graph_path())

    grammar_dir = config.resolved_grammar_dir()
    if not grammar_dir.is_dir():
        raise ContentIOError(f"grammar directory {grammar_dir} does not exist")
    grammar = load_grammar_dir(grammar_dir)

    catalog = load_catalog(corpus_dir, config.random_fallback_probability, config.quality_quantile)
    if online:
        catalog.enable_online(client, config.cache_dir, env)

    howto = catalog.get(HOWTO_SOURCE) if HOWTO_SOURCE in catalog.names() else None
    registry = bind_lookups(default_registry(), graph, howto)
    budget = ExpansionBudget()
    catalog.bind_grammar(grammar, registry, budget)
    sources = catalog.build_all()

    logger.info(
        f"Services ready: {len(sources)} sources, {len(grammar.rules)} grammar rules, "
        f"{'online' if online else 'offline'}"
    )
    return Services(
        graph=graph,
        grammar=grammar,
        registry=registry,
        sources=sources,
        corpus_dir=corpus_dir,
        generic_locations=load_generic_locations(data_dir / "generic_locations.txt"),
        presenter=presenter or config.presenter,
        budget=budget,
    )
