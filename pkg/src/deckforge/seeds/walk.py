"""Per-slide seed words from a constrained walk over the word graph."""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import SourceError
from ..models.deck import Topic
from ..models.schema import WalkConfig
from ..semantic.graph import Relation, RelationProvider, related_terms
from ..utils.sampling import roulette_select

logger = logging.getLogger(__name__)


class SeedSequence(BaseModel):
    """Slide seeds plus the provenance of each one.

    `parents[i]` is the seed whose neighbour `seeds[i]` was drawn from
    (None for topic slides). `anchor_positions` are the positions forced to
    the topic; `fallback_positions` fell back to the topic after the walk
    ran out of neighbours.
    """

    model_config = ConfigDict(frozen=True)

    topic: str
    seeds: tuple[str, ...] = Field(..., min_length=1)
    parents: tuple[Optional[str], ...]
    anchor_positions: tuple[int, ...]
    fallback_positions: tuple[int, ...] = ()

    @property
    def topic_positions(self) -> tuple[int, ...]:
        return tuple(i for i, seed in enumerate(self.seeds) if seed == self.topic)

    def __len__(self) -> int:
        return len(self.seeds)

    def __getitem__(self, index: int) -> str:
        return self.seeds[index]

    def is_fallback(self, index: int) -> bool:
        return index in self.fallback_positions


def plan_anchors(n: int, config: WalkConfig, rng: np.random.Generator) -> list[int]:
    """Positions forced to the topic: 0, each next one a uniform gap later, and n-1."""
    anchors = [0]
    if n == 1:
        return anchors
    position = 0
    while True:
        gap = int(rng.integers(config.min_gap, config.max_gap + 1))
        if position + gap >= n - 1:
            break
        position += gap
        anchors.append(position)
    anchors.append(n - 1)
    return anchors


def _candidates(
    graph: RelationProvider, source: str, banned: set[str], config: WalkConfig
) -> list[Relation]:
    try:
        relations = related_terms(graph, source, config.neighbor_limit)
    except SourceError as e:
        logger.warning(f"Neighbour lookup for {source!r} failed, treating as dead end: {e}")
        return []

    seen: set[str] = set()
    usable = []
    for relation in relations:
        if relation.to_term in banned or relation.to_term in seen:
            continue
        seen.add(relation.to_term)
        usable.append(relation)
    return usable


def _choose(relations: list[Relation], config: WalkConfig, rng: np.random.Generator) -> Relation:
    weights = [r.weight for r in relations]
    if config.walk_policy == "uniform" or sum(weights) <= 0:
        return relations[int(rng.integers(len(relations)))]
    return relations[roulette_select(weights, rng)]


def generate_seeds(
    topic: Topic | str,
    n: int,
    graph: RelationProvider,
    config: WalkConfig,
    rng: np.random.Generator,
) -> SeedSequence:
    """Walk the graph from the topic to produce one seed per slide.

    The topic sits on the first and last slide and returns every
    `min_gap`..`max_gap` slides in between. Every other seed is a neighbour
    of the previous seed; when that seed is a dead end the walk retries from
    the seeds two, four, ... positions earlier (up to `max_backtrack_depth`
    ancestors) and finally falls back to the topic.

    Never fails: a graph without usable edges yields an all-topic sequence.
    """
    if n < 1:
        raise ValueError(f"deck length must be positive, got {n}")
    word = topic.word if isinstance(topic, Topic) else Topic(word=topic).word

    anchors = plan_anchors(n, config, rng)
    anchor_set = set(anchors)

    seeds: list[str] = []
    parents: list[Optional[str]] = []
    fallbacks: list[int] = []

    for i in range(n):
        if i in anchor_set:
            seeds.append(word)
            parents.append(None)
            continue

        previous = seeds[i - 1]
        banned = {word, previous}
        sources = [i - 1] + [i - 2 * k for k in range(1, config.max_backtrack_depth + 1)]

        chosen: Optional[Relation] = None
        for source_index in sources:
            if source_index < 0:
                break
            usable = _candidates(graph, seeds[source_index], banned, config)
            if usable:
                chosen = _choose(usable, config, rng)
                break

        if chosen is None:
            logger.debug(f"Seed walk exhausted at position {i}, falling back to topic {word!r}")
            seeds.append(word)
            parents.append(None)
            fallbacks.append(i)
        else:
            seeds.append(chosen.to_term)
            parents.append(chosen.from_term)

    return SeedSequence(
        topic=word,
        seeds=tuple(seeds),
        parents=tuple(parents),
        anchor_positions=tuple(anchors),
        fallback_positions=tuple(fallbacks),
    )
