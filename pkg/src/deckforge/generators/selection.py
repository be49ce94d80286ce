"""Position weights and roulette-wheel generator selection."""

import logging
from typing import Sequence

import numpy as np

from ..errors import NoAdmissibleGeneratorError
from ..models.schema import PresentationSchema, SlideGeneratorSpec
from ..utils.sampling import roulette_select
from .knowledge import GenerationKnowledge

logger = logging.getLogger(__name__)


def eval_weight(spec: SlideGeneratorSpec, position: int, total: int) -> float:
    """Suitability of `spec` for slide `position` of a `total`-slide deck."""
    return spec.eval_weight(position, total)


def admissible(
    roster: Sequence[SlideGeneratorSpec],
    position: int,
    total: int,
    knowledge: GenerationKnowledge,
    schema: PresentationSchema,
) -> list[tuple[SlideGeneratorSpec, float]]:
    """Specs that can still be used here, with their positive weights."""
    out = []
    for spec in roster:
        used = knowledge.generator_count(spec.name)
        if spec.max_per_deck is not None and used >= spec.max_per_deck:
            continue
        over_cap = False
        for tag in spec.tags:
            allowed = schema.allowed_count(tag, total)
            if allowed is not None and knowledge.tag_count(tag) + 1 > allowed:
                over_cap = True
                break
        if over_cap:
            continue
        weight = eval_weight(spec, position, total)
        if weight > 0:
            out.append((spec, weight))
    return out


def select_generator(
    roster: Sequence[SlideGeneratorSpec],
    position: int,
    total: int,
    knowledge: GenerationKnowledge,
    schema: PresentationSchema,
    rng: np.random.Generator,
) -> SlideGeneratorSpec:
    """Roulette-select among admissible specs by position weight.

    Specs are inadmissible when their tags would exceed a cap given the
    knowledge counts, when `max_per_deck` is reached, or when their weight
    here is zero. Consumes one draw.

    Raises:
        NoAdmissibleGeneratorError: nothing can be placed at `position`
    """
    if not roster:
        raise ValueError("roster must not be empty")
    candidates = admissible(roster, position, total, knowledge, schema)
    if not candidates:
        raise NoAdmissibleGeneratorError(position)
    index = roulette_select([w for _, w in candidates], rng)
    return candidates[index][0]


def schedule_generators(
    schema: PresentationSchema,
    total: int,
    rng: np.random.Generator,
    knowledge: GenerationKnowledge = GenerationKnowledge(),
) -> list[SlideGeneratorSpec]:
    """Assign a generator to every position in order, counting each choice
    toward the caps of the positions after it."""
    schedule = []
    for position in range(total):
        spec = select_generator(schema.generators, position, total, knowledge, schema, rng)
        knowledge = knowledge.with_spec(spec)
        schedule.append(spec)
    logger.debug(f"Schedule for {total} slides: {[s.name for s in schedule]}")
    return schedule
