"""Deck assembly: seeds, schedule, parallel generation and repair rounds."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from ..errors import (
    AssemblyExhaustedError,
    NoAdmissibleGeneratorError,
    SchemaError,
    SlideGenerationError,
)
from ..generators.knowledge import EMPTY_KNOWLEDGE, GenerationKnowledge
from ..generators.selection import schedule_generators, select_generator
from ..generators.slide import generate_slide
from ..logging_config import log_success
from ..models.deck import UINT64_MAX, Deck, Slide, Topic, Violation
from ..models.schema import PresentationSchema, SlideGeneratorSpec
from ..models.validation import validate_deck
from ..seeds.walk import SeedSequence, generate_seeds
from ..services import Services
from ..utils.ids import make_rng, random_master_seed

logger = logging.getLogger(__name__)


class AssemblyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_slides: int = Field(7, ge=1)
    parallelism: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    max_rounds: int = Field(10, ge=1)
    master_rng_seed: int = Field(default_factory=random_master_seed, ge=0, le=UINT64_MAX)
    mode: Literal["parallel", "serial"] = "parallel"


class RoundReport(BaseModel):
    """What one generation, repair or fallback round did."""

    model_config = ConfigDict(frozen=True)

    round_index: int = Field(..., ge=0)
    regenerated_slide_indices: tuple[int, ...] = ()
    violations_found: tuple[Violation, ...] = ()
    phase: Literal["generate", "repair", "fallback"] = "generate"


def sweep_violations(
    slide: Slide,
    index: int,
    knowledge: GenerationKnowledge,
    schema: PresentationSchema,
    total: int,
) -> list[Violation]:
    """Cross-slide problems `slide` would add to the slides in `knowledge`."""
    violations = []
    asset_ids = slide.image_asset_ids()
    for position, asset_id in enumerate(asset_ids):
        if asset_id in knowledge.used_image_asset_ids or asset_id in asset_ids[:position]:
            violations.append(
                Violation(
                    kind="duplicate_image", slide_index=index, detail=f"{asset_id} already used"
                )
            )
    for tag in slide.meta.tags:
        allowed = schema.allowed_count(tag, total)
        if allowed is not None and knowledge.tag_count(tag) + 1 > allowed:
            violations.append(
                Violation(
                    kind="tag_cap",
                    slide_index=index,
                    detail=f"tag {tag!r} exceeds cap of {allowed}",
                )
            )
    return violations


@dataclass
class _Plan:
    """Seeds, generator per position and the random streams of one deck."""

    topic: str
    schema: PresentationSchema
    services: Services
    config: AssemblyConfig
    seeds: SeedSequence
    specs: list[SlideGeneratorSpec]

    @property
    def total(self) -> int:
        return len(self.specs)

    def generate(
        self,
        index: int,
        round_index: int,
        knowledge: GenerationKnowledge,
        spec: Optional[SlideGeneratorSpec] = None,
        prefer_unused: bool = False,
        substituted: bool = False,
    ) -> Slide:
        spec = spec or self.specs[index]
        rng = make_rng(self.config.master_rng_seed, index, round_index)
        try:
            return generate_slide(
                spec,
                self.seeds[index],
                knowledge,
                self.services,
                rng,
                template=self.schema.template(spec.template_id),
                topic=self.topic,
                round_index=round_index,
                prefer_unused=prefer_unused,
                fallback_seed=self.seeds.is_fallback(index),
                substituted=substituted,
            )
        except SlideGenerationError as e:
            raise SlideGenerationError(
                e.spec_name, e.seed, e.placeholder, e.cause, slide_index=index
            ) from e.cause

    def reselect(self, index: int, round_index: int, knowledge: GenerationKnowledge) -> None:
        """Draw a new generator for a slide that overflowed a tag cap."""
        rng = make_rng(self.config.master_rng_seed, index, round_index, "select")
        try:
            self.specs[index] = select_generator(
                self.schema.generators, index, self.total, knowledge, self.schema, rng
            )
        except NoAdmissibleGeneratorError:
            logger.debug(
                f"No other generator admissible at slide {index}, "
                f"keeping {self.specs[index].name}"
            )

    def fallback_spec(
        self, slide_indices: list[int], reports: list[RoundReport]
    ) -> SlideGeneratorSpec:
        if self.schema.fallback_generator is None:
            raise AssemblyExhaustedError(self.config.max_rounds, slide_indices, reports)
        return self.schema.generator(self.schema.fallback_generator)

    def deck(self, slides: Sequence[Slide]) -> Deck:
        used = {slide.template_id for slide in slides}
        return Deck(
            topic=Topic(word=self.topic),
            slides=tuple(slides),
            schema_name=self.schema.name,
            master_rng_seed=self.config.master_rng_seed,
            templates={t.template_id: t for t in self.schema.templates if t.template_id in used},
        )


def _plan(
    topic: Topic | str, schema: PresentationSchema, services: Services, config: AssemblyConfig
) -> _Plan:
    word = topic.word if isinstance(topic, Topic) else Topic(word=topic).word
    master = config.master_rng_seed
    seeds = generate_seeds(
        word, config.n_slides, services.graph, schema.seed_generator, make_rng(master, "seeds")
    )
    try:
        specs = schedule_generators(schema, config.n_slides, make_rng(master, "schedule"))
    except NoAdmissibleGeneratorError as e:
        raise SchemaError(
            f"schema {schema.name!r} cannot fill a {config.n_slides}-slide deck: {e}"
        ) from e
    logger.info(f"Planned {config.n_slides} slides for {word!r}: seeds {list(seeds.seeds)}")
    return _Plan(word, schema, services, config, seeds, specs)


def _knowledge_of(
    slides: Sequence[Optional[Slide]], accepted: Sequence[bool]
) -> GenerationKnowledge:
    knowledge = EMPTY_KNOWLEDGE
    for slide, ok in zip(slides, accepted):
        if ok and slide is not None:
            knowledge = knowledge.absorb(slide)
    return knowledge


def _record(report: RoundReport, reports: list[RoundReport]) -> None:
    reports.append(report)
    log_success(
        "assembly.round",
        round=report.round_index,
        phase=report.phase,
        regenerated=list(report.regenerated_slide_indices),
        violations=[v.kind for v in report.violations_found],
    )


def _finish(plan: _Plan, slides: Sequence[Slide], reports: list[RoundReport]) -> Deck:
    deck = plan.deck(slides)
    remaining = validate_deck(deck, plan.schema)
    if remaining:
        raise AssemblyExhaustedError(
            plan.config.max_rounds, sorted({v.slide_index for v in remaining}), reports
        )
    return deck


def _assemble_parallel(plan: _Plan) -> tuple[Deck, list[RoundReport]]:
    config = plan.config
    total = plan.total
    slides: list[Optional[Slide]] = [None] * total
    accepted = [False] * total
    pending = list(range(total))
    reports: list[RoundReport] = []
    last_violations: list[Violation] = []

    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        for round_index in range(config.max_rounds + 1):
            snapshot = _knowledge_of(slides, accepted)
            if round_index > 0:
                for index in pending:
                    if any(v.kind == "tag_cap" for v in last_violations if v.slide_index == index):
                        plan.reselect(index, round_index, snapshot)
            knowledge = EMPTY_KNOWLEDGE if round_index == 0 else snapshot
            futures = {i: pool.submit(plan.generate, i, round_index, knowledge) for i in pending}
            # Results in slide order so the first failure raised is deterministic.
            for index in pending:
                slides[index] = futures[index].result()

            sweep = _knowledge_of(slides, accepted)
            last_violations = []
            marked = []
            for index in pending:
                found = sweep_violations(slides[index], index, sweep, plan.schema, total)
                if found:
                    last_violations.extend(found)
                    marked.append(index)
                else:
                    sweep = sweep.absorb(slides[index])
                    accepted[index] = True

            _record(
                RoundReport(
                    round_index=round_index,
                    regenerated_slide_indices=tuple(pending) if round_index > 0 else (),
                    violations_found=tuple(last_violations),
                    phase="generate" if round_index == 0 else "repair",
                ),
                reports,
            )
            pending = marked
            if not pending:
                break

    if pending:
        logger.warning(
            f"Slides {pending} still violate after {config.max_rounds} rounds, substituting"
        )
        spec = plan.fallback_spec(pending, reports)
        round_index = config.max_rounds + 1
        knowledge = _knowledge_of(slides, accepted)
        violations: list[Violation] = []
        for index in pending:
            slide = plan.generate(
                index, round_index, knowledge, spec, prefer_unused=True, substituted=True
            )
            found = sweep_violations(slide, index, knowledge, plan.schema, total)
            violations.extend(found)
            slides[index] = slide
            knowledge = knowledge.absorb(slide)
        _record(
            RoundReport(
                round_index=round_index,
                regenerated_slide_indices=tuple(pending),
                violations_found=tuple(violations),
                phase="fallback",
            ),
            reports,
        )
        if violations:
            raise AssemblyExhaustedError(
                config.max_rounds, sorted({v.slide_index for v in violations}), reports
            )

    return _finish(plan, slides, reports), reports


def _assemble_serial(plan: _Plan) -> tuple[Deck, list[RoundReport]]:
    config = plan.config
    total = plan.total
    knowledge = EMPTY_KNOWLEDGE
    slides: list[Slide] = []
    regenerated: dict[int, list[int]] = {}
    violations: dict[int, list[Violation]] = {}

    for index in range(total):
        slide = None
        for round_index in range(config.max_rounds + 1):
            if round_index > 0:
                regenerated.setdefault(round_index, []).append(index)
            candidate = plan.generate(index, round_index, knowledge)
            found = sweep_violations(candidate, index, knowledge, plan.schema, total)
            if not found:
                slide = candidate
                break
            violations.setdefault(round_index, []).extend(found)
            if any(v.kind == "tag_cap" for v in found):
                plan.reselect(index, round_index + 1, knowledge)
        if slide is None:
            round_index = config.max_rounds + 1
            regenerated.setdefault(round_index, []).append(index)
            spec = plan.fallback_spec([index], [])
            slide = plan.generate(
                index, round_index, knowledge, spec, prefer_unused=True, substituted=True
            )
            found = sweep_violations(slide, index, knowledge, plan.schema, total)
            if found:
                raise AssemblyExhaustedError(config.max_rounds, [index])
        slides.append(slide)
        knowledge = knowledge.absorb(slide)

    reports: list[RoundReport] = []
    for round_index in sorted({0, *regenerated, *violations}):
        phase = "generate" if round_index == 0 else "repair"
        if round_index > config.max_rounds:
            phase = "fallback"
        _record(
            RoundReport(
                round_index=round_index,
                regenerated_slide_indices=tuple(regenerated.get(round_index, ())),
                violations_found=tuple(violations.get(round_index, ())),
                phase=phase,
            ),
            reports,
        )
    return _finish(plan, slides, reports), reports


def assemble(
    topic: Topic | str,
    schema: PresentationSchema,
    services: Services,
    config: Optional[AssemblyConfig] = None,
) -> tuple[Deck, list[RoundReport]]:
    """Generate a deck about `topic` that satisfies every schema constraint.

    Seeds and the generator schedule are fixed first. Round 0 generates all
    slides concurrently with empty knowledge; a sequential sweep then
    accepts slides in order and marks the ones that reuse an image or
    overflow a tag cap. Marked slides are regenerated with the knowledge of
    the accepted ones for up to `max_rounds` rounds, then replaced by the
    schema's fallback generator. Slide `i` in round `r` draws from the
    stream derived from (master seed, i, r), so the result does not depend
    on worker count.

    Raises:
        SchemaError: the schema cannot fill a deck of this length
        SlideGenerationError: a slide failed, with its index
        AssemblyExhaustedError: violations survive the fallback
    """
    config = config or AssemblyConfig()
    plan = _plan(topic, schema, services, config)
    if config.mode == "serial":
        return _assemble_serial(plan)
    return _assemble_parallel(plan)


def assemble_serial(
    topic: Topic | str,
    schema: PresentationSchema,
    services: Services,
    config: Optional[AssemblyConfig] = None,
) -> Deck:
    """Reference assembly: one slide at a time, knowledge threaded through."""
    config = config or AssemblyConfig()
    deck, _ = _assemble_serial(_plan(topic, schema, services, config))
    return deck
