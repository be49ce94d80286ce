"""Filling one slide template from its bindings."""

import logging
from typing import Optional

import numpy as np

from ..charts.engine import gen_location_chart, gen_scatter, gen_yesno_chart
from ..content.base import TupleItem, fetch_image, fetch_text, fetch_tuple
from ..errors import DeckforgeError, SlideGenerationError
from ..grammar.expand import ExpansionContext, expand
from ..grammar.grammar import Grammar, references
from ..models.chart import ChartSpec
from ..models.content import ImageAsset, TextContent
from ..models.deck import TEXT_KINDS, Fill, Slide, SlideMeta, SlideTemplate
from ..models.schema import Binding, SlideGeneratorSpec
from ..services import Services
from .knowledge import GenerationKnowledge

logger = logging.getLogger(__name__)

COLLISION_RETRIES = 3
PRESENTER_VARIABLE = "presenter"
PRESENTER_RULE = "full_name"
DEFAULT_SCATTER_POINTS = 8


def _mentions(grammar: Grammar, rule: str, variable: str) -> bool:
    """Whether expanding `rule` can reach a `{variable...}` slot."""
    marker = "{" + variable
    seen: set[str] = set()
    stack = [rule]
    while stack:
        name = stack.pop()
        if name in seen or name not in grammar:
            continue
        seen.add(name)
        for alternative in grammar.alternatives(name):
            if marker in alternative:
                return True
            stack.extend(references(alternative))
    return False


def run_chart_recipe(
    binding: Binding, seed: str, services: Services, rng: np.random.Generator
) -> ChartSpec:
    recipe = binding.ref
    if recipe in ("yesno_histogram", "yesno_pie"):
        return gen_yesno_chart(
            seed,
            services.grammar,
            rng,
            registry=services.registry,
            budget=services.budget,
            kind="pie" if recipe == "yesno_pie" else "histogram",
        )
    if recipe in ("location_pie", "location_histogram"):
        return gen_location_chart(
            seed,
            services.graph,
            rng,
            kind="pie" if recipe == "location_pie" else "histogram",
            generic_locations=services.generic_locations,
        )
    if recipe == "scatter":
        fn_kind = "quadratic" if rng.integers(2) == 0 else "logarithmic"
    else:
        fn_kind = recipe.removeprefix("scatter_")
    return gen_scatter(
        fn_kind,
        float(binding.params.get("noise_sigma", 0.0)),
        int(binding.params.get("n", DEFAULT_SCATTER_POINTS)),
        services.graph,
        seed,
        rng,
    )


class _SlideBuilder:
    """State for one generate_slide call: tuple results, images used so far."""

    def __init__(
        self,
        spec: SlideGeneratorSpec,
        seed: str,
        topic: str,
        knowledge: GenerationKnowledge,
        services: Services,
        rng: np.random.Generator,
        prefer_unused: bool,
    ):
        self.spec = spec
        self.seed = seed
        self.topic = topic
        self.knowledge = knowledge
        self.services = services
        self.rng = rng
        self.prefer_unused = prefer_unused
        self.slide_assets: list[str] = []
        self.tuples: dict[str, list[TupleItem]] = {}
        self.source_tags: set[str] = set()
        self._ctx: Optional[ExpansionContext] = None

    def _used(self) -> frozenset[str]:
        return self.knowledge.used_image_asset_ids | frozenset(self.slide_assets)

    def _collides(self, asset_ids: list[str]) -> bool:
        used = self._used()
        return len(set(asset_ids)) != len(asset_ids) or any(a in used for a in asset_ids)

    def _seed_for(self, binding: Binding) -> str:
        return self.topic if binding.seed_from == "topic" else self.seed

    def context(self) -> ExpansionContext:
        if self._ctx is None:
            variables = {"seed": self.seed, "topic": self.topic}
            presenter = self.services.presenter
            grammar = self.services.grammar
            needs_presenter = any(
                b.kind == "grammar" and _mentions(grammar, b.ref, PRESENTER_VARIABLE)
                for b in self.spec.bindings.values()
            )
            if needs_presenter and not presenter and PRESENTER_RULE in grammar:
                presenter = expand(
                    grammar,
                    PRESENTER_RULE,
                    ExpansionContext(variables, self.services.registry),
                    self.services.budget,
                    self.rng,
                )
            if presenter:
                variables[PRESENTER_VARIABLE] = presenter
            self._ctx = ExpansionContext(variables, self.services.registry)
        return self._ctx

    def image(self, binding: Binding) -> ImageAsset:
        source = self.services.source(binding.ref)
        seed = self._seed_for(binding)
        exclude = self._used() if self.prefer_unused else frozenset()
        asset = fetch_image(source, seed, self.rng, exclude)
        retries = 0
        while self._collides([asset.asset_id]) and retries < COLLISION_RETRIES:
            retries += 1
            logger.debug(f"{self.spec.name}: image {asset.asset_id} already used, retry {retries}")
            asset = fetch_image(source, seed, self.rng, self._used())
        self.source_tags.update(source.tags)
        self.slide_assets.append(asset.asset_id)
        return asset

    def tuple_items(self, binding: Binding) -> list[TupleItem]:
        if binding.ref not in self.tuples:
            source = self.services.source(binding.ref)
            seed = self._seed_for(binding)
            exclude = self._used() if self.prefer_unused else frozenset()
            items = fetch_tuple(source, seed, self.rng, exclude)
            retries = 0
            while self._collides(_image_ids(items)) and retries < COLLISION_RETRIES:
                retries += 1
                logger.debug(f"{self.spec.name}: tuple {binding.ref} collides, retry {retries}")
                items = fetch_tuple(source, seed, self.rng, self._used())
            self.source_tags.update(source.tags)
            self.slide_assets.extend(_image_ids(items))
            self.tuples[binding.ref] = items
        return self.tuples[binding.ref]

    def fill(self, binding: Binding, placeholder_kind: str) -> Fill:
        if binding.kind == "grammar":
            ctx = self.context()
            if binding.seed_from == "topic":
                ctx = ctx.with_variables(seed=self.topic)
            return Fill.of_text(
                expand(self.services.grammar, binding.ref, ctx, self.services.budget, self.rng)
            )
        if binding.kind == "text":
            source = self.services.source(binding.ref)
            self.source_tags.update(source.tags)
            return Fill.of_text(fetch_text(source, self._seed_for(binding), self.rng).render())
        if binding.kind == "image":
            return Fill.of_image(self.image(binding))
        if binding.kind == "chart":
            return Fill.of_chart(
                run_chart_recipe(binding, self._seed_for(binding), self.services, self.rng)
            )
        items = self.tuple_items(binding)
        if binding.index >= len(items):
            raise IndexError(f"tuple {binding.ref} has {len(items)} items, wanted {binding.index}")
        caption, content = items[binding.index]
        if binding.part == "caption":
            return Fill.of_text(caption)
        if isinstance(content, ImageAsset):
            if placeholder_kind in TEXT_KINDS:
                raise TypeError(f"tuple {binding.ref} item {binding.index} is an image")
            return Fill.of_image(content)
        if isinstance(content, TextContent):
            return Fill.of_text(content.render())
        return Fill.of_text(str(content))


def _image_ids(items: list[TupleItem]) -> list[str]:
    return [item.asset_id for _, item in items if isinstance(item, ImageAsset)]


def generate_slide(
    spec: SlideGeneratorSpec,
    seed: str,
    knowledge: GenerationKnowledge,
    services: Services,
    rng: np.random.Generator,
    template: SlideTemplate,
    topic: Optional[str] = None,
    round_index: int = 0,
    prefer_unused: bool = False,
    fallback_seed: bool = False,
    substituted: bool = False,
) -> Slide:
    """Fill every placeholder of `template` from `spec`'s bindings.

    Placeholders are filled in template order. A fetched image already in
    `knowledge` (or earlier on this slide) is refetched with the used ids as
    a soft exclusion, up to COLLISION_RETRIES times, then accepted; the
    assembler's sweep resolves what remains. The first fetch carries no
    exclusion unless `prefer_unused` is set.

    Raises:
        SlideGenerationError: a source, grammar or chart failure, annotated
            with the generator, seed and placeholder
    """
    builder = _SlideBuilder(spec, seed, topic or seed, knowledge, services, rng, prefer_unused)
    fills: dict[str, Fill] = {}
    for placeholder in template.placeholders:
        binding = spec.bindings[placeholder.id]
        try:
            fills[placeholder.id] = builder.fill(binding, placeholder.kind)
        except (DeckforgeError, KeyError, IndexError, TypeError, ValueError) as e:
            raise SlideGenerationError(spec.name, seed, placeholder.id, e) from e

    tags = tuple(sorted(set(spec.tags) | builder.source_tags))
    return Slide(
        template_id=template.template_id,
        fills=fills,
        meta=SlideMeta(
            seed=seed,
            generator=spec.name,
            round_index=round_index,
            tags=tags,
            fallback_seed=fallback_seed,
            substituted=substituted,
        ),
    )
