"""Presentation schema and slide generator specifications."""

import json
import math
import re
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import SchemaError
from .deck import TEXT_KINDS, SlideTemplate

TAG_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")

TITLE_TAG = "title"

CurveKind = Literal["only_first", "only_last", "front_loaded", "flat", "interior_flat"]
ChartRecipe = Literal[
    "yesno_histogram",
    "yesno_pie",
    "location_pie",
    "location_histogram",
    "scatter",
    "scatter_quadratic",
    "scatter_logarithmic",
]
CHART_RECIPES: tuple[str, ...] = ChartRecipe.__args__


class TagCap(BaseModel):
    """Absolute or deck-fraction limit on slides carrying a tag."""

    model_config = ConfigDict(frozen=True)

    tag: str
    cap_kind: Literal["absolute", "fraction_of_deck"]
    value: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _check_value(self) -> "TagCap":
        if self.cap_kind == "fraction_of_deck" and not 0.0 < self.value <= 1.0:
            raise ValueError(f"fraction cap for {self.tag!r} must be in (0, 1]")
        if self.cap_kind == "absolute" and self.value != int(self.value):
            raise ValueError(f"absolute cap for {self.tag!r} must be an integer")
        return self

    def allowed(self, total: int) -> int:
        """Slides allowed to carry the tag in a deck of `total` slides."""
        if self.cap_kind == "absolute":
            return int(self.value)
        # tolerance keeps e.g. 0.29 * 100 at 29
        return math.floor(self.value * total + 1e-9)


class WeightFunction(BaseModel):
    """Position-dependent suitability of a generator.

    Curves:
        only_first: `level` on the first slide, 0 elsewhere
        only_last: `level` on the last slide of a multi-slide deck, 0 elsewhere
        flat: `level` everywhere
        interior_flat: `level` everywhere except the first and last slide
        front_loaded: interior only; `level` inside [peak_start, peak_end],
            `level * decay**distance` outside the window
    """

    model_config = ConfigDict(frozen=True)

    curve: CurveKind
    level: float = Field(1.0, ge=0.0)
    peak_start: int = Field(1, ge=0)
    peak_end: int = Field(1, ge=0)
    decay: float = Field(0.5, ge=0.0, le=1.0)

    @field_validator("level")
    @classmethod
    def finite_level(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("level must be finite")
        return v

    @model_validator(mode="after")
    def _check_window(self) -> "WeightFunction":
        if self.peak_end < self.peak_start:
            raise ValueError("peak_end must not precede peak_start")
        return self

    def evaluate(self, position: int, total: int) -> float:
        if not 0 <= position < total:
            raise ValueError(f"position {position} outside deck of {total}")

        is_first = position == 0
        is_last = position == total - 1

        if self.curve == "only_first":
            return self.level if is_first else 0.0
        if self.curve == "only_last":
            return self.level if is_last and not is_first else 0.0
        if self.curve == "flat":
            return self.level
        if is_first or is_last:
            return 0.0
        if self.curve == "interior_flat":
            return self.level

        if position < self.peak_start:
            distance = self.peak_start - position
        elif position > self.peak_end:
            distance = position - self.peak_end
        else:
            return self.level
        return self.level * self.decay**distance


class Binding(BaseModel):
    """Where a placeholder's content comes from.

    kinds:
        text: a text content source (`ref` = source name)
        grammar: a grammar rule expanded with the slide seed (`ref` = rule)
        image: an image content source (`ref` = source name)
        tuple: item `index` of a tupled source, its `part` (caption or content)
        chart: a chart recipe (`ref` in CHART_RECIPES)
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["text", "grammar", "image", "tuple", "chart"]
    ref: str = Field(..., min_length=1)
    index: int = Field(0, ge=0)
    part: Literal["caption", "content"] = "content"
    seed_from: Literal["slide", "topic"] = "slide"
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_recipe(self) -> "Binding":
        if self.kind == "chart" and self.ref not in CHART_RECIPES:
            raise ValueError(f"unknown chart recipe {self.ref!r}")
        return self

    def fits(self, placeholder_kind: str) -> bool:
        if self.kind in ("text", "grammar"):
            return placeholder_kind in TEXT_KINDS
        if self.kind == "image":
            return placeholder_kind == "image"
        if self.kind == "chart":
            return placeholder_kind == "chart"
        if self.part == "caption":
            return placeholder_kind in TEXT_KINDS
        return placeholder_kind == "image" or placeholder_kind in TEXT_KINDS


class SlideGeneratorSpec(BaseModel):
    """A schedulable slide generator."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    template_id: str
    tags: tuple[str, ...] = Field(..., min_length=1)
    weight_fn: WeightFunction
    bindings: dict[str, Binding]
    max_per_deck: Optional[int] = Field(None, ge=1)

    @field_validator("tags")
    @classmethod
    def lowercase_tags(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        bad = [t for t in v if not TAG_PATTERN.match(t)]
        if bad:
            raise ValueError(f"tags must be lowercase identifiers: {bad}")
        return v

    def eval_weight(self, position: int, total: int) -> float:
        return self.weight_fn.evaluate(position, total)


class WalkConfig(BaseModel):
    """Seed walk parameters."""

    model_config = ConfigDict(frozen=True)

    min_gap: int = Field(3, ge=1)
    max_gap: int = Field(6, ge=1)
    max_backtrack_depth: int = Field(5, ge=1)
    walk_policy: Literal["uniform", "weight_proportional"] = "weight_proportional"
    neighbor_limit: int = Field(25, ge=1)

    @model_validator(mode="after")
    def _check_gaps(self) -> "WalkConfig":
        if self.min_gap > self.max_gap:
            raise ValueError(f"min_gap {self.min_gap} exceeds max_gap {self.max_gap}")
        return self


class PresentationSchema(BaseModel):
    """Seed generator, generator roster, tag caps and templates of one format."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    seed_generator: WalkConfig = Field(default_factory=WalkConfig)
    generators: tuple[SlideGeneratorSpec, ...] = Field(..., min_length=1)
    tag_caps: tuple[TagCap, ...] = ()
    templates: tuple[SlideTemplate, ...] = Field(..., min_length=1)
    deck_length_default: int = Field(7, ge=1)
    fallback_generator: Optional[str] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "PresentationSchema":
        names = [g.name for g in self.generators]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate generator names: {duplicates}")

        template_ids = [t.template_id for t in self.templates]
        if len(set(template_ids)) != len(template_ids):
            raise ValueError("duplicate template ids")

        templates = {t.template_id: t for t in self.templates}
        for spec in self.generators:
            template = templates.get(spec.template_id)
            if template is None:
                raise ValueError(f"generator {spec.name!r}: unknown template {spec.template_id!r}")
            expected = set(template.placeholder_ids())
            if set(spec.bindings) != expected:
                raise ValueError(
                    f"generator {spec.name!r}: bindings {sorted(spec.bindings)} "
                    f"do not cover placeholders {sorted(expected)}"
                )
            for placeholder in template.placeholders:
                if not spec.bindings[placeholder.id].fits(placeholder.kind):
                    raise ValueError(
                        f"generator {spec.name!r}: binding for {placeholder.id!r} "
                        f"cannot fill a {placeholder.kind} placeholder"
                    )

        title_specs = [g for g in self.generators if TITLE_TAG in g.tags]
        if len(title_specs) != 1 or title_specs[0].weight_fn.curve != "only_first":
            raise ValueError(
                "exactly one generator must carry the title tag with an only_first weight"
            )

        if self.fallback_generator is not None and self.fallback_generator not in names:
            raise ValueError(f"unknown fallback generator {self.fallback_generator!r}")
        return self

    @property
    def title_generator(self) -> SlideGeneratorSpec:
        return next(g for g in self.generators if TITLE_TAG in g.tags)

    def template(self, template_id: str) -> SlideTemplate:
        for template in self.templates:
            if template.template_id == template_id:
                return template
        raise KeyError(template_id)

    def generator(self, name: str) -> SlideGeneratorSpec:
        for spec in self.generators:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def allowed_count(self, tag: str, total: int) -> Optional[int]:
        """Slides allowed to carry `tag` in a deck of `total`; None when uncapped.

        Fraction caps floor; a cap that floors to zero on a tag of the title
        generator is raised to one so the title slide stays schedulable.
        """
        caps = [cap.allowed(total) for cap in self.tag_caps if cap.tag == tag]
        if not caps:
            return None
        allowed = min(caps)
        if allowed == 0 and tag in self.title_generator.tags:
            allowed = 1
        return allowed


def load_schema(path: Path | str) -> PresentationSchema:
    """Load a presentation schema JSON file.

    Raises:
        SchemaError: unreadable file, invalid JSON or inconsistent schema
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SchemaError(f"cannot read schema {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"schema {path} is not valid JSON: line {e.lineno}, column {e.colno}"
        ) from e

    try:
        return PresentationSchema.model_validate(data)
    except ValidationError as e:
        raise SchemaError(f"schema {path} is inconsistent: {e}") from e
