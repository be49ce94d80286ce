"""Deck, slide and template models."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.manifest import canonical_json
from .chart import ChartSpec
from .content import ImageAsset

PlaceholderKind = Literal[
    "title_text", "subtitle_text", "body_text", "caption_text", "image", "chart"
]
TEXT_KINDS = frozenset({"title_text", "subtitle_text", "body_text", "caption_text"})

UINT64_MAX = (1 << 64) - 1


class Topic(BaseModel):
    """The audience suggestion a deck is about."""

    model_config = ConfigDict(frozen=True)

    word: str

    @field_validator("word", mode="before")
    @classmethod
    def normalize_word(cls, v: str) -> str:
        if not isinstance(v, str):
            raise ValueError("topic must be a string")
        word = v.strip().lower()
        if not word:
            raise ValueError("topic must not be empty")
        if "\n" in word or "\r" in word:
            raise ValueError("topic must not contain newlines")
        return word


class Geometry(BaseModel):
    """Placeholder box as fractions of the slide area."""

    model_config = ConfigDict(frozen=True)

    x: float = Field(..., ge=0.0, le=1.0)
    y: float = Field(..., ge=0.0, le=1.0)
    width: float = Field(..., ge=0.0, le=1.0)
    height: float = Field(..., ge=0.0, le=1.0)


class Placeholder(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    kind: PlaceholderKind
    geometry: Geometry


class SlideTemplate(BaseModel):
    """A slide layout: ordered placeholders with their geometry."""

    model_config = ConfigDict(frozen=True)

    template_id: str = Field(..., min_length=1)
    placeholders: tuple[Placeholder, ...] = Field(..., min_length=1)

    @field_validator("placeholders")
    @classmethod
    def unique_ids(cls, v: tuple[Placeholder, ...]) -> tuple[Placeholder, ...]:
        ids = [p.id for p in v]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"duplicate placeholder ids: {duplicates}")
        return v

    def placeholder(self, placeholder_id: str) -> Placeholder:
        for p in self.placeholders:
            if p.id == placeholder_id:
                return p
        raise KeyError(placeholder_id)

    def placeholder_ids(self) -> list[str]:
        return [p.id for p in self.placeholders]


class Fill(BaseModel):
    """Content placed into one placeholder."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["text", "image", "chart"]
    text: Optional[str] = None
    image: Optional[ImageAsset] = None
    chart: Optional[ChartSpec] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "Fill":
        present = {
            "text": self.text is not None,
            "image": self.image is not None,
            "chart": self.chart is not None,
        }
        if not present[self.kind] or sum(present.values()) != 1:
            raise ValueError(f"fill of kind {self.kind!r} must carry exactly that content")
        return self

    @classmethod
    def of_text(cls, text: str) -> "Fill":
        return cls(kind="text", text=text)

    @classmethod
    def of_image(cls, image: ImageAsset) -> "Fill":
        return cls(kind="image", image=image)

    @classmethod
    def of_chart(cls, chart: ChartSpec) -> "Fill":
        return cls(kind="chart", chart=chart)

    def matches(self, placeholder_kind: str) -> bool:
        if placeholder_kind in TEXT_KINDS:
            return self.kind == "text"
        return self.kind == placeholder_kind


class SlideMeta(BaseModel):
    """Generation metadata kept on every slide for auditing the repair loop."""

    model_config = ConfigDict(frozen=True)

    seed: str
    generator: str
    round_index: int = Field(0, ge=0)
    tags: tuple[str, ...] = ()
    fallback_seed: bool = False
    substituted: bool = False


class Slide(BaseModel):
    model_config = ConfigDict(frozen=True)

    template_id: str
    fills: dict[str, Fill]
    meta: SlideMeta

    def image_asset_ids(self) -> list[str]:
        """Image asset ids in placeholder order of the fills mapping."""
        return [f.image.asset_id for f in self.fills.values() if f.image is not None]

    def texts(self) -> list[str]:
        return [f.text for f in self.fills.values() if f.text is not None]


def check_fills(template: SlideTemplate, fills: dict[str, Fill]) -> list[str]:
    """Problems with `fills` against `template`; empty when every placeholder
    is filled exactly once with content of the right kind."""
    problems = []
    expected = set(template.placeholder_ids())
    missing = sorted(expected - set(fills))
    extra = sorted(set(fills) - expected)
    if missing:
        problems.append(f"missing fills {missing}")
    if extra:
        problems.append(f"unknown placeholders {extra}")
    for placeholder in template.placeholders:
        fill = fills.get(placeholder.id)
        if fill is not None and not fill.matches(placeholder.kind):
            problems.append(f"{placeholder.id}: {fill.kind} fill in {placeholder.kind} placeholder")
    return problems


class Deck(BaseModel):
    """A generated slide deck plus the templates its slides use."""

    model_config = ConfigDict(frozen=True)

    topic: Topic
    slides: tuple[Slide, ...] = Field(..., min_length=1)
    schema_name: str
    master_rng_seed: int = Field(..., ge=0, le=UINT64_MAX)
    templates: dict[str, SlideTemplate] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _well_formed(self) -> "Deck":
        for index, slide in enumerate(self.slides):
            template = self.templates.get(slide.template_id)
            if template is None:
                raise ValueError(f"slide {index}: unknown template {slide.template_id!r}")
            problems = check_fills(template, slide.fills)
            if problems:
                raise ValueError(f"slide {index}: {'; '.join(problems)}")
        return self

    def __len__(self) -> int:
        return len(self.slides)

    def template_for(self, slide: Slide) -> SlideTemplate:
        return self.templates[slide.template_id]

    def to_manifest(self) -> bytes:
        """Canonical JSON manifest (keys sorted, six-decimal floats)."""
        return canonical_json(self.model_dump(mode="json"))


class Violation(BaseModel):
    """One broken cross-slide constraint."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["duplicate_image", "tag_cap", "topic_gap", "topic_endpoint"]
    slide_index: int
    detail: str
