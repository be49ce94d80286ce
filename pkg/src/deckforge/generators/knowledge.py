"""What earlier slides of a deck have used."""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from ..models.deck import Slide
from ..models.schema import SlideGeneratorSpec


def _bump(counts: Mapping[str, int], keys: Iterable[str]) -> Mapping[str, int]:
    updated = dict(counts)
    for key in keys:
        updated[key] = updated.get(key, 0) + 1
    return MappingProxyType(updated)


@dataclass(frozen=True)
class GenerationKnowledge:
    """Immutable snapshot of used assets, tag and generator counts, and seeds.

    Workers receive a snapshot; only the assembler's sequential sweep
    derives new snapshots with `absorb` or `with_spec`.
    """

    used_image_asset_ids: frozenset[str] = frozenset()
    tag_counts: Mapping[str, int] = field(default_factory=lambda: MappingProxyType({}))
    generator_counts: Mapping[str, int] = field(default_factory=lambda: MappingProxyType({}))
    prior_slide_seeds: tuple[str, ...] = ()

    def tag_count(self, tag: str) -> int:
        return self.tag_counts.get(tag, 0)

    def generator_count(self, name: str) -> int:
        return self.generator_counts.get(name, 0)

    def with_spec(self, spec: SlideGeneratorSpec) -> "GenerationKnowledge":
        """Count a scheduled generator before its slide exists."""
        return GenerationKnowledge(
            used_image_asset_ids=self.used_image_asset_ids,
            tag_counts=_bump(self.tag_counts, spec.tags),
            generator_counts=_bump(self.generator_counts, [spec.name]),
            prior_slide_seeds=self.prior_slide_seeds,
        )

    def absorb(self, slide: Slide) -> "GenerationKnowledge":
        """Knowledge after accepting `slide`."""
        return GenerationKnowledge(
            used_image_asset_ids=self.used_image_asset_ids | frozenset(slide.image_asset_ids()),
            tag_counts=_bump(self.tag_counts, slide.meta.tags),
            generator_counts=_bump(self.generator_counts, [slide.meta.generator]),
            prior_slide_seeds=(*self.prior_slide_seeds, slide.meta.seed),
        )


EMPTY_KNOWLEDGE = GenerationKnowledge()
