"""Deck-level constraint checking."""

from collections import Counter

from .deck import Deck, Violation
from .schema import PresentationSchema


def validate_deck(deck: Deck, schema: PresentationSchema) -> list[Violation]:
    """Report every cross-slide constraint the deck breaks.

    Checks, in this order:
    - the same image asset on more than one slide (reported on the later slide)
    - tag occurrences above the schema caps (reported on the first slide over the cap)
    - first or last slide not seeded with the topic
    - gaps between consecutive topic anchors outside [min_gap, max_gap];
      the lower bound is waived for the gap ending at the last slide and
      seeds that fell back to the topic are not anchors

    Never raises; an empty list means the deck is valid.
    """
    violations: list[Violation] = []
    total = len(deck.slides)
    topic = deck.topic.word
    walk = schema.seed_generator

    first_seen: dict[str, int] = {}
    for index, slide in enumerate(deck.slides):
        for asset_id in slide.image_asset_ids():
            if asset_id in first_seen:
                violations.append(
                    Violation(
                        kind="duplicate_image",
                        slide_index=index,
                        detail=f"{asset_id} already used on slide {first_seen[asset_id]}",
                    )
                )
            else:
                first_seen[asset_id] = index

    counts: Counter[str] = Counter()
    for index, slide in enumerate(deck.slides):
        for tag in slide.meta.tags:
            counts[tag] += 1
            allowed = schema.allowed_count(tag, total)
            if allowed is not None and counts[tag] == allowed + 1:
                violations.append(
                    Violation(
                        kind="tag_cap",
                        slide_index=index,
                        detail=f"tag {tag!r} exceeds cap of {allowed}",
                    )
                )

    endpoints = sorted({0, total - 1})
    for index in endpoints:
        if deck.slides[index].meta.seed != topic:
            violations.append(
                Violation(
                    kind="topic_endpoint",
                    slide_index=index,
                    detail=f"seed {deck.slides[index].meta.seed!r} is not the topic {topic!r}",
                )
            )

    anchors = [
        i
        for i, slide in enumerate(deck.slides)
        if slide.meta.seed == topic and not slide.meta.fallback_seed
    ]
    for previous, current in zip(anchors, anchors[1:]):
        gap = current - previous
        final = current == total - 1
        if gap > walk.max_gap or (not final and gap < walk.min_gap):
            violations.append(
                Violation(
                    kind="topic_gap",
                    slide_index=current,
                    detail=f"topic gap {gap} outside [{walk.min_gap}, {walk.max_gap}]",
                )
            )

    return violations
