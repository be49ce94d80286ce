"""Sources whose items inspire each other, and grammar-backed text."""

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..errors import ContentIOError, SourceEmptyError
from ..grammar.expand import ExpansionBudget, ExpansionContext, expand
from ..grammar.functions import FunctionRegistry
from ..grammar.grammar import Grammar
from ..models.content import ImageAsset, TextContent
from .base import NO_EXCLUDE, ContentSource, TupleItem


class GrammarTextSource(ContentSource):
    """Text generated by expanding a grammar rule with `{seed}` bound."""

    kind = "text"

    def __init__(
        self,
        name: str,
        grammar: Grammar,
        rule: str,
        registry: FunctionRegistry,
        budget: Optional[ExpansionBudget] = None,
        **kwargs,
    ):
        super().__init__(name, **kwargs)
        grammar.alternatives(rule)
        self.grammar = grammar
        self.rule = rule
        self.registry = registry
        self.budget = budget or ExpansionBudget()

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> TextContent:
        variables = {"seed": seed} if seed else {}
        context = ExpansionContext(variables, self.registry)
        text = expand(self.grammar, self.rule, context, self.budget, rng)
        return TextContent(text=text, source_name=self.name, related_to_seed=bool(seed))


def read_caption_table(path: Path) -> list[tuple[str, ...]]:
    """Rows of tab-separated captions drawn together (e.g. Expectation / Reality)."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ContentIOError(f"cannot read caption table {path}: {e}") from e
    rows = []
    for line in lines:
        if not line.strip() or line.startswith("#"):
            continue
        rows.append(tuple(cell.strip() for cell in line.split("\t")))
    return rows


class CaptionPairSource(ContentSource):
    """Draws a caption row as a unit and fetches one item per caption.

    Caption i is served by child i; the last child serves any extra
    captions, so `[neutral, odd]` puts the odd image under the last caption
    of a pair. Items within one tuple avoid repeating an asset.
    """

    kind = "tupled"

    def __init__(
        self,
        name: str,
        rows: Sequence[tuple[str, ...]],
        children: Sequence[ContentSource],
        **kwargs,
    ):
        if not children:
            raise ValueError(f"{name}: caption source needs at least one child")
        super().__init__(name, **kwargs)
        self.rows = [tuple(row) for row in rows]
        self.children = list(children)

    @property
    def online(self) -> bool:
        return any(child.online for child in self.children)

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> list[TupleItem]:
        if not self.rows:
            raise SourceEmptyError(self.name, "caption table is empty")
        row = self.rows[int(rng.integers(len(self.rows)))]

        items: list[TupleItem] = []
        taken = set(exclude)
        for i, caption in enumerate(row):
            child = self.children[min(i, len(self.children) - 1)]
            content = child.fetch(seed, rng, frozenset(taken))
            if isinstance(content, ImageAsset):
                taken.add(content.asset_id)
            items.append((caption, content))
        return items


class LinkedTupleSource(ContentSource):
    """Generated text drives the matching image fetch.

    Each part is `(text source, image source)`: the text is fetched with the
    slide seed, then the image is fetched with that text as its seed (a
    generated job "baker" fetches an image for "baker").
    """

    kind = "tupled"

    def __init__(
        self,
        name: str,
        parts: Sequence[tuple[ContentSource, ContentSource]],
        **kwargs,
    ):
        if not parts:
            raise ValueError(f"{name}: linked source needs at least one part")
        super().__init__(name, **kwargs)
        self.parts = list(parts)

    @property
    def online(self) -> bool:
        return any(t.online or i.online for t, i in self.parts)

    def fetch(
        self, seed: str, rng: np.random.Generator, exclude: frozenset[str] = NO_EXCLUDE
    ) -> list[TupleItem]:
        items: list[TupleItem] = []
        taken = set(exclude)
        for text_source, image_source in self.parts:
            text = text_source.fetch(seed, rng)
            image = image_source.fetch(text.text.lower(), rng, frozenset(taken))
            taken.add(image.asset_id)
            items.append((text.render(), image))
        return items
