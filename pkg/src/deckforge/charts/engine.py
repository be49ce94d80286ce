"""Synthesized chart data for the chart slide generators."""

import logging
from typing import Literal, Optional, Sequence

import numpy as np

from ..errors import SourceError
from ..grammar.expand import ExpansionBudget, ExpansionContext, expand
from ..grammar.functions import FunctionRegistry, title_case
from ..grammar.grammar import Grammar
from ..models.chart import ChartCategory, ChartSpec
from ..semantic.graph import RELATED_TO, RelationProvider, related_locations, related_terms

logger = logging.getLogger(__name__)

YESNO_RANGE = (5.0, 40.0)
FUNNY_RANGE = (45.0, 90.0)
LOCATION_RANGE = (1.0, 100.0)
MAX_LOCATIONS = 5
PIE_TOTAL = 100.0

QUESTION_RULE = "chart_question"
FUNNY_RULE = "chart_funny_answer"

FALLBACK_LOCATIONS = ("home", "the office", "the park", "the internet", "my dreams")
GENERIC_AXIS_LABELS = ("happiness", "confidence", "time spent", "popularity", "awesomeness")


def normalize_to(values: Sequence[float], total: float = PIE_TOTAL) -> list[float]:
    """Scale values to sum to `total`; the last value absorbs rounding."""
    arr = np.asarray(values, dtype=float)
    scaled = arr * (total / arr.sum())
    scaled[-1] = total - float(np.sum(scaled[:-1]))
    return [float(v) for v in scaled]


def gen_yesno_chart(
    seed: str,
    grammar: Grammar,
    rng: np.random.Generator,
    registry: Optional[FunctionRegistry] = None,
    budget: Optional[ExpansionBudget] = None,
    kind: Literal["histogram", "pie"] = "histogram",
) -> ChartSpec:
    """Yes / No / funny-answer chart about a grammar-generated question.

    Yes and No values are Uniform[5, 40]; the funny answer is Uniform[45, 90]
    so it always wins. Values are drawn after both expansions.
    """
    ctx = ExpansionContext({"seed": seed}, registry or FunctionRegistry())
    question = expand(grammar, QUESTION_RULE, ctx, budget, rng)
    funny = expand(grammar, FUNNY_RULE, ctx, budget, rng)

    yes, no = rng.uniform(*YESNO_RANGE, size=2)
    funny_value = rng.uniform(*FUNNY_RANGE)
    values = [float(yes), float(no), float(funny_value)]
    if kind == "pie":
        values = normalize_to(values)

    labels = ["Yes", "No", funny]
    return ChartSpec(
        kind=kind,
        title=question,
        categories=tuple(ChartCategory(label=lbl, value=v) for lbl, v in zip(labels, values)),
    )


def gen_location_chart(
    seed: str,
    graph: RelationProvider,
    rng: np.random.Generator,
    kind: Literal["pie", "histogram"] = "pie",
    generic_locations: Sequence[str] = (),
    title: Optional[str] = None,
) -> ChartSpec:
    """Where the seed is found: up to five at_location neighbours, random shares.

    Seeds without locations draw three to five places from the generic list.
    Pie values sum to 100.
    """
    try:
        labels = [r.to_term for r in related_locations(graph, seed, MAX_LOCATIONS)]
    except SourceError as e:
        logger.warning(f"Location lookup for {seed!r} failed, using generic places: {e}")
        labels = []
    if not labels:
        pool = list(generic_locations) or list(FALLBACK_LOCATIONS)
        count = min(len(pool), int(rng.integers(3, MAX_LOCATIONS + 1)))
        chosen = rng.choice(len(pool), size=count, replace=False)
        labels = [pool[i] for i in sorted(chosen)]
        logger.debug(f"No locations for {seed!r}, using generic places {labels}")

    values = [float(v) for v in rng.uniform(*LOCATION_RANGE, size=len(labels))]
    if kind == "pie":
        values = normalize_to(values)

    return ChartSpec(
        kind=kind,
        title=title or f"Where {title_case(seed)} Is Found",
        categories=tuple(
            ChartCategory(label=title_case(label), value=value)
            for label, value in zip(labels, values)
        ),
    )


def _axis_labels(seed: str, graph: RelationProvider, rng: np.random.Generator) -> tuple[str, str]:
    try:
        relations = related_terms(graph, seed, 10, relation_kind=RELATED_TO)
    except SourceError as e:
        logger.warning(f"Neighbour lookup for {seed!r} failed, using generic labels: {e}")
        relations = []
    neighbours = [r.to_term for r in relations]
    if len(neighbours) >= 2:
        first, second = rng.choice(len(neighbours), size=2, replace=False)
        return neighbours[int(first)], neighbours[int(second)]
    generic = GENERIC_AXIS_LABELS[int(rng.integers(len(GENERIC_AXIS_LABELS)))]
    x_label = neighbours[0] if neighbours else seed
    return x_label, generic


def gen_scatter(
    fn_kind: Literal["quadratic", "logarithmic"],
    noise_sigma: float,
    n: int,
    graph: RelationProvider,
    seed: str,
    rng: np.random.Generator,
    x_range: tuple[float, float] = (1.0, 10.0),
) -> ChartSpec:
    """Noisy samples of y = x² or y = ln(x) at n evenly spaced x.

    Axis labels are two related_to neighbours of the seed, else the seed (or
    its only neighbour) against a generic label.
    """
    if n < 2:
        raise ValueError(f"scatter needs at least 2 points, got {n}")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    lo, hi = x_range
    if fn_kind == "logarithmic" and lo <= 0:
        raise ValueError("logarithmic scatter needs x > 0")

    x_label, y_label = _axis_labels(seed, graph, rng)

    x = np.linspace(lo, hi, n)
    y = x**2 if fn_kind == "quadratic" else np.log(x)
    if noise_sigma > 0:
        y = y + rng.normal(0.0, noise_sigma, size=n)

    return ChartSpec(
        kind="scatter",
        title=f"{title_case(y_label)} vs. {title_case(x_label)}",
        points=tuple((float(a), float(b)) for a, b in zip(x, y)),
        axis_labels=(title_case(x_label), title_case(y_label)),
    )
