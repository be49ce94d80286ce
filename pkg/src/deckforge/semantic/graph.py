"""Offline semantic word graph and related-word lookups."""

import logging
import math
import re
from pathlib import Path
from typing import Iterable, Mapping, Optional, Protocol

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ContentIOError, GraphParseError

logger = logging.getLogger(__name__)

RELATION_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")

AT_LOCATION = "at_location"
RELATED_TO = "related_to"


def normalize_term(term: str) -> str:
    return term.strip().lower()


class Relation(BaseModel):
    """One weighted edge of the word graph."""

    model_config = ConfigDict(frozen=True)

    from_term: str = Field(..., min_length=1)
    relation_kind: str
    to_term: str = Field(..., min_length=1)
    weight: float = Field(1.0, ge=0.0)

    @field_validator("from_term", "to_term", mode="before")
    @classmethod
    def lowercase_term(cls, v: str) -> str:
        return normalize_term(v) if isinstance(v, str) else v

    @field_validator("relation_kind")
    @classmethod
    def identifier_kind(cls, v: str) -> str:
        v = v.strip().lower()
        if not RELATION_PATTERN.match(v):
            raise ValueError(f"relation kind must be an identifier: {v!r}")
        return v

    @field_validator("weight")
    @classmethod
    def finite_weight(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("weight must be finite")
        return v


class RelationProvider(Protocol):
    """Anything that can list the outgoing relations of a term."""

    def relations(self, term: str, relation_kind: Optional[str] = None) -> list[Relation]: ...


def _ordering(relation: Relation) -> tuple:
    return (-relation.weight, relation.to_term, relation.relation_kind)


class SemanticGraph:
    """Immutable adjacency map from term to its outgoing relations.

    Relations under each key are kept in lookup order (descending weight,
    then to_term), so slicing yields deterministic prefixes.
    """

    def __init__(
        self,
        relations: Iterable[Relation] = (),
        parse_errors: Iterable[GraphParseError] = (),
    ):
        adjacency: dict[str, list[Relation]] = {}
        terms: set[str] = set()
        edge_count = 0
        for relation in relations:
            adjacency.setdefault(relation.from_term, []).append(relation)
            terms.update((relation.from_term, relation.to_term))
            edge_count += 1

        self._adjacency = {
            term: tuple(sorted(rels, key=_ordering)) for term, rels in adjacency.items()
        }
        self._term_count = len(terms)
        self._edge_count = edge_count
        self.parse_errors: tuple[GraphParseError, ...] = tuple(parse_errors)

    @property
    def adjacency(self) -> Mapping[str, tuple[Relation, ...]]:
        return dict(self._adjacency)

    @property
    def term_count(self) -> int:
        return self._term_count

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def __contains__(self, term: str) -> bool:
        return normalize_term(term) in self._adjacency

    def relations(self, term: str, relation_kind: Optional[str] = None) -> list[Relation]:
        rels = self._adjacency.get(normalize_term(term), ())
        if relation_kind is not None:
            return [r for r in rels if r.relation_kind == relation_kind]
        return list(rels)


def _parse_row(line_no: int, line: str) -> Relation:
    fields = line.split("\t")
    if len(fields) != 4:
        raise GraphParseError(line_no, line, f"expected 4 tab-separated fields, got {len(fields)}")
    from_term, kind, to_term, weight_text = fields
    try:
        weight = float(weight_text)
    except ValueError:
        raise GraphParseError(
            line_no, line, f"weight {weight_text.strip()!r} is not a number"
        ) from None
    try:
        return Relation(from_term=from_term, relation_kind=kind, to_term=to_term, weight=weight)
    except ValidationError as e:
        reason = "; ".join(err["msg"] for err in e.errors())
        raise GraphParseError(line_no, line, reason) from None


def load_graph(path: Path | str, strict: bool = False) -> SemanticGraph:
    """Load a TSV graph file: `from<TAB>relation<TAB>to<TAB>weight` per line.

    Blank lines and lines starting with `#` are skipped. Malformed rows are
    collected on `graph.parse_errors` (1-based line numbers) and logged; with
    `strict=True` the first malformed row raises instead.

    Raises:
        ContentIOError: file cannot be read
        GraphParseError: malformed row in strict mode
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ContentIOError(f"cannot read graph {path}: {e}") from e

    relations: list[Relation] = []
    errors: list[GraphParseError] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            relations.append(_parse_row(line_no, line))
        except GraphParseError as e:
            if strict:
                raise
            errors.append(e)

    if errors:
        lines = ", ".join(str(e.line_no) for e in errors[:10])
        logger.warning(f"Skipped {len(errors)} malformed graph rows in {path.name} (lines {lines})")

    graph = SemanticGraph(relations, errors)
    logger.debug(f"Loaded graph {path.name}: {graph.term_count} terms, {graph.edge_count} edges")
    return graph


def related_terms(
    provider: RelationProvider,
    term: str,
    limit: int,
    relation_kind: Optional[str] = None,
) -> list[Relation]:
    """Up to `limit` relations of `term`, heaviest first, ties by to_term.

    Self-loops are never returned. Online providers raise
    SourceUnavailableError on service failures.
    """
    if limit <= 0:
        return []
    term = normalize_term(term)
    rels = [r for r in provider.relations(term, relation_kind) if r.to_term != r.from_term]
    rels.sort(key=_ordering)
    return rels[:limit]


def related_locations(provider: RelationProvider, term: str, limit: int) -> list[Relation]:
    """related_terms restricted to at_location edges."""
    return related_terms(provider, term, limit, relation_kind=AT_LOCATION)
