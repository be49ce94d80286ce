"""Online ConceptNet adapter with an on-disk response cache."""

import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Optional

import httpx

from ..errors import SourceUnavailableError
from ..utils.ids import cache_key
from .graph import Relation, normalize_term

logger = logging.getLogger(__name__)

SOURCE_NAME = "conceptnet"

_CAMEL_BOUNDARY = re.compile(r"(?<!^)(?=[A-Z])")


def relation_label_to_kind(label: str) -> str:
    """`AtLocation` -> `at_location`."""
    return _CAMEL_BOUNDARY.sub("_", label.strip().removeprefix("/r/")).lower()


def kind_to_relation_label(kind: str) -> str:
    """`at_location` -> `AtLocation`."""
    return "".join(part.capitalize() for part in kind.split("_"))


def _term_from_node(node: dict) -> Optional[str]:
    """Last path segment of an English node id (`/c/en/rug/n` -> `rug`)."""
    node_id = node.get("@id") or node.get("term") or ""
    parts = node_id.strip("/").split("/")
    if len(parts) < 3 or parts[0] != "c" or parts[1] != "en":
        return None
    term = parts[2]
    # Multi-word concepts are not usable as slide seeds
    if "_" in term:
        return None
    return normalize_term(term)


def parse_edges(term: str, payload: dict) -> list[Relation]:
    """Normalize a ConceptNet query response into relations leaving `term`."""
    relations = []
    for edge in payload.get("edges", []):
        start = _term_from_node(edge.get("start", {}))
        end = _term_from_node(edge.get("end", {}))
        if start != term or not end:
            continue
        label = (edge.get("rel") or {}).get("label", "")
        try:
            relations.append(
                Relation(
                    from_term=start,
                    relation_kind=relation_label_to_kind(label),
                    to_term=end,
                    weight=max(float(edge.get("weight", 1.0)), 0.0),
                )
            )
        except ValueError:
            continue
    return relations


class ConceptNetClient:
    """RelationProvider backed by the public ConceptNet query API.

    Responses are cached at `<cache_dir>/semantic/<sha256(term|filter)>.json`.
    Cache writes go to a temporary file renamed into place, so concurrent
    lookups of the same key at worst both fetch and the last writer wins.
    """

    def __init__(
        self,
        base_url: str,
        cache_dir: Optional[Path] = None,
        timeout: float = 10.0,
        client: Optional[httpx.Client] = None,
        limit: int = 100,
    ):
        self.base_url = base_url.rstrip("/")
        self.cache_dir = Path(cache_dir) / "semantic" if cache_dir else None
        self.limit = limit
        self._client = client or httpx.Client(timeout=timeout)

    def close(self) -> None:
        self._client.close()

    def _cache_path(self, term: str, relation_kind: Optional[str]) -> Optional[Path]:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"{cache_key(term, relation_kind or '')}.json"

    def _read_cache(self, path: Optional[Path]) -> Optional[list[Relation]]:
        if path is None or not path.exists():
            return None
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return [Relation.model_validate(item) for item in data]
        except (OSError, ValueError) as e:
            logger.warning(f"Ignoring unreadable semantic cache entry {path.name}: {e}")
            return None

    def _write_cache(self, path: Optional[Path], relations: list[Relation]) -> None:
        if path is None:
            return
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        except OSError as e:
            logger.warning(f"Could not write semantic cache entry {path.name}: {e}")
            return
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump([r.model_dump() for r in relations], f)
            os.replace(tmp, path)
        except (OSError, TypeError, ValueError) as e:
            logger.warning(f"Could not write semantic cache entry {path.name}: {e}")
            Path(tmp).unlink(missing_ok=True)

    def _fetch(self, term: str, relation_kind: Optional[str]) -> list[Relation]:
        params = {"start": f"/c/en/{term}", "limit": str(self.limit)}
        if relation_kind:
            params["rel"] = f"/r/{kind_to_relation_label(relation_kind)}"
        try:
            response = self._client.get(f"{self.base_url}/query", params=params)
            response.raise_for_status()
            payload = response.json()
        except (httpx.HTTPError, ValueError) as e:
            raise SourceUnavailableError(SOURCE_NAME, f"lookup of {term!r} failed: {e}") from e
        return parse_edges(term, payload)

    def relations(self, term: str, relation_kind: Optional[str] = None) -> list[Relation]:
        term = normalize_term(term)
        path = self._cache_path(term, relation_kind)
        cached = self._read_cache(path)
        if cached is not None:
            return cached

        relations = self._fetch(term, relation_kind)
        if relation_kind:
            relations = [r for r in relations if r.relation_kind == relation_kind]
        logger.debug(f"ConceptNet {term!r} ({relation_kind or 'any'}): {len(relations)} edges")
        self._write_cache(path, relations)
        return relations
