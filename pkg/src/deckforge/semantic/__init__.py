"""Semantic word graph: offline TSV graph and online ConceptNet adapter."""

from .conceptnet import ConceptNetClient
from .graph import (
    AT_LOCATION,
    RELATED_TO,
    Relation,
    RelationProvider,
    SemanticGraph,
    load_graph,
    related_locations,
    related_terms,
)

__all__ = [
    "AT_LOCATION",
    "RELATED_TO",
    "ConceptNetClient",
    "Relation",
    "RelationProvider",
    "SemanticGraph",
    "load_graph",
    "related_locations",
    "related_terms",
]
