"""Text generation language: Tracery rules plus external variables and functions."""

from .expand import ExpansionBudget, ExpansionContext, expand
from .functions import (
    FunctionRegistry,
    FunctionSpec,
    default_registry,
    load_word_list,
    register_function,
)
from .grammar import Grammar, load_grammar, load_grammar_dir, parse_grammar

__all__ = [
    "ExpansionBudget",
    "ExpansionContext",
    "expand",
    "FunctionRegistry",
    "FunctionSpec",
    "default_registry",
    "load_word_list",
    "register_function",
    "Grammar",
    "load_grammar",
    "load_grammar_dir",
    "parse_grammar",
]
