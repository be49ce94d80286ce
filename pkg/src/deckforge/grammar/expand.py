"""Grammar expansion with external variables, slot functions and retry."""

import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from ..errors import DepthExceededError, ExpansionExhaustedError
from .functions import FunctionRegistry
from .grammar import RULE_REF, SLOT, Grammar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpansionBudget:
    max_attempts: int = 100
    max_depth: int = 50

    def __post_init__(self):
        if self.max_attempts < 1 or self.max_depth < 1:
            raise ValueError("expansion budget values must be at least 1")


@dataclass(frozen=True)
class ExpansionContext:
    """External variables and the function registry for one expansion."""

    variables: Mapping[str, str] = field(default_factory=dict)
    registry: FunctionRegistry = field(default_factory=FunctionRegistry)

    def __post_init__(self):
        empty = sorted(k for k, v in self.variables.items() if not v)
        if empty:
            raise ValueError(f"variables must be non-empty: {empty}")
        object.__setattr__(self, "variables", MappingProxyType(dict(self.variables)))

    def with_variables(self, **variables: str) -> "ExpansionContext":
        return ExpansionContext({**self.variables, **variables}, self.registry)


class _Rejected(Exception):
    """A slot could not be resolved; the whole expansion is resampled."""


def _expand_rules(
    grammar: Grammar, rule: str, rng: np.random.Generator, depth: int, max_depth: int
) -> str:
    if depth > max_depth:
        raise DepthExceededError(rule, max_depth)
    alternatives = grammar.alternatives(rule)
    if len(alternatives) > 1:
        template = alternatives[int(rng.integers(len(alternatives)))]
    else:
        template = alternatives[0]
    return RULE_REF.sub(
        lambda m: _expand_rules(grammar, m.group(1), rng, depth + 1, max_depth), template
    )


def resolve_slot(path: str, ctx: ExpansionContext, rng: np.random.Generator) -> str:
    """Resolve `var.fn1.fn2` left to right.

    Raises:
        UnknownFunctionError: a function name is not registered
        _Rejected: missing variable, failing predicate or rejecting transform
    """
    name, *chain = path.split(".")
    value = ctx.variables.get(name)
    if value is None:
        raise _Rejected(f"missing variable {name!r}")

    for fn_name in chain:
        spec = ctx.registry.get(fn_name)
        args = (value, rng) if spec.takes_rng else (value,)
        result = spec.fn(*args)
        if spec.kind == "predicate":
            if not result:
                raise _Rejected(f"{fn_name}({value!r}) failed")
        else:
            if not result:
                raise _Rejected(f"{fn_name}({value!r}) rejected the value")
            value = str(result)
    return value


def _resolve_slots(text: str, ctx: ExpansionContext, rng: np.random.Generator) -> str:
    return SLOT.sub(lambda m: resolve_slot(m.group(1), ctx, rng), text)


def expand(
    grammar: Grammar,
    rule: str,
    ctx: Optional[ExpansionContext] = None,
    budget: Optional[ExpansionBudget] = None,
    rng: Optional[np.random.Generator] = None,
) -> str:
    """Expand `rule` into a string with no `#rule#` or `{slot}` markers left.

    Nonterminals pick alternatives uniformly. Slots are resolved after the
    rule expansion; when any slot is rejected the entire expansion is
    resampled, up to `budget.max_attempts` times.

    Raises:
        UndefinedRuleError: `rule` does not exist
        DepthExceededError: nesting deeper than `budget.max_depth`
        UnknownFunctionError: a slot names an unregistered function
        ExpansionExhaustedError: every attempt was rejected
    """
    ctx = ctx or ExpansionContext()
    budget = budget or ExpansionBudget()
    rng = rng if rng is not None else np.random.default_rng()
    grammar.alternatives(rule)

    last_failure = None
    for _ in range(budget.max_attempts):
        text = _expand_rules(grammar, rule, rng, 1, budget.max_depth)
        try:
            return _resolve_slots(text, ctx, rng)
        except _Rejected as e:
            last_failure = str(e)

    logger.debug(f"Expansion of {rule!r} exhausted: {last_failure}")
    raise ExpansionExhaustedError(rule, budget.max_attempts, last_failure)
