"""Grammar files: Tracery-style JSON rule maps with external `{var.fn}` slots."""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from ..errors import ContentIOError, EmptyRuleError, GrammarParseError, UndefinedRuleError

NAME = r"[A-Za-z_][A-Za-z0-9_]*"
RULE_REF = re.compile(rf"#({NAME})#")
SLOT = re.compile(rf"\{{({NAME}(?:\.{NAME})*)\}}")


@dataclass(frozen=True)
class Grammar:
    """Rule name -> alternatives. Every `#ref#` resolves and no rule is empty."""

    rules: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.rules

    def alternatives(self, name: str) -> tuple[str, ...]:
        try:
            return self.rules[name]
        except KeyError:
            raise UndefinedRuleError(name) from None

    def merged(self, other: "Grammar") -> "Grammar":
        """Union of two grammars; rules of `other` win on name clashes."""
        return Grammar({**self.rules, **other.rules})


def references(template: str) -> list[str]:
    return RULE_REF.findall(template)


def _check_markers(rule: str, index: int, template: str) -> None:
    stripped = SLOT.sub("", RULE_REF.sub("", template))
    if "{" in stripped or "}" in stripped:
        raise GrammarParseError(f"{rule}[{index}]", f"malformed slot in {template!r}")
    if stripped.count("#") >= 2:
        raise GrammarParseError(f"{rule}[{index}]", f"malformed rule reference in {template!r}")


def build_grammar(data: Mapping[str, object]) -> Grammar:
    """Validate a decoded rule map and build the grammar.

    Raises:
        GrammarParseError: values that are not strings or string lists, bad markers
        EmptyRuleError: a rule with no alternatives
        UndefinedRuleError: a `#ref#` to a missing rule
    """
    rules: dict[str, tuple[str, ...]] = {}
    for name, value in data.items():
        if not re.fullmatch(NAME, name):
            raise GrammarParseError(name, "rule names must be identifiers")
        if isinstance(value, str):
            alternatives = (value,)
        elif isinstance(value, list) and all(isinstance(v, str) for v in value):
            alternatives = tuple(value)
        else:
            raise GrammarParseError(name, "rule must be a string or a list of strings")
        if not alternatives:
            raise EmptyRuleError(name)
        for index, template in enumerate(alternatives):
            _check_markers(name, index, template)
        rules[name] = alternatives

    for name, alternatives in rules.items():
        for template in alternatives:
            for ref in references(template):
                if ref not in rules:
                    raise UndefinedRuleError(ref)

    return Grammar(rules)


def parse_grammar(text: str) -> Grammar:
    """Parse UTF-8 JSON grammar text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GrammarParseError(f"line {e.lineno}, column {e.colno}", e.msg) from e
    if not isinstance(data, dict):
        raise GrammarParseError("root", "grammar must be a JSON object")
    return build_grammar(data)


def load_grammar(paths: Iterable[Path | str]) -> Grammar:
    """Read and merge grammar files; references are validated across all of them."""
    data: dict[str, object] = {}
    for path in paths:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ContentIOError(f"cannot read grammar {path}: {e}") from e
        try:
            decoded = json.loads(text)
        except json.JSONDecodeError as e:
            raise GrammarParseError(f"{path.name}: line {e.lineno}, column {e.colno}", e.msg) from e
        if not isinstance(decoded, dict):
            raise GrammarParseError(path.name, "grammar must be a JSON object")
        data.update(decoded)
    return build_grammar(data)


def load_grammar_dir(directory: Path | str) -> Grammar:
    return load_grammar(sorted(Path(directory).glob("*.json")))
