"""Transform and predicate functions usable in `{var.fn}` slots."""

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Literal, Mapping, Optional

from ..config import get_data_dir
from ..errors import DuplicateFunctionError, UnknownFunctionError

FunctionKind = Literal["transform", "predicate"]

SMALL_WORDS = frozenset(
    "a an and as at but by for from in into nor of on or over the to up via with".split()
)
VOWELS = frozenset("aeiou")

# Identity when unmapped; schema authors extend it through register_function.
PRONOUNS = {
    "i": "you",
    "me": "you",
    "my": "your",
    "mine": "yours",
    "myself": "yourself",
    "we": "you",
    "us": "you",
    "our": "your",
    "you": "I",
    "your": "my",
    "yours": "mine",
    "yourself": "myself",
}


@dataclass(frozen=True)
class FunctionSpec:
    """A registered slot function.

    Transforms return the rewritten value, or None to reject it. Predicates
    return a bool and never alter the value. `takes_rng` functions receive the
    expansion's generator as a second argument.
    """

    name: str
    kind: FunctionKind
    fn: Callable
    takes_rng: bool = False


class FunctionRegistry:
    """Immutable name -> FunctionSpec map; `register` returns a new registry."""

    def __init__(self, functions: Optional[Mapping[str, FunctionSpec]] = None):
        self._functions = MappingProxyType(dict(functions or {}))

    def __contains__(self, name: str) -> bool:
        return name in self._functions

    def __len__(self) -> int:
        return len(self._functions)

    def names(self) -> list[str]:
        return sorted(self._functions)

    def get(self, name: str) -> FunctionSpec:
        try:
            return self._functions[name]
        except KeyError:
            raise UnknownFunctionError(name) from None

    def register(
        self, name: str, kind: FunctionKind, fn: Callable, takes_rng: bool = False
    ) -> "FunctionRegistry":
        if name in self._functions:
            raise DuplicateFunctionError(name)
        if kind not in ("transform", "predicate"):
            raise ValueError(f"function kind must be transform or predicate, got {kind!r}")
        return FunctionRegistry({**self._functions, name: FunctionSpec(name, kind, fn, takes_rng)})


def register_function(
    registry: FunctionRegistry,
    name: str,
    kind: FunctionKind,
    fn: Callable,
    takes_rng: bool = False,
) -> FunctionRegistry:
    """Return `registry` extended with `name`.

    Raises:
        DuplicateFunctionError: if `name` is already registered
    """
    return registry.register(name, kind, fn, takes_rng)


# === Built-ins ===

def title_case(value: str) -> str:
    words = value.split(" ")
    out = []
    for i, word in enumerate(words):
        if i > 0 and word.lower() in SMALL_WORDS:
            out.append(word.lower())
        elif word:
            out.append(word[0].upper() + word[1:])
        else:
            out.append(word)
    return " ".join(out)


def a_an(value: str) -> str:
    article = "an" if value[:1].lower() in VOWELS else "a"
    return f"{article} {value}"


def plural(value: str) -> str:
    lower = value.lower()
    if lower.endswith(("s", "x", "z", "ch", "sh")):
        return value + "es"
    if lower.endswith("y") and len(lower) > 1 and lower[-2] not in VOWELS:
        return value[:-1] + "ies"
    return value + "s"


def ing(value: str) -> str:
    """Gerund of the first word of an action phrase (`pet a cat` -> `petting a cat`)."""
    head, _, rest = value.partition(" ")
    lower = head.lower()
    if lower.endswith("ie"):
        gerund = head[:-2] + "ying"
    elif lower.endswith("e") and not lower.endswith(("ee", "ye", "oe")) and len(lower) > 2:
        gerund = head[:-1] + "ing"
    elif (
        len(lower) >= 3
        and lower[-1] not in VOWELS | {"w", "x", "y"}
        and lower[-2] in VOWELS
        and lower[-3] not in VOWELS
        and len(lower) <= 4
    ):
        gerund = head + head[-1] + "ing"
    else:
        gerund = head + "ing"
    return f"{gerund} {rest}" if rest else gerund


def pronoun(value: str) -> str:
    """Swap first and second person words (`my cat` -> `your cat`)."""
    return " ".join(PRONOUNS.get(word.lower(), word) for word in value.split(" "))


def load_word_list(path: Path | str) -> frozenset[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(
        line.strip().lower() for line in lines if line.strip() and not line.startswith("#")
    )


@lru_cache(maxsize=1)
def bundled_nouns() -> frozenset[str]:
    return load_word_list(get_data_dir() / "noun_list.txt")


def noun_predicate(nouns: frozenset[str]) -> Callable[[str], bool]:
    def is_noun(value: str) -> bool:
        return value.strip().lower() in nouns

    return is_noun


def default_registry(nouns: Optional[frozenset[str]] = None) -> FunctionRegistry:
    """Registry with the built-in casing, article, inflection and noun functions."""
    return (
        FunctionRegistry()
        .register("title", "transform", title_case)
        .register("lower", "transform", str.lower)
        .register("upper", "transform", str.upper)
        .register("capitalize", "transform", lambda v: v[:1].upper() + v[1:])
        .register("a_an", "transform", a_an)
        .register("plural", "transform", plural)
        .register("ing", "transform", ing)
        .register("pronoun", "transform", pronoun)
        .register(
            "is_noun",
            "predicate",
            noun_predicate(nouns if nouns is not None else bundled_nouns()),
        )
    )
