"""Exception hierarchy for Deckforge."""

from typing import Optional


class DeckforgeError(Exception):
    """Base class for every error raised by Deckforge."""


# === Semantic graph ===

class GraphParseError(DeckforgeError):
    """A row of a graph file could not be parsed."""

    def __init__(self, line_no: int, line: str = "", reason: str = "malformed row"):
        self.line_no = line_no
        self.line = line
        self.reason = reason
        super().__init__(f"parse_error at line {line_no}: {reason}")


# === Content sources ===

class SourceError(DeckforgeError):
    """Base class for content source failures."""

    def __init__(self, source_name: str, message: str):
        self.source_name = source_name
        super().__init__(f"{source_name}: {message}")


class SourceUnavailableError(SourceError):
    """A remote provider failed and no fallback corpus is configured."""


class SourceEmptyError(SourceError):
    """A corpus has no items to pick from."""


class MixedKindsError(DeckforgeError):
    """Composite children do not share one content kind."""


class AllChildrenFailedError(SourceError):
    """Every child of a composite source failed."""


class ContentIOError(DeckforgeError, OSError):
    """A cache or corpus location is not usable."""


# === Grammar ===

class GrammarError(DeckforgeError):
    """Base class for grammar parsing and expansion errors."""


class GrammarParseError(GrammarError):
    """Grammar text is not a JSON object of strings or string lists."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"parse_error at {location}: {message}")


class UndefinedRuleError(GrammarError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"undefined_rule: {name!r}")


class EmptyRuleError(GrammarError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"empty_rule: {name!r}")


class ExpansionExhaustedError(GrammarError):
    def __init__(self, rule: str, attempts: int, last_failure: Optional[str] = None):
        self.rule = rule
        self.attempts = attempts
        self.last_failure = last_failure
        detail = f" (last failure: {last_failure})" if last_failure else ""
        super().__init__(f"expansion_exhausted: rule {rule!r} after {attempts} attempts{detail}")


class DepthExceededError(GrammarError):
    def __init__(self, rule: str, max_depth: int):
        self.rule = rule
        self.max_depth = max_depth
        super().__init__(f"depth_exceeded: rule {rule!r} nested deeper than {max_depth}")


class UnknownFunctionError(GrammarError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown_function: {name!r}")


class DuplicateFunctionError(GrammarError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate_function: {name!r}")


# === Scheduling and generation ===

class SchemaError(DeckforgeError):
    """A presentation schema is unreadable or inconsistent."""


class NoAdmissibleGeneratorError(DeckforgeError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"no_admissible_generator at position {position}")


class SlideGenerationError(DeckforgeError):
    """A content or grammar failure, annotated with where it happened."""

    def __init__(
        self,
        spec_name: str,
        seed: str,
        placeholder: Optional[str],
        cause: Exception,
        slide_index: Optional[int] = None,
    ):
        self.spec_name = spec_name
        self.seed = seed
        self.placeholder = placeholder
        self.cause = cause
        self.slide_index = slide_index
        where = f"slide {slide_index}, " if slide_index is not None else ""
        super().__init__(
            f"{where}generator {spec_name!r}, seed {seed!r}, placeholder {placeholder!r}: {cause}"
        )


class AssemblyExhaustedError(DeckforgeError):
    def __init__(self, max_rounds: int, slide_indices: list[int], reports: Optional[list] = None):
        self.max_rounds = max_rounds
        self.slide_indices = slide_indices
        self.reports = reports or []
        super().__init__(
            f"assembly_exhausted after {max_rounds} rounds; still violating: {slide_indices}"
        )


# === Export ===

class ExportError(DeckforgeError):
    """Writing a deck to disk failed."""


class UnresolvableMediaError(ExportError):
    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"unresolvable_media: {asset_id}")


class OversizedMediaError(ExportError):
    def __init__(self, asset_id: str, size: int, limit: int):
        self.asset_id = asset_id
        self.size = size
        self.limit = limit
        super().__init__(f"oversized_media: {asset_id} is {size} bytes (limit {limit})")
