"""Tests for grammar parsing, slot functions and expansion."""

import json
from collections import Counter

import httpx
import numpy as np
import pytest

from deckforge.errors import (
    DepthExceededError,
    DuplicateFunctionError,
    EmptyRuleError,
    ExpansionExhaustedError,
    GrammarParseError,
    UndefinedRuleError,
    UnknownFunctionError,
)
from deckforge.grammar.expand import ExpansionBudget, ExpansionContext, expand
from deckforge.grammar.functions import (
    a_an,
    default_registry,
    ing,
    load_word_list,
    plural,
    pronoun,
    register_function,
    title_case,
)
from deckforge.grammar.grammar import build_grammar, load_grammar, parse_grammar
from deckforge.semantic.conceptnet import ConceptNetClient
from deckforge.services import bind_lookups

from .conftest import FIXTURE_NOUNS


@pytest.fixture
def registry(fixture_graph, howto_source):
    """Default functions over the fixture nouns, plus graph and how-to lookups."""
    return bind_lookups(default_registry(FIXTURE_NOUNS), fixture_graph, howto_source)


def _ctx(registry, **variables) -> ExpansionContext:
    return ExpansionContext(variables, registry)


class TestParsing:
    """Tests for grammar validation."""

    def test_string_rule_becomes_single_alternative(self):
        """Test that a bare string is a one-alternative rule."""
        grammar = parse_grammar('{"origin": "hello #name#", "name": ["world", "there"]}')
        assert grammar.alternatives("origin") == ("hello #name#",)
        assert grammar.alternatives("name") == ("world", "there")

    @pytest.mark.parametrize(
        "text,error",
        [
            ("[1, 2]", GrammarParseError),
            ('{"a": 3}', GrammarParseError),
            ('{"a": ["ok", 4]}', GrammarParseError),
            ('{"a": "{broken"}', GrammarParseError),
            ("{not json", GrammarParseError),
            ('{"a": []}', EmptyRuleError),
            ('{"a": "#missing#"}', UndefinedRuleError),
        ],
    )
    def test_invalid_grammars(self, text, error):
        """Test each malformed grammar raises its error kind."""
        with pytest.raises(error):
            parse_grammar(text)

    def test_undefined_rule_names_the_reference(self):
        """Test that the undefined rule error carries the missing name."""
        with pytest.raises(UndefinedRuleError) as exc_info:
            build_grammar({"a": "#b# and #c#", "b": "x"})
        assert exc_info.value.name == "c"

    def test_files_merge_before_validation(self, write_file):
        """Test that references may cross grammar files."""
        first = write_file("g/a.json", json.dumps({"a": "#b#"}))
        second = write_file("g/b.json", json.dumps({"b": "bee"}))
        grammar = load_grammar([first, second])
        assert expand(grammar, "a", rng=np.random.default_rng(0)) == "bee"

    def test_bundled_grammars_load(self, offline_services):
        """Test that the shipped grammar files parse and reference each other."""
        rules = ("talk_title", "talk_subtitle", "chart_question", "job_title", "conclusion_title")
        for rule in rules:
            assert rule in offline_services.grammar


class TestExpansion:
    """Tests for rule expansion and slot resolution."""

    def test_worked_title_example(self, registry, rng):
        """Test the how-to title example for the topic cat."""
        grammar = build_grammar({"talk_title": "Why We All Need to {seed.wikihow_action.title}"})
        result = expand(grammar, "talk_title", _ctx(registry, seed="cat"), rng=rng)
        assert result == "Why We All Need to Pet a Cat"

    def test_noun_predicate_with_article(self, registry, rng):
        """Test that a noun seed passes the predicate and gets its article."""
        grammar = build_grammar({"s": "{seed.is_noun.a_an}"})
        assert expand(grammar, "s", _ctx(registry, seed="cat"), rng=rng) == "a cat"

    def test_failing_predicate_exhausts(self, registry, rng):
        """Test that a seed failing is_noun on every attempt exhausts the budget."""
        grammar = build_grammar({"s": "{seed.is_noun.a_an}"})
        with pytest.raises(ExpansionExhaustedError) as exc_info:
            expand(grammar, "s", _ctx(registry, seed="run"), ExpansionBudget(max_attempts=10), rng)
        assert exc_info.value.attempts == 10
        assert "is_noun" in exc_info.value.last_failure

    def test_upper_transform(self, registry, rng):
        """Test that the upper transform rewrites the slot."""
        grammar = build_grammar({"s": "{seed.upper}!"})
        assert expand(grammar, "s", _ctx(registry, seed="cat"), rng=rng) == "CAT!"

    def test_rejected_alternative_is_resampled(self, registry):
        """Test that a failing predicate steers expansion to the other alternative."""
        reg = registry.register("is_short", "predicate", lambda v: len(v) <= 3)
        grammar = build_grammar({"s": ["tiny {word.is_short}", "big {word}"]})
        ctx = _ctx(reg, word="elephant")
        for seed in range(20):
            result = expand(grammar, "s", ctx, rng=np.random.default_rng(seed))
            assert result == "big elephant"

    def test_transform_returning_none_rejects(self, registry, rng):
        """Test that a transform returning None counts as a rejection."""
        reg = registry.register("never", "transform", lambda v: None)
        grammar = build_grammar({"s": "{seed.never}"})
        with pytest.raises(ExpansionExhaustedError):
            expand(grammar, "s", _ctx(reg, seed="cat"), ExpansionBudget(max_attempts=3), rng)

    def test_missing_variable_rejects(self, registry, rng):
        """Test that an unbound variable exhausts the budget."""
        grammar = build_grammar({"s": "{presenter}"})
        with pytest.raises(ExpansionExhaustedError, match="missing variable"):
            expand(grammar, "s", _ctx(registry, seed="cat"), ExpansionBudget(max_attempts=2), rng)

    def test_unknown_function_raises(self, registry, rng):
        """Test that an unregistered function is an immediate error."""
        grammar = build_grammar({"s": "{seed.shout}"})
        with pytest.raises(UnknownFunctionError):
            expand(grammar, "s", _ctx(registry, seed="cat"), rng=rng)

    def test_depth_limit(self, rng):
        """Test that a self-recursive rule hits the depth limit."""
        grammar = build_grammar({"loop": "again #loop#"})
        with pytest.raises(DepthExceededError):
            expand(grammar, "loop", budget=ExpansionBudget(max_depth=5), rng=rng)

    def test_undefined_start_rule(self, rng):
        """Test that expanding a missing rule raises UndefinedRuleError."""
        with pytest.raises(UndefinedRuleError):
            expand(build_grammar({"a": "x"}), "b", rng=rng)

    def test_output_has_no_markers(self, offline_services):
        """Test that shipped rules expand without leftover markers."""
        variables = {"seed": "cat", "presenter": "Ada Lovelace"}
        ctx = ExpansionContext(variables, offline_services.registry)
        for seed in range(30):
            rng = np.random.default_rng(seed)
            for rule in ("talk_title", "talk_subtitle", "bold_statement", "chart_question"):
                text = expand(offline_services.grammar, rule, ctx, rng=rng)
                assert "#" not in text
                assert "{" not in text and "}" not in text

    def test_expansion_is_deterministic(self, registry):
        """Test that equal RNG states give equal expansions."""
        grammar = build_grammar({"s": ["#a# #b#"], "a": ["x", "y", "z"], "b": ["1", "2", "3"]})
        first = [expand(grammar, "s", rng=np.random.default_rng(3)) for _ in range(5)]
        second = [expand(grammar, "s", rng=np.random.default_rng(3)) for _ in range(5)]
        assert first == second

    def test_language_is_covered_uniformly(self):
        """Test that every word of a small finite language appears, and nothing else."""
        grammar = build_grammar({"s": "#a# #b#", "a": ["x", "y"], "b": ["1", "2"]})
        rng = np.random.default_rng(11)
        counts = Counter(expand(grammar, "s", rng=rng) for _ in range(800))
        assert set(counts) == {"x 1", "x 2", "y 1", "y 2"}
        assert all(150 <= c <= 250 for c in counts.values())

    def test_related_term_lookup(self, registry, rng):
        """Test that related_term yields a graph neighbour of the seed."""
        grammar = build_grammar({"s": "{seed.related_term}"})
        result = expand(grammar, "s", _ctx(registry, seed="sun"), rng=rng)
        assert result in {"sky", "beach", "summer"}

    def test_related_location_rejects_placeless_seed(self, registry, rng):
        """Test that a seed without locations rejects the slot."""
        grammar = build_grammar({"s": ["in {seed.related_location}", "nowhere"]})
        ctx = _ctx(registry, seed="cat")
        for seed in range(10):
            assert expand(grammar, "s", ctx, rng=np.random.default_rng(seed)) == "nowhere"
        assert expand(grammar, "s", _ctx(registry, seed="fish"), rng=rng) in {
            "in aquarium",
            "in river",
            "in market",
            "nowhere",
        }

    def test_failed_lookup_rejects_slot(self, rng):
        """Test that an unreachable word graph rejects the slot instead of raising."""

        def handler(request):
            return httpx.Response(503)

        client = ConceptNetClient(
            "http://cn.test", client=httpx.Client(transport=httpx.MockTransport(handler))
        )
        registry = bind_lookups(default_registry(FIXTURE_NOUNS), client)
        grammar = build_grammar({"s": ["about {seed.related_term}", "about nothing"]})
        assert expand(grammar, "s", _ctx(registry, seed="cat"), rng=rng) == "about nothing"

    def test_context_rejects_empty_variables(self, registry):
        """Test that variables must be non-empty strings."""
        with pytest.raises(ValueError):
            _ctx(registry, seed="")

    def test_with_variables_extends(self, registry):
        """Test that with_variables keeps existing bindings."""
        ctx = _ctx(registry, seed="cat").with_variables(presenter="Ada")
        assert dict(ctx.variables) == {"seed": "cat", "presenter": "Ada"}


class TestFunctions:
    """Tests for the built-in slot functions and the registry."""

    def test_duplicate_registration_fails(self):
        """Test that registering an existing name raises DuplicateFunctionError."""
        with pytest.raises(DuplicateFunctionError):
            register_function(default_registry(FIXTURE_NOUNS), "upper", "transform", str.upper)

    def test_register_returns_new_registry(self):
        """Test that registration leaves the original registry untouched."""
        base = default_registry(FIXTURE_NOUNS)
        extended = base.register("shout", "transform", lambda v: v.upper() + "!")
        assert "shout" in extended
        assert "shout" not in base

    def test_title_case_keeps_small_words(self):
        """Test that articles and prepositions stay lowercase after the first word."""
        assert title_case("the art of war") == "The Art of War"
        assert title_case("pet a cat") == "Pet a Cat"

    @pytest.mark.parametrize(
        "word,expected", [("cat", "a cat"), ("owl", "an owl"), ("Egg", "an Egg")]
    )
    def test_a_an(self, word, expected):
        """Test article selection on the first letter."""
        assert a_an(word) == expected

    @pytest.mark.parametrize(
        "word,expected", [("cat", "cats"), ("box", "boxes"), ("city", "cities"), ("day", "days")]
    )
    def test_plural(self, word, expected):
        """Test the English plural rules."""
        assert plural(word) == expected

    @pytest.mark.parametrize(
        "phrase,expected",
        [
            ("pet a cat", "petting a cat"),
            ("bake bread", "baking bread"),
            ("walk a dog", "walking a dog"),
            ("tie a knot", "tying a knot"),
        ],
    )
    def test_ing(self, phrase, expected):
        """Test gerunds of action phrases."""
        assert ing(phrase) == expected

    def test_pronoun_swaps_person(self):
        """Test that first-person words become second person."""
        assert pronoun("my cat and I") == "your cat and you"

    def test_word_list_skips_comments(self, write_file):
        """Test that word lists drop comments and blanks and lowercase entries."""
        path = write_file("nouns.txt", "# nouns\nCat\n\ndog\n")
        assert load_word_list(path) == frozenset({"cat", "dog"})
