"""Tests for synthesized chart data."""

import math

import httpx
import numpy as np
import pytest

from deckforge.charts.engine import (
    FUNNY_RANGE,
    GENERIC_AXIS_LABELS,
    YESNO_RANGE,
    gen_location_chart,
    gen_scatter,
    gen_yesno_chart,
    normalize_to,
)
from deckforge.grammar.functions import default_registry
from deckforge.grammar.grammar import build_grammar
from deckforge.semantic.conceptnet import ConceptNetClient
from deckforge.semantic.graph import SemanticGraph

from .conftest import FIXTURE_NOUNS

CHART_GRAMMAR = build_grammar(
    {
        "chart_question": ["Do You Like {seed.plural.title}?", "Have You Ever Seen {seed.a_an}?"],
        "chart_funny_answer": ["Only on Tuesdays", "Ask my mother"],
    }
)


class TestScatter:
    """Tests for the noisy function scatter."""

    def test_noise_free_quadratic(self, fixture_graph, rng):
        """Test that sigma 0 gives exact squares at evenly spaced x."""
        chart = gen_scatter("quadratic", 0.0, 3, fixture_graph, "sun", rng, x_range=(0.0, 2.0))
        assert chart.points == ((0.0, 0.0), (1.0, 1.0), (2.0, 4.0))

    def test_noise_free_logarithm(self, fixture_graph, rng):
        """Test that the logarithm is zero at one and one at e."""
        chart = gen_scatter("logarithmic", 0.0, 2, fixture_graph, "sun", rng, x_range=(1.0, math.e))
        assert chart.points[0] == (1.0, 0.0)
        assert chart.points[1][1] == pytest.approx(1.0)

    def test_noise_is_applied(self, fixture_graph, rng):
        """Test that a positive sigma perturbs the curve."""
        chart = gen_scatter("quadratic", 0.5, 10, fixture_graph, "sun", rng)
        xs = np.array([x for x, _ in chart.points])
        ys = np.array([y for _, y in chart.points])
        assert not np.allclose(ys, xs**2)
        assert np.abs(ys - xs**2).max() < 5.0

    @pytest.mark.parametrize(
        "fn_kind,sigma,n,x_range",
        [
            ("quadratic", 0.0, 1, (1.0, 10.0)),
            ("quadratic", -0.1, 5, (1.0, 10.0)),
            ("logarithmic", 0.0, 5, (0.0, 10.0)),
        ],
    )
    def test_invalid_arguments(self, fixture_graph, rng, fn_kind, sigma, n, x_range):
        """Test that too few points, negative noise and log of zero are rejected."""
        with pytest.raises(ValueError):
            gen_scatter(fn_kind, sigma, n, fixture_graph, "sun", rng, x_range=x_range)

    def test_axis_labels_from_neighbours(self, fixture_graph, rng):
        """Test that both axes are distinct related terms of the seed."""
        chart = gen_scatter("quadratic", 0.0, 4, fixture_graph, "sun", rng)
        x_label, y_label = chart.axis_labels
        assert x_label != y_label
        assert {x_label, y_label} <= {"Sky", "Beach", "Summer"}
        assert chart.title == f"{y_label} vs. {x_label}"

    def test_axis_labels_without_neighbours(self, rng):
        """Test that an isolated seed is plotted against a generic label."""
        chart = gen_scatter("quadratic", 0.0, 4, SemanticGraph(), "kazoo", rng)
        x_label, y_label = chart.axis_labels
        assert x_label == "Kazoo"
        assert y_label.lower() in GENERIC_AXIS_LABELS


class TestYesNoChart:
    """Tests for the yes / no / funny-answer chart."""

    @pytest.mark.parametrize("seed", range(25))
    def test_funny_answer_always_wins(self, seed):
        """Test that the funny bar is taller than both yes and no."""
        rng = np.random.default_rng(seed)
        chart = gen_yesno_chart("cat", CHART_GRAMMAR, rng, default_registry(FIXTURE_NOUNS))
        yes, no, funny = (c.value for c in chart.categories)
        assert YESNO_RANGE[0] <= yes <= YESNO_RANGE[1]
        assert YESNO_RANGE[0] <= no <= YESNO_RANGE[1]
        assert FUNNY_RANGE[0] <= funny <= FUNNY_RANGE[1]
        assert funny > max(yes, no)

    def test_labels_and_question(self, rng):
        """Test the category labels and the grammar-generated title."""
        chart = gen_yesno_chart("cat", CHART_GRAMMAR, rng, default_registry(FIXTURE_NOUNS))
        labels = [c.label for c in chart.categories]
        assert labels[:2] == ["Yes", "No"]
        assert labels[2] in {"Only on Tuesdays", "Ask my mother"}
        assert chart.title in {"Do You Like Cats?", "Have You Ever Seen a cat?"}

    def test_pie_sums_to_hundred(self, rng):
        """Test that the pie variant is normalized to 100."""
        chart = gen_yesno_chart(
            "cat", CHART_GRAMMAR, rng, default_registry(FIXTURE_NOUNS), kind="pie"
        )
        assert chart.kind == "pie"
        assert chart.total() == pytest.approx(100.0, abs=1e-9)
        assert chart.categories[2].value == max(c.value for c in chart.categories)


class TestLocationChart:
    """Tests for the where-is-it-found chart."""

    def test_fixture_locations(self, fixture_graph, rng):
        """Test that fish gets its three locations as a pie summing to 100."""
        chart = gen_location_chart("fish", fixture_graph, rng)
        assert [c.label for c in chart.categories] == ["Aquarium", "River", "Market"]
        assert chart.total() == pytest.approx(100.0, abs=1e-9)
        assert chart.title == "Where Fish Is Found"

    def test_histogram_values_in_range(self, fixture_graph, rng):
        """Test that histogram values are raw draws in [1, 100]."""
        chart = gen_location_chart("fish", fixture_graph, rng, kind="histogram")
        assert all(1.0 <= c.value <= 100.0 for c in chart.categories)

    def test_generic_places_for_placeless_seed(self, fixture_graph):
        """Test that a seed without locations uses three to five generic places."""
        places = ("home", "the office", "the park", "the beach", "the moon", "a boat")
        allowed = {p.title() for p in places}
        for seed in range(20):
            chart = gen_location_chart(
                "cat", fixture_graph, np.random.default_rng(seed), generic_locations=places
            )
            labels = [c.label for c in chart.categories]
            assert 3 <= len(labels) <= 5
            assert len(set(labels)) == len(labels)
            assert set(labels) <= allowed

    def test_custom_title(self, fixture_graph, rng):
        """Test that an explicit title replaces the default."""
        chart = gen_location_chart("fish", fixture_graph, rng, title="Fish Habitats")
        assert chart.title == "Fish Habitats"


def test_normalize_to_sums_to_total():
    """Test that normalized values sum to the total."""
    values = normalize_to([1.0, 1.0, 1.0])
    assert math.fsum(values) == pytest.approx(100.0, abs=1e-12)
    assert values[0] == pytest.approx(100.0 / 3)


@pytest.fixture
def unreachable_conceptnet():
    """ConceptNet client whose service answers 503."""

    def handler(request):
        return httpx.Response(503)

    client = httpx.Client(transport=httpx.MockTransport(handler))
    return ConceptNetClient("http://cn.test", client=client)


class TestLookupOutage:
    """Tests for charts built while the online word graph is down."""

    def test_location_chart_uses_generic_places(self, unreachable_conceptnet, rng):
        """Test that a failed location lookup falls back to the generic list."""
        places = ("home", "the office", "the park", "the beach")
        chart = gen_location_chart(
            "fish", unreachable_conceptnet, rng, kind="pie", generic_locations=places
        )
        labels = [c.label for c in chart.categories]
        assert 3 <= len(labels) <= 5
        assert set(labels) <= {"Home", "The Office", "The Park", "The Beach"}
        assert math.fsum(c.value for c in chart.categories) == pytest.approx(100.0)

    def test_scatter_uses_generic_label(self, unreachable_conceptnet, rng):
        """Test that a failed neighbour lookup labels the axes with the seed."""
        chart = gen_scatter("quadratic", 0.0, 5, unreachable_conceptnet, "cat", rng)
        x_label, y_label = chart.axis_labels
        assert x_label == "Cat"
        assert y_label in {label.title() for label in GENERIC_AXIS_LABELS}
