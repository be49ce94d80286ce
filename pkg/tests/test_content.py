"""Tests for content sources: corpora, composites, tuples, cache and online adapters."""

import httpx
import numpy as np
import pytest

from deckforge.config import get_data_dir
from deckforge.content.base import content_asset_ids, fetch_image, fetch_text, fetch_tuple, pick
from deckforge.content.cache import CachedSource, cached, decode_content, encode_content
from deckforge.content.catalog import load_catalog
from deckforge.content.composite import CompositeSource, combine
from deckforge.content.corpus import (
    HowToSource,
    ImageCorpusSource,
    ImageEntry,
    TextCorpusSource,
    extract_action,
    quality_filter,
)
from deckforge.content.online import (
    GifSearchSource,
    HowToSearchSource,
    ImageSearchSource,
    SubredditSource,
)
from deckforge.content.tupled import CaptionPairSource, LinkedTupleSource, read_caption_table
from deckforge.errors import (
    AllChildrenFailedError,
    ContentIOError,
    MixedKindsError,
    SchemaError,
    SourceEmptyError,
    SourceUnavailableError,
)
from deckforge.models.content import ImageAsset, TextContent
from deckforge.utils.sampling import roulette_select

from .conftest import CountingSource

# Chi-square critical values at p = 0.01
CHI2_DF1 = 6.635
CHI2_DF2 = 9.210

QUOTES = [
    TextContent(text="Give a man a fish and you feed him for a day", attribution="Proverb"),
    TextContent(text="Well begun is half done", attribution="Aristotle"),
    TextContent(text="The best way out is always through", attribution="Robert Frost"),
]


def _chi_square(observed, expected) -> float:
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    return float(np.sum((observed - expected) ** 2 / expected))


class FailingSource(TextCorpusSource):
    """A text source whose corpus is always empty."""

    def __init__(self, name: str = "broken"):
        super().__init__(name, [])


class TestTextCorpus:
    """Tests for line and quote corpora."""

    def test_seed_match_is_preferred(self, rng):
        """Test that a quote mentioning the seed is chosen and marked related."""
        source = TextCorpusSource("quotes", QUOTES)
        for _ in range(10):
            quote = fetch_text(source, "fish", rng)
            assert "fish" in quote.text
            assert quote.related_to_seed

    def test_no_match_picks_at_random(self, rng):
        """Test that an unmatched seed still yields an unrelated item."""
        quote = fetch_text(TextCorpusSource("quotes", QUOTES), "zebra", rng)
        assert quote in [q.model_copy(update={"related_to_seed": False}) for q in QUOTES]
        assert not quote.related_to_seed

    def test_random_fallback_probability(self, rng):
        """Test that a fallback probability of one always ignores the seed."""
        source = TextCorpusSource("quotes", QUOTES, random_fallback_probability=1.0)
        assert not any(fetch_text(source, "fish", rng).related_to_seed for _ in range(20))

    def test_empty_corpus(self, rng):
        """Test that an empty corpus raises SourceEmptyError."""
        with pytest.raises(SourceEmptyError):
            TextCorpusSource("empty", []).fetch("cat", rng)

    def test_quote_file_carries_author(self, write_file, rng):
        """Test that quote lines split into text and attribution."""
        path = write_file("quotes.tsv", "# quotes\nGive a man a fish\tProverb\n")
        quote = TextCorpusSource.from_lines("quotes", path, quotes=True).fetch("fish", rng)
        assert quote.render() == "“Give a man a fish” — Proverb"

    def test_wrong_kind_is_rejected(self, rng, single_image_corpus):
        """Test that fetch_text refuses an image source."""
        with pytest.raises(TypeError):
            fetch_text(single_image_corpus, "cat", rng)


class TestHowTo:
    """Tests for how-to title handling."""

    @pytest.mark.parametrize(
        "title,action",
        [
            ("How to Pet a Cat", "pet a cat"),
            ("5 Ways to Bake Bread (with Pictures)", "bake bread"),
            ("How to Use a USB Drive", "use a USB drive"),
        ],
    )
    def test_extract_action(self, title, action):
        """Test that how-to titles reduce to lowercase action phrases."""
        assert extract_action(title) == action

    def test_source_yields_actions(self, howto_source, rng):
        """Test that the how-to source returns the matching action phrase."""
        content = howto_source.fetch("dog", rng)
        assert content.text == "walk a dog"
        assert content.related_to_seed


class TestImageCorpus:
    """Tests for image folders."""

    def test_single_file_always_returned(self, single_image_corpus, rng):
        """Test that a one-file corpus serves that file even when excluded."""
        first = fetch_image(single_image_corpus, "cat", rng)
        assert first.asset_id == "only_one:only_one/lonely.png"
        again = fetch_image(single_image_corpus, "cat", rng, frozenset({first.asset_id}))
        assert again == first

    def test_keywords_match_seed(self, image_dir, rng):
        """Test that meta keywords make an image match the seed."""
        meta = ["a.png\tkitten whiskers\t\t", "b.png\tdog\t\t"]
        directory = image_dir("pets", ["a.png", "b.png"], meta)
        source = ImageCorpusSource("pets", directory)
        asset = source.fetch("kitten", rng)
        assert asset.locator == "pets/a.png"
        assert asset.related_to_seed

    def test_exclusion_is_preferred(self, image_dir, rng):
        """Test that excluded assets are avoided while others remain."""
        directory = image_dir("pair", ["a.png", "b.png"])
        source = ImageCorpusSource("pair", directory)
        for _ in range(10):
            assert source.fetch("", rng, frozenset({"pair:pair/a.png"})).locator == "pair/b.png"

    def test_used_seed_match_gives_way(self, image_dir):
        """Test that an unused unrelated image beats an already used seed match."""
        directory = image_dir("imgs", ["pizza_oven.png", "tree.png", "lake.png"])
        source = ImageCorpusSource("imgs", directory)
        used = frozenset({"imgs:imgs/pizza_oven.png"})
        for seed in range(20):
            asset = source.fetch("pizza", np.random.default_rng(seed), used)
            assert asset.locator in ("imgs/tree.png", "imgs/lake.png")
            assert not asset.related_to_seed

    def test_unused_seed_match_still_preferred(self, image_dir, rng):
        """Test that exclusion leaves other seed matches first in line."""
        directory = image_dir("imgs", ["pizza_oven.png", "pizza_slice.png", "tree.png"])
        source = ImageCorpusSource("imgs", directory)
        used = frozenset({"imgs:imgs/pizza_oven.png"})
        for _ in range(10):
            asset = source.fetch("pizza", rng, used)
            assert asset.locator == "imgs/pizza_slice.png"
            assert asset.related_to_seed

    def test_gif_is_animated(self, image_dir, rng):
        """Test that .gif files are animated media."""
        directory = image_dir("gifs", ["dance.gif"])
        assert ImageCorpusSource("gifs", directory).fetch("", rng).media_kind == "animated"

    def test_missing_directory(self, tmp_path):
        """Test that a missing folder raises ContentIOError."""
        with pytest.raises(ContentIOError):
            ImageCorpusSource("nothing", tmp_path / "nothing")

    def test_quality_filter_keeps_upper_half(self):
        """Test the upvote quantile filter keeps unrated entries."""
        entries = [ImageEntry(f"{i}.png", upvotes=float(i)) for i in range(1, 5)]
        entries.append(ImageEntry("unrated.png"))
        kept = [e.filename for e in quality_filter(entries, 0.5)]
        assert kept == ["3.png", "4.png", "unrated.png"]


class TestSampling:
    """Tests for pick and roulette selection."""

    def test_pick_prefers_allowed_items(self, rng):
        """Test that excluded keys are avoided while any other item remains."""
        picks = {pick(["x", "y", "z"], rng, frozenset({"x", "y"})) for _ in range(20)}
        assert picks == {"z"}

    def test_pick_falls_back_to_full_pool(self, rng):
        """Test that excluding everything still returns an item."""
        assert pick(["x"], rng, frozenset({"x"})) == "x"

    def test_roulette_never_picks_zero_weight(self, rng):
        """Test that zero-weight entries are never chosen."""
        picks = {roulette_select([0.0, 1.0, 0.0, 2.0], rng) for _ in range(500)}
        assert picks == {1, 3}

    @pytest.mark.parametrize("weights", [[], [-1.0, 2.0], [0.0, 0.0]])
    def test_roulette_rejects_bad_weights(self, weights, rng):
        """Test that empty, negative or all-zero weights are rejected."""
        with pytest.raises(ValueError):
            roulette_select(weights, rng)


class TestComposite:
    """Tests for weighted composition."""

    def test_zero_weight_child_never_fetched(self, counting_source, rng):
        """Test that weights (1, 0) always delegate to the first child."""
        first = counting_source("first", ["a"])
        second = counting_source("second", ["b"])
        composite = CompositeSource("pair", [(first, 1.0), (second, 0.0)])
        assert {composite.fetch("cat", rng).lower() for _ in range(200)} == {"a"}
        assert second.calls == 0

    def test_weights_match_frequencies(self, counting_source):
        """Test that (2, 1, 1) weights give matching frequencies (chi-square)."""
        children = [counting_source(name, [name]) for name in ("a", "b", "c")]
        composite = combine([(children[0], 2), (children[1], 1), (children[2], 1)])
        rng = np.random.default_rng(2024)
        for _ in range(4000):
            composite.fetch("", rng)
        observed = [child.calls for child in children]
        assert sum(observed) == 4000
        assert _chi_square(observed, [2000, 1000, 1000]) < CHI2_DF2

    def test_even_weights(self, counting_source):
        """Test that equal weights split evenly (chi-square, one degree of freedom)."""
        left, right = counting_source("l", ["l"]), counting_source("r", ["r"])
        composite = combine([(left, 1), (right, 1)], name="even")
        rng = np.random.default_rng(99)
        for _ in range(2000):
            composite.fetch("", rng)
        assert _chi_square([left.calls, right.calls], [1000, 1000]) < CHI2_DF1

    def test_exhausted_child_gives_way(self, counting_source, asset, rng):
        """Test that a child with only used assets yields to a sibling with fresh ones."""
        heavy = counting_source("heavy", [asset("a.png")], kind="image")
        light = counting_source("light", [asset("b.png")], kind="image")
        composite = combine([(heavy, 100), (light, 1)])
        used = frozenset({"fixture:a.png"})
        assert {composite.fetch("cat", rng, used).asset_id for _ in range(20)} == {"fixture:b.png"}

    def test_all_children_exhausted(self, counting_source, asset, rng):
        """Test that a used asset is returned when no child has anything else."""
        only = counting_source("only", [asset("a.png")], kind="image")
        composite = combine([(only, 1)])
        assert composite.fetch("cat", rng, frozenset({"fixture:a.png"})).locator == "a.png"

    def test_mixed_kinds_rejected(self, counting_source, single_image_corpus):
        """Test that text and image children cannot be combined."""
        with pytest.raises(MixedKindsError):
            combine([(counting_source("t", ["x"]), 1), (single_image_corpus, 1)])

    def test_failing_child_is_skipped(self, counting_source, rng):
        """Test that a failing child falls through to the others."""
        good = counting_source("good", ["ok"])
        composite = combine([(FailingSource(), 100), (good, 1)])
        assert composite.fetch("cat", rng) == "ok"

    def test_all_children_failing(self, rng):
        """Test that a composite of failing children raises AllChildrenFailedError."""
        composite = combine([(FailingSource("x"), 1), (FailingSource("y"), 1)], name="bad")
        with pytest.raises(AllChildrenFailedError):
            composite.fetch("cat", rng)


class TestTupledSources:
    """Tests for caption tables and linked tuples."""

    def test_caption_pair_order(self, counting_source, asset, rng):
        """Test that captions keep their order and the last child serves the last caption."""
        neutral = counting_source("neutral", [asset("plain.png", "neutral")], kind="image")
        odd = counting_source("odd", [asset("weird.png", "odd")], kind="image")
        source = CaptionPairSource("captions", [("Expectation", "Reality")], [neutral, odd])
        items = source.fetch("cat", rng)
        assert [caption for caption, _ in items] == ["Expectation", "Reality"]
        assert items[0][1].source_name == "neutral"
        assert items[1][1].source_name == "odd"

    def test_items_avoid_repeats(self, counting_source, asset, rng):
        """Test that one tuple does not repeat an asset when another is available."""
        pool = [asset("one.png"), asset("two.png")]
        images = counting_source("images", pool, kind="image")
        source = CaptionPairSource("captions", [("Good", "Bad")], [images])
        for _ in range(20):
            ids = content_asset_ids(source.fetch("", rng))
            assert len(set(ids)) == 2

    def test_empty_caption_table(self, counting_source, asset, rng):
        """Test that an empty table raises SourceEmptyError."""
        images = counting_source("images", [asset("one.png")], kind="image")
        with pytest.raises(SourceEmptyError):
            CaptionPairSource("captions", [], [images]).fetch("cat", rng)

    def test_read_caption_table(self, write_file):
        """Test that caption rows split on tabs and skip comments."""
        path = write_file("captions.tsv", "# header\nWhat I think\tWhat I do\n\n")
        assert read_caption_table(path) == [("What I think", "What I do")]

    def test_linked_text_seeds_image(self, counting_source, asset, rng):
        """Test that a generated job title is the seed of its image."""
        jobs = counting_source("jobs", [TextContent(text="Baker")])
        images = counting_source("images", [asset("bread.png")], kind="image")
        source = LinkedTupleSource("about_job", [(jobs, images)])
        items = source.fetch("cat", rng)
        assert items[0][0] == "Baker"
        assert images.seeds == ["baker"]
        assert jobs.seeds == ["cat"]

    def test_linked_image_avoids_used_match(self, counting_source, image_dir, rng):
        """Test that a used job picture gives way to an unused one."""
        jobs = counting_source("jobs", [TextContent(text="Baker")])
        directory = image_dir("people", ["baker.png", "plain.png"])
        images = ImageCorpusSource("people", directory)
        source = LinkedTupleSource("about_job", [(jobs, images)])
        items = source.fetch("cat", rng, frozenset({"people:people/baker.png"}))
        assert items[0][1].locator == "people/plain.png"

    def test_fetch_tuple_checks_kind(self, counting_source, asset, single_image_corpus, rng):
        """Test that fetch_tuple returns tuple items and refuses other kinds."""
        images = counting_source("images", [asset("one.png")], kind="image")
        source = CaptionPairSource("captions", [("Before", "After")], [images])
        assert [caption for caption, _ in fetch_tuple(source, "cat", rng)] == ["Before", "After"]
        with pytest.raises(TypeError):
            fetch_tuple(single_image_corpus, "cat", rng)


class RemoteSource(CountingSource):
    """Counting source that reports itself as online."""

    online = True


class TestCache:
    """Tests for the disk cache of online sources."""

    def test_repeat_fetch_hits_cache(self, tmp_path, rng):
        """Test that a second fetch of the same seed is served from disk."""
        remote = RemoteSource("remote", [TextContent(text="hello")])
        source = cached(remote, tmp_path)
        first = source.fetch("cat", rng)
        second = source.fetch("cat", rng)
        assert first == second
        assert remote.calls == 1
        assert len(list((tmp_path / "content").glob("*.json"))) == 1

    def test_failed_write_leaves_no_temp_file(self, tmp_path, rng, monkeypatch):
        """Test that an entry that cannot be serialized is served but not left behind."""

        def unserializable(content):
            raise TypeError("not JSON")

        monkeypatch.setattr("deckforge.content.cache.encode_content", unserializable)
        remote = RemoteSource("remote", [TextContent(text="hello")])
        assert cached(remote, tmp_path).fetch("cat", rng).text == "hello"
        assert list((tmp_path / "content").iterdir()) == []

    def test_offline_sources_pass_through(self, counting_source, tmp_path):
        """Test that offline sources are not wrapped."""
        source = counting_source("local", ["x"])
        assert cached(source, tmp_path) is source

    def test_excluded_cache_entry_is_bypassed(self, asset, tmp_path, rng):
        """Test that a cached asset the caller excludes triggers a fresh fetch."""
        remote = RemoteSource("remote", [asset("a.png"), asset("b.png")], kind="image")
        source = CachedSource(remote, tmp_path)
        first = source.fetch("cat", rng)
        source.fetch("cat", rng, frozenset({first.asset_id}))
        assert remote.calls == 2

    def test_unusable_cache_directory(self, tmp_path):
        """Test that a cache path under a regular file raises ContentIOError."""
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory")
        with pytest.raises(ContentIOError):
            CachedSource(RemoteSource("remote", ["x"]), blocker)

    def test_tupled_content_encoding(self, asset):
        """Test that tuples of captions, texts and images survive the cache format."""
        content = [("Caption", asset("a.png")), ("Other", TextContent(text="words"))]
        assert decode_content(encode_content(content)) == content


def _client(handler) -> httpx.Client:
    return httpx.Client(transport=httpx.MockTransport(handler))


class TestOnlineAdapters:
    """Tests for the HTTP adapters with mocked transports."""

    def test_gif_search(self, rng):
        """Test that gif search results become animated related assets."""
        seen = []

        def handler(request):
            seen.append(request)
            url = "https://media.test/cat.gif"
            return httpx.Response(200, json={"data": [{"images": {"original": {"url": url}}}]})

        source = GifSearchSource("gifs", "https://gif.test", _client(handler), api_key="k")
        gif = source.fetch("cat", rng)
        assert gif.locator == "https://media.test/cat.gif"
        assert gif.media_kind == "animated"
        assert gif.related_to_seed
        assert seen[0].url.path == "/v1/gifs/search"
        assert seen[0].url.params["q"] == "cat"
        assert seen[0].url.params["api_key"] == "k"

    def test_failure_uses_fallback(self, counting_source, asset, rng):
        """Test that an HTTP failure falls back to the offline corpus."""

        def handler(request):
            return httpx.Response(503)

        fallback = counting_source("local", [asset("local.png")], kind="image")
        source = GifSearchSource("gifs", "https://gif.test", _client(handler), fallback=fallback)
        assert source.fetch("cat", rng).locator == "local.png"
        assert fallback.seeds == ["cat"]

    def test_used_hits_fall_back_to_corpus(self, counting_source, asset, rng):
        """Test that search hits already in the deck give way to an unused corpus item."""

        def handler(request):
            url = "https://media.test/cat.gif"
            return httpx.Response(200, json={"data": [{"images": {"original": {"url": url}}}]})

        fallback = counting_source("local", [asset("local.png")], kind="image")
        source = GifSearchSource("gifs", "https://gif.test", _client(handler), fallback=fallback)
        used = frozenset({source.fetch("cat", rng).asset_id})
        assert source.fetch("cat", rng, used).locator == "local.png"
        assert fallback.seeds == ["cat"]

    def test_failure_without_fallback(self, rng):
        """Test that a failing adapter without a corpus raises SourceUnavailableError."""

        def handler(request):
            raise httpx.ConnectError("no route", request=request)

        source = ImageSearchSource("images", "https://img.test/search", _client(handler))
        with pytest.raises(SourceUnavailableError):
            source.fetch("cat", rng)

    def test_no_hits_picks_random_corpus_item(self, counting_source, rng):
        """Test that an empty result set asks the fallback for a random item."""

        def handler(request):
            return httpx.Response(200, json={"query": {"search": []}})

        fallback = HowToSource("howto", [TextContent(text="How to Juggle")])
        source = HowToSearchSource(
            "howto", "https://wiki.test", _client(handler), fallback=fallback
        )
        content = source.fetch("cat", rng)
        assert content.text == "juggle"
        assert not content.related_to_seed

    def test_howto_search_extracts_actions(self, rng):
        """Test that search titles become action phrases."""

        def handler(request):
            assert request.url.path == "/api.php"
            return httpx.Response(200, json={"query": {"search": [{"title": "How to Pet a Cat"}]}})

        source = HowToSearchSource("howto", "https://wiki.test", _client(handler))
        assert source.fetch("cat", rng).text == "pet a cat"

    def test_subreddit_keeps_top_voted_images(self, rng):
        """Test that only image posts at or above the median upvotes are kept."""

        def handler(request):
            assert request.url.path == "/r/mildlyinteresting/search.json"
            posts = [
                {"url": f"https://i.test/{ups}.jpg", "ups": ups} for ups in (10, 20, 30, 40)
            ]
            posts.append({"url": "https://reddit.test/comments/1", "ups": 999})
            return httpx.Response(200, json={"data": {"children": [{"data": p} for p in posts]}})

        source = SubredditSource(
            "odd", "https://reddit.test", _client(handler), subreddit="mildlyinteresting"
        )
        results = source.search("cat")
        locators = sorted(a.locator for a in results)
        assert locators == ["https://i.test/30.jpg", "https://i.test/40.jpg"]

    def test_image_search_sends_key(self, rng):
        """Test that the credential is passed as the key parameter."""

        def handler(request):
            assert request.url.params["key"] == "secret"
            return httpx.Response(200, json={"items": [{"link": "https://img.test/a.png"}]})

        client = _client(handler)
        source = ImageSearchSource("images", "https://img.test/search", client, api_key="secret")
        assert isinstance(source.fetch("cat", rng), ImageAsset)


class TestCatalog:
    """Tests for the bundled corpus descriptors."""

    def test_bundled_catalog_builds_offline(self, offline_services):
        """Test that every shipped descriptor builds into a source of its kind."""
        sources = offline_services.sources
        expected = {
            "quotes": "text",
            "howto_titles": "text",
            "images_neutral": "image",
            "gifs": "image",
            "funny_images": "image",
            "stock_images": "image",
            "captions_expectation": "tupled",
            "about_job": "tupled",
        }
        for name, kind in expected.items():
            assert sources[name].kind == kind
        assert not any(source.online for source in sources.values())

    def test_every_source_fetches(self, offline_services):
        """Test that each shipped source returns content for a common seed."""
        rng = np.random.default_rng(0)
        for name, source in offline_services.sources.items():
            assert source.fetch("cat", rng), name

    def test_grammar_sources_need_binding(self):
        """Test that grammar-backed descriptors fail before bind_grammar."""
        catalog = load_catalog(get_data_dir() / "corpus")
        with pytest.raises(SchemaError, match="bind_grammar"):
            catalog.get("jobs")

    def test_unknown_source(self):
        """Test that an unknown name raises SchemaError."""
        with pytest.raises(SchemaError, match="unknown content source"):
            load_catalog(get_data_dir() / "corpus").get("nope")
