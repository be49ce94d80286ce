"""Tests for configuration loading and structured logging."""

import io
import logging
from pathlib import Path

import pytest

from deckforge.config import (
    DeckforgeConfig,
    bundled_schema_path,
    get_data_dir,
    get_provider_key,
    load_config,
)
from deckforge.logging_config import (
    LOGGER_NAME,
    log_error,
    log_success,
    sanitize_log_input,
    setup_logging,
)


@pytest.fixture
def home(tmp_path, monkeypatch):
    """An empty home directory for the global config."""
    path = tmp_path / "home"
    path.mkdir()
    monkeypatch.setenv("HOME", str(path))
    return path


@pytest.fixture
def project(tmp_path):
    path = tmp_path / "project"
    (path / ".deckforge").mkdir(parents=True)
    return path


class TestLoadConfig:
    """Tests for the layered configuration."""

    def test_defaults(self, home, project):
        """Test that nothing on disk gives the offline defaults."""
        config = load_config(project, env={})
        assert config.offline is True
        assert config.max_rounds == 10
        assert config.slides is None
        assert config.resolved_schema_path() == bundled_schema_path()
        assert config.resolved_corpus_dir() == get_data_dir() / "corpus"

    def test_layer_priority(self, home, project):
        """Test environment > project > global."""
        (home / ".deckforge").mkdir()
        (home / ".deckforge" / "config.yaml").write_text("parallelism: 2\nmax_rounds: 3\n")
        (project / ".deckforge" / "config.yaml").write_text("max_rounds: 5\npresenter: Ada\n")
        env = {"DECKFORGE_PRESENTER": "Grace", "DECKFORGE_CACHE_DIR": "~/deck-cache"}
        config = load_config(project, env=env)
        assert config.parallelism == 2
        assert config.max_rounds == 5
        assert config.presenter == "Grace"
        assert config.cache_dir == home / "deck-cache"

    def test_unknown_keys_ignored(self, home, project):
        """Test that keys outside the config are skipped."""
        (project / ".deckforge" / "config.yaml").write_text("colour: blue\nslides: 12\n")
        config = load_config(project, env={})
        assert config.slides == 12
        assert not hasattr(config, "colour")

    def test_malformed_yaml_ignored(self, home, project):
        """Test that an unparsable project file leaves the defaults."""
        (project / ".deckforge" / "config.yaml").write_text("max_rounds: [1,\n")
        assert load_config(project, env={}).max_rounds == DeckforgeConfig().max_rounds

    def test_dotenv(self, home, project, monkeypatch):
        """Test that a project .env feeds the environment overrides."""
        monkeypatch.delenv("DECKFORGE_CONCEPTNET_URL", raising=False)
        (project / ".env").write_text("DECKFORGE_CONCEPTNET_URL=http://cn.local\n")
        assert load_config(project).conceptnet_url == "http://cn.local"

    def test_path_fields(self, home, project):
        """Test that path settings become Path objects."""
        env = {"DECKFORGE_CORPUS_DIR": "/srv/corpus", "DECKFORGE_GRAPH_PATH": "/srv/g.tsv"}
        config = load_config(project, env=env)
        assert config.resolved_corpus_dir() == Path("/srv/corpus")
        assert config.resolved_graph_path() == Path("/srv/g.tsv")


def test_provider_key():
    """Test that credentials come from DECKFORGE_<PROVIDER>_KEY."""
    env = {"DECKFORGE_GIPHY_KEY": "abc", "DECKFORGE_WIKI_HOW_KEY": ""}
    assert get_provider_key("giphy", env) == "abc"
    assert get_provider_key("wiki-how", env) is None
    assert get_provider_key("reddit", env) is None


class TestLogging:
    """Tests for the structured log helpers."""

    def test_sanitize_escapes_newlines(self):
        """Test that injected newlines cannot forge log lines."""
        assert sanitize_log_input("cat\n[SUCCESS] fake") == "cat?[SUCCESS] fake"

    def test_sanitize_truncates(self):
        """Test that long values are cut with an ellipsis."""
        assert sanitize_log_input("x" * 300, max_length=10) == "x" * 10 + "..."

    def test_setup_is_idempotent(self):
        """Test that repeated setup does not stack handlers."""
        logger = setup_logging(logging.INFO, stream=io.StringIO())
        count = len(logger.handlers)
        setup_logging(logging.DEBUG)
        assert len(logger.handlers) == count
        assert logger.level == logging.DEBUG

    def test_success_line(self, caplog):
        """Test the [SUCCESS] event format with metrics."""
        with caplog.at_level(logging.INFO, logger=LOGGER_NAME):
            log_success("assembly.round", round=1, regenerated=[2, 5])
        assert "[SUCCESS] assembly.round - round=1, regenerated=[2, 5]" in caplog.text

    def test_error_line(self, caplog):
        """Test that errors carry the exception type, context and details."""
        with caplog.at_level(logging.ERROR, logger=LOGGER_NAME):
            log_error("cli.export", ValueError("disk full"), output="deck.pptx")
        assert "[ERROR] cli.export - Exception: ValueError - output=deck.pptx" in caplog.text
        assert "Details: disk full" in caplog.text
