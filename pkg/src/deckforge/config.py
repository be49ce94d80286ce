"""Configuration management for Deckforge."""

import os
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

import yaml
from dotenv import load_dotenv

DEFAULT_CONCEPTNET_URL = "https://api.conceptnet.io"
DEFAULT_SCHEMA_NAME = "improvised_ted_talk"


def get_data_dir() -> Path:
    """Get the bundled data directory (schemas, grammars, graph, corpora)."""
    return Path(str(resources.files("deckforge") / "data"))


def get_project_path() -> Path:
    """Get the current project path from environment or cwd."""
    return Path(os.environ.get("DECKFORGE_PROJECT_DIR", os.getcwd()))


def get_global_config_dir() -> Path:
    """Get the global ~/.deckforge directory."""
    return Path.home() / ".deckforge"


def get_provider_key(provider: str, env: Optional[Mapping[str, str]] = None) -> Optional[str]:
    """Read an online provider credential from DECKFORGE_<PROVIDER>_KEY."""
    env_name = f"DECKFORGE_{provider.upper().replace('-', '_')}_KEY"
    return (os.environ if env is None else env).get(env_name) or None


def bundled_schema_path(name: str = DEFAULT_SCHEMA_NAME) -> Path:
    return get_data_dir() / "schemas" / f"{name}.json"


@dataclass
class DeckforgeConfig:
    """Configuration settings for Deckforge."""

    # Bundled assets (None = package data)
    corpus_dir: Optional[Path] = None
    graph_path: Optional[Path] = None
    grammar_dir: Optional[Path] = None
    schema_path: Optional[Path] = None
    cache_dir: Path = Path("cache")

    # Generation
    slides: Optional[int] = None  # None = schema deck_length_default
    parallelism: int = os.cpu_count() or 1
    max_rounds: int = 10
    presenter: Optional[str] = None

    # Content sources
    offline: bool = True
    random_fallback_probability: float = 0.0
    quality_quantile: float = 0.5

    # Online adapters
    conceptnet_url: str = DEFAULT_CONCEPTNET_URL
    http_timeout: float = 10.0

    def resolved_corpus_dir(self) -> Path:
        return Path(self.corpus_dir) if self.corpus_dir else get_data_dir() / "corpus"

    def resolved_graph_path(self) -> Path:
        if self.graph_path:
            return Path(self.graph_path)
        return get_data_dir() / "graph" / "semantic.tsv"

    def resolved_grammar_dir(self) -> Path:
        return Path(self.grammar_dir) if self.grammar_dir else get_data_dir() / "grammars"

    def resolved_schema_path(self) -> Path:
        return Path(self.schema_path) if self.schema_path else bundled_schema_path()


_PATH_FIELDS = {"corpus_dir", "graph_path", "grammar_dir", "schema_path", "cache_dir"}

_ENV_OVERRIDES = {
    "DECKFORGE_CORPUS_DIR": "corpus_dir",
    "DECKFORGE_GRAPH_PATH": "graph_path",
    "DECKFORGE_GRAMMAR_DIR": "grammar_dir",
    "DECKFORGE_SCHEMA_PATH": "schema_path",
    "DECKFORGE_CACHE_DIR": "cache_dir",
    "DECKFORGE_CONCEPTNET_URL": "conceptnet_url",
    "DECKFORGE_PRESENTER": "presenter",
}


def load_config(
    project_path: Optional[Path] = None, env: Optional[Mapping[str, str]] = None
) -> DeckforgeConfig:
    """Load configuration from global and project config files and the environment.

    Priority: environment > project config > global config > defaults

    Args:
        project_path: Project directory holding `.deckforge/config.yaml` and `.env`
        env: Environment mapping (defaults to os.environ)
    """
    config = DeckforgeConfig()

    if project_path is None:
        project_path = get_project_path()

    load_dotenv(project_path / ".env")

    for config_path in (
        get_global_config_dir() / "config.yaml",
        project_path / ".deckforge" / "config.yaml",
    ):
        if config_path.exists():
            try:
                with open(config_path, "r", encoding="utf-8") as f:
                    _apply_config(config, yaml.safe_load(f) or {})
            except (OSError, yaml.YAMLError):
                pass

    if env is None:
        env = os.environ
    _apply_config(
        config,
        {key: env[name] for name, key in _ENV_OVERRIDES.items() if env.get(name)},
    )
    return config


def _apply_config(config: DeckforgeConfig, data: dict) -> None:
    """Apply configuration data to config object."""
    known = {f.name for f in fields(config)}
    for key, value in data.items():
        if key in known and value is not None:
            if key in _PATH_FIELDS:
                value = Path(value).expanduser()
            setattr(config, key, value)
