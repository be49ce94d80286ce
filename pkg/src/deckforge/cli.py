"""Command-line entry points: `deckforge` and `deckforge-bench`."""

import argparse
import logging
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from .assembly import AssemblyConfig, assemble
from .config import DeckforgeConfig, load_config
from .content.online import make_client
from .errors import (
    AssemblyExhaustedError,
    ContentIOError,
    DeckforgeError,
    ExportError,
    GrammarError,
    SchemaError,
    SlideGenerationError,
)
from .export import ExportOptions, MediaResolver, export_html, export_pptx
from .logging_config import log_error, setup_logging
from .models.deck import Deck, Topic
from .models.schema import PresentationSchema, load_schema
from .services import Services, build_services
from .utils.ids import derive_seed, random_master_seed
from .utils.timestamps import format_duration

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_ASSEMBLY = 4
EXIT_EXPORT = 5

DEFAULT_BENCH_THRESHOLD = 2.5
_UNSAFE_FILENAME = re.compile(r"[^\w.-]+")


def _say(message: str, stream=None) -> None:
    print(f"[Deckforge] {message}", file=stream or sys.stdout)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deckforge",
        description="Generate a slide deck from one audience-suggested topic",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  deckforge cat                          7-slide pptx about cats in ./cat.pptx
  deckforge cat --seed 42 --format json  Reproducible manifest
  deckforge rug --online --presenter Ada Fetch content from online sources
        """,
    )
    parser.add_argument("topic", help="Topic word suggested by the audience")
    parser.add_argument(
        "--slides", "-n", type=int, help="Number of slides (default: schema length)"
    )
    parser.add_argument("--schema", type=Path, help="Presentation schema JSON file")
    parser.add_argument(
        "--output", "-o", type=Path, help="Output path (default: ./<topic>.<format>)"
    )
    parser.add_argument("--format", choices=("pptx", "html", "json"), default="pptx")
    parser.add_argument("--seed", type=int, help="64-bit master seed (default: random, printed)")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--offline", dest="online", action="store_false", default=None)
    mode.add_argument(
        "--online", dest="online", action="store_true", default=None, help="Use online adapters"
    )
    parser.add_argument("--corpus-dir", type=Path, help="Corpus directory")
    parser.add_argument("--parallelism", type=int, help="Worker count (default: CPU count)")
    parser.add_argument("--max-rounds", type=int, help="Repair rounds before fallback")
    parser.add_argument("--presenter", help="Presenter name for the title slide")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging to stderr")
    return parser


def _parse(parser: argparse.ArgumentParser, argv: Optional[Sequence[str]]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    for name in ("slides", "parallelism", "max_rounds"):
        value = getattr(args, name)
        if value is not None and value < 1:
            parser.error(f"--{name.replace('_', '-')} must be at least 1")
    if args.seed is not None and not 0 <= args.seed < 1 << 64:
        parser.error("--seed must be a 64-bit unsigned integer")
    try:
        args.topic = Topic(word=args.topic).word
    except ValidationError:
        parser.error("topic must be a single non-empty line")
    return args


def _apply_args(config: DeckforgeConfig, args: argparse.Namespace) -> DeckforgeConfig:
    if args.slides is not None:
        config.slides = args.slides
    if args.corpus_dir is not None:
        config.corpus_dir = args.corpus_dir
    if args.schema is not None:
        config.schema_path = args.schema
    if args.online is not None:
        config.offline = not args.online
    if args.parallelism is not None:
        config.parallelism = args.parallelism
    if args.max_rounds is not None:
        config.max_rounds = args.max_rounds
    if args.presenter:
        config.presenter = args.presenter
    return config


def default_output(topic: str, fmt: str) -> Path:
    """`./<topic>.<fmt>` with path separators and other unsafe characters replaced."""
    stem = _UNSAFE_FILENAME.sub("_", topic).strip("._") or "deck"
    return Path(f"./{stem}.{fmt}")


def export_deck(deck: Deck, fmt: str, output: Path, resolver: MediaResolver) -> Path:
    if fmt == "json":
        try:
            output.parent.mkdir(parents=True, exist_ok=True)
            output.write_bytes(deck.to_manifest())
        except OSError as e:
            raise ExportError(f"cannot write {output}: {e}") from e
        return output
    if fmt == "html":
        return export_html(deck, output, resolver)
    return export_pptx(deck, output, ExportOptions(), resolver)


def run(argv: Optional[Sequence[str]] = None, env: Optional[Mapping[str, str]] = None) -> int:
    """Generate one deck and export it; returns the process exit code."""
    parser = build_parser()
    try:
        args = _parse(parser, argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    setup_logging(logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    config = _apply_args(load_config(env=env), args)
    seed = args.seed if args.seed is not None else random_master_seed()
    online = not config.offline

    try:
        schema = load_schema(config.resolved_schema_path())
        client = make_client(config.http_timeout) if online else None
        services = build_services(config, online=online, client=client, env=env)
    except (SchemaError, GrammarError, ContentIOError, OSError) as e:
        log_error("cli.config", e)
        _say(f"Error: {e}", sys.stderr)
        return EXIT_CONFIG

    assembly = AssemblyConfig(
        n_slides=config.slides or schema.deck_length_default,
        parallelism=config.parallelism,
        max_rounds=config.max_rounds,
        master_rng_seed=seed,
    )
    _say(f"Topic: {args.topic}")
    _say(f"Seed: {seed}")

    started = time.perf_counter()
    try:
        deck, reports = assemble(args.topic, schema, services, assembly)
    except SchemaError as e:
        _say(f"Error: {e}", sys.stderr)
        return EXIT_CONFIG
    except (AssemblyExhaustedError, SlideGenerationError, DeckforgeError) as e:
        log_error("cli.assemble", e, topic=args.topic, seed=seed)
        _say(f"Error: {e}", sys.stderr)
        return EXIT_ASSEMBLY
    elapsed_ms = (time.perf_counter() - started) * 1000

    output = args.output or default_output(args.topic, args.format)
    resolver = MediaResolver(services.corpus_dir, config.cache_dir, client)
    try:
        export_deck(deck, args.format, output, resolver)
    except (ExportError, OSError) as e:
        log_error("cli.export", e, output=str(output))
        _say(f"Error: {e}", sys.stderr)
        return EXIT_EXPORT
    except Exception as e:
        # Library errors on media python-pptx cannot read
        log_error("cli.export", e, output=str(output))
        _say(f"Error: export failed: {type(e).__name__}: {e}", sys.stderr)
        return EXIT_EXPORT

    _say(f"Rounds: {len(reports)}")
    _say(f"Slides: {len(deck)}")
    _say(f"Elapsed: {format_duration(elapsed_ms)}")
    _say(f"Output: {output}")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


# === Bench ===


@dataclass
class BenchRow:
    topic: str
    run: int
    wall_s: float
    cpu_s: float
    ok: bool = True
    error: str = ""


@dataclass
class BenchReport:
    """Per-deck timings plus summary statistics over the successful decks."""

    rows: list[BenchRow] = field(default_factory=list)
    threshold_s: float = DEFAULT_BENCH_THRESHOLD

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if not r.ok)

    def _times(self, attr: str) -> np.ndarray:
        return np.array([getattr(r, attr) for r in self.rows if r.ok], dtype=float)

    def summary(self, attr: str = "wall_s") -> dict[str, float]:
        times = self._times(attr)
        if times.size == 0:
            return {"median": float("nan"), "p95": float("nan"), "max": float("nan")}
        return {
            "median": float(np.median(times)),
            "p95": float(np.percentile(times, 95)),
            "max": float(times.max()),
        }

    @property
    def fraction_under_threshold(self) -> float:
        times = self._times("wall_s")
        return float(np.mean(times <= self.threshold_s)) if times.size else 0.0

    def lines(self) -> list[str]:
        out = [f"{'topic':<16} {'run':>3} {'wall_s':>8} {'cpu_s':>8}  status"]
        for r in self.rows:
            status = "ok" if r.ok else f"failed: {r.error}"
            out.append(f"{r.topic:<16} {r.run:>3} {r.wall_s:>8.3f} {r.cpu_s:>8.3f}  {status}")
        for attr, label in (("wall_s", "wall"), ("cpu_s", "cpu")):
            s = self.summary(attr)
            out.append(
                f"{label}: median {s['median']:.3f}s  p95 {s['p95']:.3f}s  max {s['max']:.3f}s"
            )
        out.append(
            f"under {self.threshold_s:.2f}s: {self.fraction_under_threshold:.1%}  "
            f"failures: {self.failures}/{len(self.rows)}"
        )
        return out


def read_topics(path: Path | str) -> list[str]:
    """Topic words, one per line.

    Raises:
        ContentIOError: unreadable file
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ContentIOError(f"cannot read topic list {path}: {e}") from e
    words = (line.strip().lower() for line in lines if line.strip() and not line.startswith("#"))
    return list(dict.fromkeys(words))


def bench(
    topic_list_path: Path | str,
    runs: int = 1,
    config: Optional[DeckforgeConfig] = None,
    schema: Optional[PresentationSchema] = None,
    services: Optional[Services] = None,
    slides: int = 7,
    master_seed: int = 0,
    threshold_s: float = DEFAULT_BENCH_THRESHOLD,
) -> BenchReport:
    """Time one deck per topic and run. Failures are recorded, never raised.

    Wall time covers assembly only; services are built once up front.

    Raises:
        ContentIOError: unreadable topic list
    """
    topics = read_topics(topic_list_path)
    config = config or load_config()
    schema = schema or load_schema(config.resolved_schema_path())
    services = services or build_services(config, online=not config.offline)

    report = BenchReport(threshold_s=threshold_s)
    for topic in topics:
        for run_index in range(runs):
            assembly = AssemblyConfig(
                n_slides=slides,
                parallelism=config.parallelism,
                max_rounds=config.max_rounds,
                master_rng_seed=derive_seed(master_seed, topic, run_index),
            )
            wall, cpu = time.perf_counter(), time.process_time()
            try:
                assemble(topic, schema, services, assembly)
                ok, error = True, ""
            except (DeckforgeError, ValidationError) as e:
                ok, error = False, str(e)
                logger.warning(f"Bench deck for {topic!r} failed: {e}")
            report.rows.append(
                BenchRow(
                    topic=topic,
                    run=run_index,
                    wall_s=time.perf_counter() - wall,
                    cpu_s=time.process_time() - cpu,
                    ok=ok,
                    error=error,
                )
            )
    return report


def bench_main(argv: Optional[Sequence[str]] = None) -> None:
    parser = argparse.ArgumentParser(
        prog="deckforge-bench", description="Time offline deck generation over a topic list"
    )
    parser.add_argument("topic_list", type=Path, help="File with one topic per line")
    parser.add_argument("--runs", type=int, default=1)
    parser.add_argument("--slides", type=int, default=7)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threshold", type=float, default=DEFAULT_BENCH_THRESHOLD)
    parser.add_argument("--parallelism", type=int)
    args = parser.parse_args(argv)

    setup_logging(logging.WARNING, stream=sys.stderr)
    config = load_config()
    if args.parallelism:
        config.parallelism = args.parallelism
    try:
        report = bench(
            args.topic_list,
            runs=args.runs,
            config=config,
            slides=args.slides,
            master_seed=args.seed,
            threshold_s=args.threshold,
        )
    except (ContentIOError, SchemaError) as e:
        print(f"[Bench] Error: {e}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)
    for line in report.lines():
        print(f"[Bench] {line}")
    sys.exit(EXIT_OK)
