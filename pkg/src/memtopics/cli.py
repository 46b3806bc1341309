"""Command-line entry point.

Subcommands:

    run            full pipeline over one archive, artifacts to a directory
    compare        pair the components of two finished runs rank by rank
    sweep-k        fit the component model over a grid of k values
    bot-threshold  cluster bot scores and print the human/bot cutoff
    synth          write a deterministic synthetic bilingual archive

The output directory resolves with this precedence: --output-dir flag,
MEMTOPICS_OUTPUT_DIR environment variable, output_dir in the config file.

Exit codes: 0 success, 1 configuration or usage error, 2 data error,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, ConvergenceError, DataError, MemtopicsError
from .pipeline import (
    DEFAULT_K_GRID,
    PipelineConfig,
    apply_overrides,
    bot_threshold_report,
    compare_runs,
    load_config,
    run_pipeline,
    sweep_k,
)
from .synth import generate_corpus

OUTPUT_DIR_ENV = "MEMTOPICS_OUTPUT_DIR"

EXIT_CODES = {
    ConfigError: 1,
    DataError: 2,
    ConvergenceError: 3,
}


class _Parser(argparse.ArgumentParser):
    """argparse normally exits with status 2; route usage problems to code 1."""

    def error(self, message):
        raise ConfigError(message)


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--input", help="newline-delimited tweet archive")
    parser.add_argument("--lang", dest="language", help="two-letter language code")
    parser.add_argument("--output-dir", dest="output_dir", help="artifact directory")
    parser.add_argument("--keywords-file", dest="keywords_file",
                        help="file of keywords, one per line; tweets must match one")
    parser.add_argument("--on-malformed", dest="on_malformed",
                        choices=("skip", "abort"), default=None,
                        help="what to do with malformed archive lines")
    parser.add_argument("--bot-scores", dest="bot_scores",
                        help="tab-separated user_id/score sidecar")
    parser.add_argument("--bot-k", dest="bot_k", type=int,
                        help="number of score clusters (the cutoff rule needs 5)")
    parser.add_argument("--dedup-scores", dest="dedup_scores",
                        action="store_const", const=True, default=None,
                        help="cluster distinct score values instead of one per user")
    parser.add_argument("--top-users", dest="top_users", type=int,
                        help="keep only this many most-active users")
    parser.add_argument("--stopwords", help="replacement stopword list")
    parser.add_argument("--conversions", help="replacement conversion table")
    parser.add_argument("--lemmas", help="replacement lemma table")
    parser.add_argument("--top-n", dest="top_n", type=int,
                        help="vocabulary size (most frequent terms)")
    parser.add_argument("--min-terms", dest="min_terms", type=int,
                        help="minimum distinct vocabulary terms per kept document")
    parser.add_argument("--k", type=int, help="number of components")
    parser.add_argument("--loading-threshold", dest="loading_threshold", type=float,
                        help="minimum |loading| for a term to appear in a component")
    parser.add_argument("--top-docs", dest="top_docs", type=int,
                        help="representative documents listed per component")
    parser.add_argument("--gazetteer", help="replacement alias-to-country table")
    parser.add_argument("--geo-top-n", dest="geo_top_n", type=int,
                        help="countries listed before the overflow row")
    parser.add_argument("--tol", type=float, help="rotation convergence tolerance")
    parser.add_argument("--max-iter", dest="max_iter", type=int,
                        help="rotation sweep budget")


_CONFIG_FIELDS = (
    "input",
    "language",
    "output_dir",
    "keywords_file",
    "on_malformed",
    "bot_scores",
    "bot_k",
    "dedup_scores",
    "top_users",
    "stopwords",
    "conversions",
    "lemmas",
    "top_n",
    "min_terms",
    "k",
    "loading_threshold",
    "top_docs",
    "gazetteer",
    "geo_top_n",
    "tol",
    "max_iter",
)


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    overrides = {name: getattr(args, name) for name in _CONFIG_FIELDS}
    if overrides.get("output_dir") is None:
        overrides["output_dir"] = os.environ.get(OUTPUT_DIR_ENV)
    return apply_overrides(config, overrides)


def _parse_grid(raw: str) -> list[int]:
    grid: list[int] = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            grid.append(int(piece))
        except ValueError:
            raise ConfigError(f"--k-sweep expects comma-separated integers, got {piece!r}")
    if not grid:
        raise ConfigError("--k-sweep produced an empty grid")
    return grid


def build_parser() -> _Parser:
    parser = _Parser(prog="memtopics", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = commands.add_parser("run", help="run the full pipeline")
    _add_pipeline_flags(run)

    compare = commands.add_parser(
        "compare", help="pair components of two runs"
    )
    compare.add_argument("run_a", help="first run directory")
    compare.add_argument("run_b", help="second run directory")
    compare.add_argument("--output-dir", dest="output_dir",
                         help="where to write comparison.csv and comparison.txt")

    sweep = commands.add_parser(
        "sweep-k", help="fit the model over a grid of k"
    )
    _add_pipeline_flags(sweep)
    sweep.add_argument("--k-sweep", dest="k_sweep",
                       default=",".join(str(k) for k in DEFAULT_K_GRID),
                       help="comma-separated component counts")

    threshold = commands.add_parser(
        "bot-threshold", help="cluster bot scores and print the cutoff",
    )
    threshold.add_argument("--input", required=True)
    threshold.add_argument("--lang", dest="language", required=True)
    threshold.add_argument("--bot-scores", dest="bot_scores")
    threshold.add_argument("--bot-k", dest="bot_k", type=int, default=5)
    threshold.add_argument("--on-malformed", dest="on_malformed",
                           choices=("skip", "abort"), default="skip")

    synth = commands.add_parser(
        "synth", help="write a synthetic bilingual archive"
    )
    synth.add_argument("--output", required=True, help="archive path to write")
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--humans", type=int, default=60)
    synth.add_argument("--docs-per-human", dest="docs_per_human", type=int, default=50)
    synth.add_argument("--bots", type=int, default=5)
    synth.add_argument("--docs-per-bot", dest="docs_per_bot", type=int, default=80)
    synth.add_argument("--casual", type=int, default=20)
    synth.add_argument("--retweets", type=int, default=300)

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = _build_config(args)
    result = run_pipeline(config)
    for stage in result.stages:
        print(f"{stage.label}: tweets={stage.tweets} users={stage.users}")
    if result.threshold is not None:
        print(f"bot_threshold: {result.threshold.value:.4f}")
    print(f"components: {result.model.k}  fit: {result.model.fit:.4f}")
    print(f"artifacts: {result.output_dir}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    output_dir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV)
    _, text = compare_runs(args.run_a, args.run_b, output_dir=output_dir)
    sys.stdout.write(text)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _build_config(args)
    rows = sweep_k(config, _parse_grid(args.k_sweep))
    for row in rows:
        if row.fit is None:
            print(f"k={row.k}: {row.status}")
        else:
            print(
                f"k={row.k}: fit={row.fit:.4f} "
                f"variance_share={row.variance_share:.1f} "
                f"iterations={row.iterations} ({row.status})"
            )
    print(f"artifacts: {config.output_dir}")
    return 0


def _cmd_bot_threshold(args: argparse.Namespace) -> int:
    text = bot_threshold_report(
        args.input,
        args.language,
        bot_scores=args.bot_scores,
        bot_k=args.bot_k,
        on_malformed=args.on_malformed,
    )
    sys.stdout.write(text)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    summary = generate_corpus(
        args.output,
        seed=args.seed,
        humans=args.humans,
        docs_per_human=args.docs_per_human,
        bots=args.bots,
        docs_per_bot=args.docs_per_bot,
        casual=args.casual,
        retweets=args.retweets,
    )
    for language, info in summary["languages"].items():
        print(
            f"{language}: records={info['records']} "
            f"human_docs={info['human_docs']} retweets={info['retweets']} "
            f"bot_threshold={info['bot_threshold']:.4f}"
        )
    print(f"archive: {args.output}")
    return 0


_DISPATCH = {
    "run": _cmd_run,
    "compare": _cmd_compare,
    "sweep-k": _cmd_sweep,
    "bot-threshold": _cmd_bot_threshold,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except MemtopicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for kind, code in EXIT_CODES.items():
            if isinstance(exc, kind):
                return code
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
