"""End-to-end corpus runs: config, stage wiring, and artifact emission.

A run reads one newline-delimited tweet archive, reduces it in the fixed
stage order (keyword match, retweet removal, most-active-user cut, bot
removal), builds the document-term matrix, fits the rotated component
model, and writes every artifact into one output directory:

    run_report.txt        stage counts plus summary diagnostics
    dtm.csv, dtm.bin      binary document-term matrix (text and sidecar)
    loadings.csv          per-term component loadings
    factor_metadata.json  eigenvalues, variance shares, fit, convergence
    components.csv        one row per component: id, variance share, terms
    components.json       full component detail including scored documents
    geo.csv               resolved-country shares for the final user set

While a run is writing, an INCOMPLETE marker file sits in the output
directory; it is removed only after the last artifact lands, so a
directory containing the marker must never be trusted or compared.
Given identical inputs and configuration, two runs produce byte-identical
artifacts.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .botfilter import BotThreshold, ckmeans_1d, derive_bot_threshold, filter_bots
from .corpus import (
    Corpus,
    ParseReport,
    drop_retweets,
    filter_keywords,
    load_bot_scores,
    load_keywords,
    parse_archive,
    rank_users_by_activity,
    select_users,
    with_bot_scores,
)
from .dtm import DocTermMatrix, build_matrix, build_vocab, write_matrix_csv, write_matrix_sidecar
from .errors import ConfigError, ConvergenceError, DataError
from .factor import (
    FactorModel,
    correlation_matrix,
    fit_factor_model,
    write_factor_metadata,
    write_loadings_csv,
)
from .geoloc import GeoTable, default_gazetteer, load_gazetteer, location_table, write_geo_csv
from .textprep import build_lexicon, prepare_documents
from .themes import (
    ComponentReport,
    build_reports,
    comparison_table,
    component_prefix,
    render_comparison_text,
    write_comparison_csv,
    write_comparison_text,
    write_components_csv,
    write_components_json,
)

INCOMPLETE_MARKER = "INCOMPLETE"

STAGE_TOTAL = "Total"
STAGE_NO_RETWEETS = "Without retweets"
STAGE_MOST_ACTIVE = "Most active users"
STAGE_HUMANS = "Humans"

DEFAULT_K_GRID = (5, 8, 11, 30, 100)


@dataclass
class PipelineConfig:
    """Every knob a run accepts; file values lose to explicit overrides."""

    input: str | None = None
    language: str | None = None
    output_dir: str | None = None
    keywords_file: str | None = None
    on_malformed: str = "skip"
    bot_scores: str | None = None
    bot_k: int = 5
    dedup_scores: bool = False
    top_users: int | None = None
    stopwords: str | None = None
    conversions: str | None = None
    lemmas: str | None = None
    top_n: int = 300
    min_terms: int = 1
    k: int = 11
    loading_threshold: float = 0.1
    top_docs: int = 30
    tol: float = 1e-10
    max_iter: int = 1000
    gazetteer: str | None = None
    geo_top_n: int = 10


_OPTIONAL_STR = {
    "input",
    "language",
    "output_dir",
    "keywords_file",
    "bot_scores",
    "stopwords",
    "conversions",
    "lemmas",
    "gazetteer",
}
_INT_FIELDS = {"bot_k", "top_n", "min_terms", "k", "top_docs", "max_iter", "geo_top_n"}
_OPTIONAL_INT = {"top_users"}
_FLOAT_FIELDS = {"loading_threshold", "tol"}
_BOOL_FIELDS = {"dedup_scores"}


def _parse_value(key: str, raw: str):
    value = raw.strip()
    if key in _OPTIONAL_STR or key == "on_malformed":
        return value
    if key in _INT_FIELDS or key in _OPTIONAL_INT:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"config key {key!r} expects an integer, got {value!r}")
    if key in _FLOAT_FIELDS:
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"config key {key!r} expects a number, got {value!r}")
    if key in _BOOL_FIELDS:
        lowered = value.lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ConfigError(f"config key {key!r} expects true or false, got {value!r}")
    raise ConfigError(f"unknown config key {key!r}")


def load_config(path) -> PipelineConfig:
    """Parse a ``key = value`` config file; blank lines and # comments skipped."""
    known = {field.name for field in dataclasses.fields(PipelineConfig)}
    values: dict = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in known:
            raise ConfigError(f"{path}:{line_no}: unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    return PipelineConfig(**values)


def apply_overrides(config: PipelineConfig, overrides: dict) -> PipelineConfig:
    """Return a copy with every non-None override applied."""
    known = {field.name for field in dataclasses.fields(PipelineConfig)}
    updates = {}
    for key, value in overrides.items():
        if key not in known:
            raise ConfigError(f"unknown config field {key!r}")
        if value is not None:
            updates[key] = value
    return dataclasses.replace(config, **updates)


def validate_config(config: PipelineConfig) -> None:
    problems: list[str] = []
    if not config.input:
        problems.append("input is required")
    if not config.language:
        problems.append("language is required")
    elif not (len(config.language) == 2 and config.language.isalpha()):
        problems.append(f"language must be a two-letter code, got {config.language!r}")
    if not config.output_dir:
        problems.append("output_dir is required")
    if config.on_malformed not in ("skip", "abort"):
        problems.append(f"on_malformed must be 'skip' or 'abort', got {config.on_malformed!r}")
    if config.bot_k != 5:
        problems.append("bot_k must be 5: the human/bot cutoff is defined on the 5-cluster layout")
    for name in ("top_n", "k", "top_docs", "max_iter", "geo_top_n"):
        if getattr(config, name) < 1:
            problems.append(f"{name} must be at least 1")
    if config.min_terms < 0:
        problems.append("min_terms must not be negative")
    if config.top_users is not None and config.top_users < 1:
        problems.append("top_users must be at least 1 when set")
    if config.loading_threshold < 0:
        problems.append("loading_threshold must not be negative")
    if not config.tol > 0:
        problems.append("tol must be positive")
    if problems:
        raise ConfigError("; ".join(problems))


@dataclass
class StageCount:
    label: str
    tweets: int
    users: int


@dataclass
class RunResult:
    output_dir: Path
    stages: tuple[StageCount, ...]
    parse_report: ParseReport
    threshold: BotThreshold | None
    matrix: DocTermMatrix
    model: FactorModel
    reports: tuple[ComponentReport, ...]
    geo: GeoTable


def _stage(label: str, corpus: Corpus) -> StageCount:
    return StageCount(label, tweets=len(corpus.tweets), users=len(corpus.users))


def _reduce_corpus(
    config: PipelineConfig,
) -> tuple[Corpus, ParseReport, tuple[StageCount, ...], BotThreshold | None]:
    corpus, parse_report = parse_archive(
        config.input, config.language, on_malformed=config.on_malformed
    )
    if config.keywords_file:
        corpus = filter_keywords(corpus, load_keywords(config.keywords_file))
    stages = [_stage(STAGE_TOTAL, corpus)]

    corpus = drop_retweets(corpus)
    stages.append(_stage(STAGE_NO_RETWEETS, corpus))

    if config.top_users is not None:
        ranked = rank_users_by_activity(corpus, config.top_users)
        corpus = select_users(corpus, [profile.user_id for profile in ranked])
    stages.append(_stage(STAGE_MOST_ACTIVE, corpus))

    if config.bot_scores:
        corpus = with_bot_scores(corpus, load_bot_scores(config.bot_scores))
    scores = [
        profile.bot_score
        for profile in corpus.users.values()
        if profile.bot_score is not None
    ]
    if config.dedup_scores:
        scores = sorted(set(scores))
    threshold: BotThreshold | None = None
    if scores:
        if len(scores) < config.bot_k:
            raise DataError(
                f"need at least {config.bot_k} bot scores to cluster, found {len(scores)}"
            )
        threshold = derive_bot_threshold(ckmeans_1d(scores, config.bot_k))
        corpus = filter_bots(corpus, threshold)
    stages.append(_stage(STAGE_HUMANS, corpus))
    return corpus, parse_report, tuple(stages), threshold


def _write_run_report(
    path: Path,
    stages: Sequence[StageCount],
    parse_report: ParseReport,
    threshold: BotThreshold | None,
    matrix: DocTermMatrix,
    model: FactorModel,
) -> None:
    lines = [f"{s.label}: tweets={s.tweets} users={s.users}" for s in stages]
    lines.append(f"malformed_lines: {parse_report.malformed_count}")
    lines.append(f"documents_in_matrix: {matrix.shape[0]}")
    lines.append(f"documents_dropped_sparse: {matrix.dropped_docs}")
    lines.append(f"vocabulary_terms: {matrix.shape[1]}")
    lines.append(f"components: {model.k}")
    if threshold is None:
        lines.append("bot_threshold: none")
    else:
        lines.append(f"bot_threshold: {threshold.value:.4f}")
    lines.append(f"factor_fit: {model.fit:.4f}")
    lines.append(f"variance_share_pct: {model.variance_share:.1f}")
    lines.append(f"converged: {'true' if model.converged else 'false'}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_pipeline(config: PipelineConfig) -> RunResult:
    """Execute every stage and write all artifacts; see the module docstring."""
    validate_config(config)
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    marker = output_dir / INCOMPLETE_MARKER
    marker.write_text("run did not finish; artifacts may be partial\n", encoding="utf-8")

    corpus, parse_report, stages, threshold = _reduce_corpus(config)

    lexicon = build_lexicon(
        config.language,
        stopwords_path=config.stopwords,
        conversions_path=config.conversions,
        lemmas_path=config.lemmas,
    )
    docs = prepare_documents(corpus, lexicon)
    vocab = build_vocab(docs, top_n=config.top_n)
    matrix = build_matrix(docs, vocab, min_terms=config.min_terms)

    corr = correlation_matrix(matrix)
    model = fit_factor_model(
        corr, config.k, tol=config.tol, max_iter=config.max_iter
    )
    if not model.converged:
        raise ConvergenceError(
            f"rotation did not converge within {config.max_iter} sweeps"
        )

    prefix = component_prefix(config.language)
    texts = {tweet.id: tweet.text for tweet in corpus.tweets}
    reports = build_reports(
        matrix,
        model,
        texts,
        prefix,
        threshold=config.loading_threshold,
        top_k=config.top_docs,
    )

    gazetteer = (
        load_gazetteer(config.gazetteer) if config.gazetteer else default_gazetteer()
    )
    geo = location_table(corpus, gazetteer, top_n=config.geo_top_n)

    labels = [f"{prefix}{j + 1}" for j in range(model.k)]
    _write_run_report(
        output_dir / "run_report.txt", stages, parse_report, threshold, matrix, model
    )
    write_matrix_csv(matrix, output_dir / "dtm.csv")
    write_matrix_sidecar(matrix, output_dir / "dtm.bin")
    write_loadings_csv(model, matrix.vocabulary.terms, labels, output_dir / "loadings.csv")
    write_factor_metadata(model, output_dir / "factor_metadata.json")
    write_components_csv(reports, output_dir / "components.csv")
    write_components_json(
        reports,
        output_dir / "components.json",
        language=config.language,
        prefix=prefix,
    )
    write_geo_csv(geo, output_dir / "geo.csv")

    marker.unlink()
    return RunResult(
        output_dir=output_dir,
        stages=stages,
        parse_report=parse_report,
        threshold=threshold,
        matrix=matrix,
        model=model,
        reports=reports,
        geo=geo,
    )


def _load_components(run_dir) -> tuple[list[ComponentReport], str]:
    directory = Path(run_dir)
    if not directory.is_dir():
        raise DataError(f"run directory {directory} does not exist")
    if (directory / INCOMPLETE_MARKER).exists():
        raise DataError(
            f"run directory {directory} is incomplete ({INCOMPLETE_MARKER} marker present)"
        )
    artifact = directory / "components.json"
    if not artifact.exists():
        raise DataError(f"missing artifact: {artifact}")
    try:
        payload = json.loads(artifact.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"artifact {artifact} is not valid JSON: {exc}")
    try:
        reports = [
            ComponentReport(
                component_id=item["id"],
                pe=float(item["pe"]),
                terms=tuple((term, float(value)) for term, value in item["terms"]),
                negative_terms=tuple(
                    (term, float(value)) for term, value in item["negative_terms"]
                ),
                top_docs=tuple(
                    (doc_id, float(score), text)
                    for doc_id, score, text in item["top_docs"]
                ),
            )
            for item in payload["components"]
        ]
        language = payload["language"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"artifact {artifact} has unexpected shape: {exc}")
    return reports, language


def compare_runs(run_a, run_b, output_dir=None):
    """Pair two finished runs' components by variance-share rank.

    Returns (rows, rendered_text). When output_dir is given, also writes
    comparison.csv and comparison.txt there.
    """
    left, _ = _load_components(run_a)
    right, _ = _load_components(run_b)
    rows = comparison_table(left, right)
    text = render_comparison_text(rows)
    if output_dir is not None:
        directory = Path(output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        write_comparison_csv(rows, directory / "comparison.csv")
        write_comparison_text(rows, directory / "comparison.txt")
    return rows, text


@dataclass
class SweepRow:
    k: int
    fit: float | None
    variance_share: float | None
    iterations: int | None
    converged: bool | None
    status: str


def sweep_k(config: PipelineConfig, ks: Iterable[int] = DEFAULT_K_GRID) -> list[SweepRow]:
    """Fit the component model over a grid of k on one prepared corpus."""
    grid = list(ks)
    if not grid:
        raise ConfigError("k grid must not be empty")
    for k in grid:
        if k < 1:
            raise ConfigError(f"k grid values must be at least 1, got {k}")
    validate_config(config)

    corpus, _, _, _ = _reduce_corpus(config)
    lexicon = build_lexicon(
        config.language,
        stopwords_path=config.stopwords,
        conversions_path=config.conversions,
        lemmas_path=config.lemmas,
    )
    docs = prepare_documents(corpus, lexicon)
    vocab = build_vocab(docs, top_n=config.top_n)
    matrix = build_matrix(docs, vocab, min_terms=config.min_terms)
    corr = correlation_matrix(matrix)
    dim = corr.shape[0]

    rows: list[SweepRow] = []
    for k in grid:
        if k > dim:
            rows.append(
                SweepRow(k, None, None, None, None, f"skipped: k exceeds {dim} terms")
            )
            continue
        model = fit_factor_model(corr, k, tol=config.tol, max_iter=config.max_iter)
        status = "ok" if model.converged else "not converged"
        rows.append(
            SweepRow(
                k,
                model.fit,
                model.variance_share,
                model.iterations,
                model.converged,
                status,
            )
        )

    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    lines = ["k,fit,variance_share_pct,iterations,converged,status"]
    for row in rows:
        fit = "" if row.fit is None else f"{row.fit:.4f}"
        share = "" if row.variance_share is None else f"{row.variance_share:.1f}"
        iters = "" if row.iterations is None else str(row.iterations)
        conv = "" if row.converged is None else ("true" if row.converged else "false")
        lines.append(f"{row.k},{fit},{share},{iters},{conv},{row.status}")
    (output_dir / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return rows


def bot_threshold_report(
    input_path,
    language: str,
    *,
    bot_scores=None,
    bot_k: int = 5,
    on_malformed: str = "skip",
) -> str:
    """Cluster the archive's bot scores and describe the resulting layout."""
    if bot_k < 1:
        raise ConfigError(f"bot_k must be at least 1, got {bot_k}")
    corpus, _ = parse_archive(input_path, language, on_malformed=on_malformed)
    if bot_scores:
        corpus = with_bot_scores(corpus, load_bot_scores(bot_scores))
    scores = sorted(
        profile.bot_score
        for profile in corpus.users.values()
        if profile.bot_score is not None
    )
    if len(scores) < bot_k:
        raise DataError(f"need at least {bot_k} bot scores to cluster, found {len(scores)}")
    result = ckmeans_1d(scores, bot_k)
    lines = [f"scores: {len(scores)}"]
    for cluster in range(1, bot_k + 1):
        values = result.cluster_values(cluster)
        lines.append(
            f"cluster {cluster}: n={len(values)} "
            f"min={min(values):.4f} max={max(values):.4f} "
            f"center={result.centers[cluster - 1]:.4f}"
        )
    if bot_k == 5:
        threshold = derive_bot_threshold(result)
        lines.append(f"threshold: {threshold.value:.4f}")
        lines.append("rule: scores above the threshold are bots")
    else:
        lines.append("threshold: undefined (the cutoff rule needs exactly 5 clusters)")
    return "\n".join(lines) + "\n"
