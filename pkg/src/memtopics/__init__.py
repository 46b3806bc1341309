"""Deterministic corpus analytics: corpus cleaning, binary document-term
matrices, principal-component factor analysis with varimax rotation, and
cross-corpus theme reports."""

__version__ = "0.1.0"

from .botfilter import BotThreshold, Ckmeans1D, ckmeans_1d, derive_bot_threshold, filter_bots
from .corpus import (
    Corpus,
    ParseReport,
    TweetRecord,
    UserProfile,
    drop_retweets,
    filter_keywords,
    parse_archive,
    rank_users_by_activity,
    select_users,
)
from .dtm import BinaryTermVectorizer, DocTermMatrix, Vocabulary, build_matrix, build_vocab
from .errors import ConfigError, ConvergenceError, DataError, MemtopicsError
from .factor import (
    FactorModel,
    MeaningExtractor,
    correlation_matrix,
    fit_factor_model,
    varimax,
)
from .geoloc import Gazetteer, default_gazetteer, location_table, resolve_location
from .pipeline import PipelineConfig, compare_runs, run_pipeline, sweep_k
from .synth import generate_corpus
from .textprep import Lexicon, default_lexicon, normalize, prepare_documents, tokenize
from .themes import build_reports, comparison_table

__all__ = [
    "BinaryTermVectorizer",
    "BotThreshold",
    "Ckmeans1D",
    "ConfigError",
    "ConvergenceError",
    "Corpus",
    "DataError",
    "DocTermMatrix",
    "FactorModel",
    "Gazetteer",
    "Lexicon",
    "MeaningExtractor",
    "MemtopicsError",
    "ParseReport",
    "PipelineConfig",
    "TweetRecord",
    "UserProfile",
    "Vocabulary",
    "build_matrix",
    "build_reports",
    "build_vocab",
    "ckmeans_1d",
    "comparison_table",
    "compare_runs",
    "correlation_matrix",
    "default_gazetteer",
    "default_lexicon",
    "derive_bot_threshold",
    "drop_retweets",
    "filter_bots",
    "filter_keywords",
    "fit_factor_model",
    "generate_corpus",
    "location_table",
    "normalize",
    "parse_archive",
    "prepare_documents",
    "rank_users_by_activity",
    "resolve_location",
    "run_pipeline",
    "select_users",
    "sweep_k",
    "tokenize",
    "varimax",
]
