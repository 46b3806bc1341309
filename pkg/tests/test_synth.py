import json

import pytest

from memtopics.botfilter import ckmeans_1d, derive_bot_threshold, filter_bots
from memtopics.corpus import drop_retweets, parse_archive, rank_users_by_activity, select_users
from memtopics.dtm import build_matrix, build_vocab
from memtopics.factor import correlation_matrix, fit_factor_model
from memtopics.synth import (
    BOT_SCORE_BANDS,
    NOISE_TERMS,
    TOPICS,
    generate_corpus,
    noise_terms,
    topic_terms,
)
from memtopics.textprep import default_lexicon, normalize, prepare_documents, tokenize
from memtopics.themes import build_reports

SMALL = dict(
    humans=6,
    docs_per_human=10,
    bots=2,
    docs_per_bot=15,
    casual=2,
    retweets=8,
)


@pytest.fixture(scope="module")
def small_archive(tmp_path_factory):
    path = tmp_path_factory.mktemp("synth") / "small.jsonl"
    summary = generate_corpus(path, seed=11, **SMALL)
    return path, summary


def test_same_seed_same_bytes(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    generate_corpus(a, seed=11, **SMALL)
    generate_corpus(b, seed=11, **SMALL)
    assert a.read_bytes() == b.read_bytes()


def test_different_seed_differs(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    generate_corpus(a, seed=11, **SMALL)
    generate_corpus(b, seed=12, **SMALL)
    assert a.read_bytes() != b.read_bytes()


def test_record_counts_per_language(small_archive):
    path, summary = small_archive
    for language in ("es", "en"):
        lines = [
            json.loads(line)
            for line in path.read_text(encoding="utf-8").splitlines()
            if json.loads(line)["lang"] == language
        ]
        info = summary["languages"][language]
        assert len(lines) == info["records"]
        retweets = sum(1 for rec in lines if rec["is_retweet"])
        assert retweets == SMALL["retweets"]
        authors = {rec["author_id"] for rec in lines}
        assert len(authors) == SMALL["humans"] + SMALL["bots"] + SMALL["casual"]


def test_every_record_parses(small_archive):
    path, _ = small_archive
    for language in ("es", "en"):
        corpus, report = parse_archive(path, language)
        assert report.malformed_count == 0
        assert len(corpus.tweets) == report.language_matched


def test_topic_sets_are_disjoint():
    for language, blocks in TOPICS.items():
        seen: set[str] = set()
        for block in blocks:
            assert len(block) == 10
            assert not (set(block) & seen)
            seen |= set(block)
        assert not (seen & set(NOISE_TERMS[language]))


@pytest.mark.parametrize("language", ["es", "en"])
def test_planted_terms_are_lexicon_fixed_points(language):
    lexicon = default_lexicon(language)
    for block in topic_terms(language):
        for term in block:
            assert normalize(tokenize(term), lexicon) == [term]
    for term in noise_terms(language):
        assert normalize(tokenize(term), lexicon) == [term]


@pytest.mark.parametrize("language", ["es", "en"])
def test_hashtag_surface_maps_to_term(language):
    lexicon = default_lexicon(language)
    for block in topic_terms(language):
        for term in block:
            assert normalize(tokenize("#" + term), lexicon) == [term]
            assert normalize(tokenize(term.capitalize()), lexicon) == [term]


@pytest.mark.parametrize("language", ["es", "en"])
def test_variant_surfaces_map_to_term(language):
    from memtopics.synth import _VARIANTS

    lexicon = default_lexicon(language)
    for term, variants in _VARIANTS[language].items():
        for variant in variants:
            assert normalize(tokenize(variant), lexicon) == [term]


def test_bot_scores_fall_in_declared_bands(small_archive):
    path, summary = small_archive
    corpus, _ = parse_archive(path, "es")
    scored = {
        uid: profile.bot_score
        for uid, profile in corpus.users.items()
        if profile.bot_score is not None
    }
    assert len(scored) == SMALL["humans"] + SMALL["bots"]
    for uid, score in scored.items():
        assert any(low <= score <= high for low, high in BOT_SCORE_BANDS)
        if "_b" in uid:
            assert score >= BOT_SCORE_BANDS[3][0]
        else:
            assert score <= BOT_SCORE_BANDS[2][1]


def test_clustering_recovers_threshold(small_archive):
    path, summary = small_archive
    for language in ("es", "en"):
        corpus, _ = parse_archive(path, language)
        scores = sorted(
            profile.bot_score
            for profile in corpus.users.values()
            if profile.bot_score is not None
        )
        result = ckmeans_1d(scores, 5)
        threshold = derive_bot_threshold(result)
        assert threshold.value == summary["languages"][language]["bot_threshold"]
        filtered = filter_bots(corpus, threshold)
        remaining = {uid for uid in filtered.users}
        assert not any("_b" in uid for uid in remaining)
        assert sum(1 for uid in remaining if "_h" in uid) == SMALL["humans"]


def test_retweets_flagged_and_droppable(small_archive):
    path, summary = small_archive
    corpus, _ = parse_archive(path, "en")
    trimmed = drop_retweets(corpus)
    assert len(corpus.tweets) - len(trimmed.tweets) == SMALL["retweets"]
    assert all(not tweet.is_retweet for tweet in trimmed.tweets)


def test_locations_mix_resolvable_and_not(small_archive):
    path, _ = small_archive
    corpus, _ = parse_archive(path, "es")
    locations = {tweet.user_location for tweet in corpus.tweets}
    assert any("Argentina" in (loc or "") for loc in locations)
    assert "algún lugar" in locations


def test_invalid_humans_count(tmp_path):
    with pytest.raises(ValueError):
        generate_corpus(tmp_path / "x.jsonl", humans=7)


def test_unknown_language(tmp_path):
    with pytest.raises(ValueError):
        generate_corpus(tmp_path / "x.jsonl", languages=("fr",))


@pytest.mark.parametrize("language", ["es", "en"])
def test_pipeline_recovers_planted_topics(tmp_path, language):
    """Scaled-down end-to-end recovery; the full-size run lives in acceptance."""
    path = tmp_path / "mid.jsonl"
    generate_corpus(
        path,
        seed=5,
        languages=(language,),
        humans=30,
        docs_per_human=40,
        bots=3,
        docs_per_bot=60,
        casual=5,
        retweets=40,
    )
    corpus, _ = parse_archive(path, language)
    corpus = drop_retweets(corpus)
    ranked = rank_users_by_activity(corpus, 33)
    corpus = select_users(corpus, [profile.user_id for profile in ranked])
    scores = [
        p.bot_score for p in corpus.users.values() if p.bot_score is not None
    ]
    threshold = derive_bot_threshold(ckmeans_1d(scores, 5))
    corpus = filter_bots(corpus, threshold)
    assert len(corpus.users) == 30

    lexicon = default_lexicon(language)
    docs = prepare_documents(corpus, lexicon)
    vocab = build_vocab(docs, top_n=300)
    assert set(vocab.terms) <= (
        {t for block in TOPICS[language] for t in block} | set(NOISE_TERMS[language])
    )
    matrix = build_matrix(docs, vocab, min_terms=1)
    corr = correlation_matrix(matrix)
    model = fit_factor_model(corr, 3)
    reports = build_reports(matrix, model, {}, "T")
    planted = {frozenset(block) for block in TOPICS[language]}
    recovered = {
        frozenset(term for term, _ in report.terms[:10]) for report in reports
    }
    assert recovered == planted
    for report in reports:
        assert abs(report.pe - 100.0 / 3.0) < 5.0
