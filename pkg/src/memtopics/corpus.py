"""Tweet-archive ingestion and corpus-level filtering.

The archive format is newline-delimited JSON, one record per line, with the
fields: id, text, lang, author_id, is_retweet, created_at, user_location
(optional), bot_score (optional). Parsing keeps only records matching the
requested language and builds per-user tweet counts as it goes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from .errors import DataError

_REQUIRED_FIELDS = ("id", "text", "lang", "author_id", "is_retweet", "created_at")


@dataclass(frozen=True)
class TweetRecord:
    """One post. ``user_location`` is the raw profile string, unparsed."""

    id: str
    text: str
    language: str
    author_id: str
    is_retweet: bool
    created_at: datetime
    user_location: str | None = None


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    tweet_count: int
    bot_score: float | None = None
    country: str | None = None


@dataclass(frozen=True)
class Corpus:
    """An ordered tweet list plus per-user aggregates for one language.

    Invariants: every tweet's author has a profile in ``users``; each
    profile's tweet_count equals that author's retained tweets; all tweets
    carry the corpus language code.
    """

    language: str
    tweets: tuple[TweetRecord, ...]
    users: dict[str, UserProfile]

    def __len__(self) -> int:
        return len(self.tweets)


@dataclass(frozen=True)
class ParseReport:
    """Line-level accounting from parse_archive."""

    lines_total: int
    records_valid: int
    language_matched: int
    malformed: tuple[tuple[int, str], ...] = ()

    @property
    def malformed_count(self) -> int:
        return len(self.malformed)


def _parse_timestamp(raw: str) -> datetime:
    text = raw.replace("Z", "+00:00") if raw.endswith("Z") else raw
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError:
        raise ValueError(f"bad created_at timestamp {raw!r}") from None
    if stamp.tzinfo is None:
        # Offset-free timestamps are taken as UTC rather than rejected.
        return stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def _parse_record(obj: dict) -> tuple[TweetRecord, float | None]:
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise ValueError(f"missing field {name!r}")
    tweet_id = obj["id"]
    text = obj["text"]
    lang = obj["lang"]
    author = obj["author_id"]
    if not isinstance(tweet_id, str) or not tweet_id:
        raise ValueError("id must be a non-empty string")
    if not isinstance(text, str) or not text:
        raise ValueError("text must be a non-empty string")
    if not isinstance(lang, str) or len(lang) != 2 or not lang.isalpha():
        raise ValueError(f"lang must be a 2-letter code, got {obj['lang']!r}")
    if not isinstance(author, str) or not author:
        raise ValueError("author_id must be a non-empty string")
    if not isinstance(obj["is_retweet"], bool):
        raise ValueError("is_retweet must be a boolean")
    if not isinstance(obj["created_at"], str):
        raise ValueError("created_at must be a string")
    created = _parse_timestamp(obj["created_at"])

    location = obj.get("user_location")
    if location is not None and not isinstance(location, str):
        raise ValueError("user_location must be a string or null")
    if location == "":
        location = None

    score = obj.get("bot_score")
    if score is not None:
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise ValueError("bot_score must be a number or null")
        score = float(score)
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"bot_score {score} outside [0, 1]")

    record = TweetRecord(
        id=tweet_id,
        text=text,
        language=lang.lower(),
        author_id=author,
        is_retweet=obj["is_retweet"],
        created_at=created,
        user_location=location,
    )
    return record, score


def parse_archive(
    path, language: str, *, on_malformed: str = "skip"
) -> tuple[Corpus, ParseReport]:
    """Read a newline-delimited archive, keeping records in ``language``.

    on_malformed selects the bad-line policy: "skip" collects (line, reason)
    pairs in the report, "abort" raises DataError at the first bad line.
    When several records carry a bot_score for the same user, the last
    non-null value wins.
    """
    if on_malformed not in ("skip", "abort"):
        raise ValueError(f"on_malformed must be 'skip' or 'abort', got {on_malformed!r}")
    if not isinstance(language, str) or len(language) != 2 or not language.isalpha():
        raise ValueError(f"language must be a 2-letter code, got {language!r}")
    language = language.lower()

    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read archive {path}: {exc.strerror or exc}") from exc

    tweets: list[TweetRecord] = []
    seen_ids: set[str] = set()
    counts: dict[str, int] = {}
    scores: dict[str, float] = {}
    malformed: list[tuple[int, str]] = []
    records_valid = 0

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record must be an object")
            record, score = _parse_record(obj)
            if record.language == language and record.id in seen_ids:
                raise ValueError(f"duplicate tweet id {record.id!r}")
        except ValueError as exc:
            if on_malformed == "abort":
                raise DataError(f"line {line_no}: {exc}") from None
            malformed.append((line_no, str(exc)))
            continue
        records_valid += 1
        if record.language != language:
            continue
        seen_ids.add(record.id)
        tweets.append(record)
        counts[record.author_id] = counts.get(record.author_id, 0) + 1
        if score is not None:
            scores[record.author_id] = score

    users = {
        uid: UserProfile(user_id=uid, tweet_count=n, bot_score=scores.get(uid))
        for uid, n in counts.items()
    }
    corpus = Corpus(language=language, tweets=tuple(tweets), users=users)
    report = ParseReport(
        lines_total=len(lines),
        records_valid=records_valid,
        language_matched=len(tweets),
        malformed=tuple(malformed),
    )
    return corpus, report


def _rebuild(corpus: Corpus, tweets: list[TweetRecord]) -> Corpus:
    """Recompute user profiles for a reduced tweet list.

    Bot scores and countries carry over; users left with zero tweets drop out.
    """
    counts: dict[str, int] = {}
    for tweet in tweets:
        counts[tweet.author_id] = counts.get(tweet.author_id, 0) + 1
    users = {}
    for uid, n in counts.items():
        old = corpus.users.get(uid)
        users[uid] = UserProfile(
            user_id=uid,
            tweet_count=n,
            bot_score=old.bot_score if old else None,
            country=old.country if old else None,
        )
    return Corpus(language=corpus.language, tweets=tuple(tweets), users=users)


def filter_keywords(corpus: Corpus, keywords: list[str]) -> Corpus:
    """Keep tweets whose text contains at least one keyword (case-insensitive)."""
    if not keywords:
        raise ValueError("keywords must not be empty")
    needles = [kw.lower() for kw in keywords]
    if any(not kw for kw in needles):
        raise ValueError("keywords must be non-empty strings")
    kept = [t for t in corpus.tweets if any(kw in t.text.lower() for kw in needles)]
    return _rebuild(corpus, kept)


def drop_retweets(corpus: Corpus) -> Corpus:
    kept = [t for t in corpus.tweets if not t.is_retweet]
    return _rebuild(corpus, kept)


def rank_users_by_activity(corpus: Corpus, top_k: int) -> list[UserProfile]:
    """Top users by tweet_count descending; ties broken by ascending user_id."""
    if not isinstance(top_k, int) or isinstance(top_k, bool) or top_k < 1:
        raise ValueError(f"top_k must be a positive integer, got {top_k!r}")
    ranked = sorted(corpus.users.values(), key=lambda u: (-u.tweet_count, u.user_id))
    return ranked[:top_k]


def select_users(corpus: Corpus, user_ids) -> Corpus:
    """Restrict the corpus to tweets authored by ``user_ids``."""
    wanted = set(user_ids)
    kept = [t for t in corpus.tweets if t.author_id in wanted]
    return _rebuild(corpus, kept)


def load_bot_scores(path) -> dict[str, float]:
    """Read a two-column sidecar file: user_id <TAB> score, one pair per line."""
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read bot scores {path}: {exc.strerror or exc}") from exc
    scores: dict[str, float] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise DataError(f"bot scores line {line_no}: expected 'user_id<TAB>score'")
        try:
            value = float(parts[1])
        except ValueError:
            raise DataError(f"bot scores line {line_no}: bad score {parts[1]!r}") from None
        if not 0.0 <= value <= 1.0:
            raise DataError(f"bot scores line {line_no}: score {value} outside [0, 1]")
        scores[parts[0]] = value
    return scores


def with_bot_scores(corpus: Corpus, scores: dict[str, float]) -> Corpus:
    """Attach sidecar scores to matching users, overriding in-record values."""
    for uid, value in scores.items():
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"bot score for {uid!r} outside [0, 1]: {value}")
    users = {
        uid: replace(profile, bot_score=scores.get(uid, profile.bot_score))
        for uid, profile in corpus.users.items()
    }
    return Corpus(language=corpus.language, tweets=corpus.tweets, users=users)


def load_keywords(path) -> list[str]:
    """Read one keyword or hashtag pattern per line; blank lines ignored.

    No comment syntax: '#' starts a hashtag pattern, not a comment.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read keywords {path}: {exc.strerror or exc}") from exc
    keywords = [line.strip() for line in lines if line.strip()]
    if not keywords:
        raise DataError(f"keywords file {path} contains no keywords")
    return keywords
