"""Offline location resolution and Table-2-style geo breakdowns.

Matching is lookup-only: normalize the raw profile string (trim, casefold,
fold diacritics, collapse whitespace), try the whole string, then try
comma-separated segments right to left (location strings usually end with
the coarsest unit). No population ranking, no fuzzy matching.
"""

from __future__ import annotations

import csv
import unicodedata
from dataclasses import dataclass
from importlib import resources

from ._validation import check_positive_int
from .corpus import Corpus
from .errors import DataError

NOT_FOUND = "not found"
OTHER = "other"


def _normalize(raw: str) -> str:
    folded = unicodedata.normalize("NFKD", raw.strip().casefold())
    stripped = "".join(c for c in folded if unicodedata.category(c) != "Mn")
    return " ".join(stripped.split())


@dataclass(frozen=True)
class Gazetteer:
    """Map from normalized place alias to country label."""

    entries: dict[str, str]

    @classmethod
    def from_pairs(cls, pairs) -> "Gazetteer":
        entries: dict[str, str] = {}
        for alias, country in pairs:
            key = _normalize(alias)
            if not key:
                raise ValueError(f"alias {alias!r} normalizes to nothing")
            if entries.get(key, country) != country:
                raise ValueError(
                    f"duplicate alias {key!r} maps to both "
                    f"{entries[key]!r} and {country!r}"
                )
            entries[key] = country
        return cls(entries=entries)

    def lookup(self, normalized: str) -> str | None:
        return self.entries.get(normalized)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class GeoRow:
    country: str
    pct_tweets: float
    pct_users: float


@dataclass(frozen=True)
class GeoTable:
    """Percentage breakdown rows; each pct column sums to 100.

    Row order: "not found" first, then countries by tweet share descending
    (ties by name), then an "other" row if top_n cut anything off.
    """

    rows: tuple[GeoRow, ...]


def resolve_location(raw: str | None, gazetteer: Gazetteer) -> str | None:
    """Country for a free-text location, or None when nothing matches."""
    if not raw:
        return None
    whole = _normalize(raw)
    if not whole:
        return None
    hit = gazetteer.lookup(whole)
    if hit is not None:
        return hit
    segments = [seg for seg in (_normalize(s) for s in raw.split(",")) if seg]
    for segment in reversed(segments):
        hit = gazetteer.lookup(segment)
        if hit is not None:
            return hit
    return None


def user_countries(corpus: Corpus, gazetteer: Gazetteer) -> dict[str, str | None]:
    """Resolve each user via the last non-empty location string they posted."""
    latest: dict[str, str] = {}
    for tweet in corpus.tweets:
        if tweet.user_location:
            latest[tweet.author_id] = tweet.user_location
    return {
        uid: resolve_location(latest.get(uid), gazetteer) for uid in corpus.users
    }


def location_table(corpus: Corpus, gazetteer: Gazetteer, top_n: int = 10) -> GeoTable:
    """Tweet and user percentage shares per resolved country.

    Keeps the top_n countries by tweet share; anything below the cut is
    folded into an "other" row so both columns still sum to 100.
    """
    top_n = check_positive_int(top_n, name="top_n")
    countries = user_countries(corpus, gazetteer)
    total_tweets = len(corpus.tweets)
    total_users = len(corpus.users)
    if total_tweets == 0 or total_users == 0:
        raise DataError("cannot build a location table for an empty corpus")

    tweet_counts: dict[str, int] = {}
    user_counts: dict[str, int] = {}
    for uid, profile in corpus.users.items():
        label = countries[uid] or NOT_FOUND
        tweet_counts[label] = tweet_counts.get(label, 0) + profile.tweet_count
        user_counts[label] = user_counts.get(label, 0) + 1

    def row(label: str) -> GeoRow:
        return GeoRow(
            country=label,
            pct_tweets=100.0 * tweet_counts.get(label, 0) / total_tweets,
            pct_users=100.0 * user_counts.get(label, 0) / total_users,
        )

    ranked = sorted(
        (label for label in tweet_counts if label != NOT_FOUND),
        key=lambda label: (-tweet_counts[label], label),
    )
    rows = [row(NOT_FOUND)]  # always present, 0.0 when everyone resolved
    rows.extend(row(label) for label in ranked[:top_n])
    overflow = ranked[top_n:]
    if overflow:
        rows.append(
            GeoRow(
                country=OTHER,
                pct_tweets=100.0
                * sum(tweet_counts[label] for label in overflow)
                / total_tweets,
                pct_users=100.0
                * sum(user_counts[label] for label in overflow)
                / total_users,
            )
        )
    return GeoTable(rows=tuple(rows))


def write_geo_csv(table: GeoTable, path) -> None:
    """Country rows with one-decimal percentages."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["country", "pct_tweets", "pct_users"])
        for row in table.rows:
            writer.writerow([row.country, f"{row.pct_tweets:.1f}", f"{row.pct_users:.1f}"])


def load_gazetteer(path) -> Gazetteer:
    """Tab-separated (alias, country) pairs, UTF-8."""
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read gazetteer {path}: {exc.strerror or exc}") from exc
    pairs = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise DataError(f"gazetteer line {line_no}: expected 'alias<TAB>country'")
        pairs.append((parts[0], parts[1].strip()))
    try:
        return Gazetteer.from_pairs(pairs)
    except ValueError as exc:
        raise DataError(f"gazetteer {path}: {exc}") from None


def default_gazetteer() -> Gazetteer:
    """Bundled alias table for common Spanish/English locations."""
    with resources.as_file(
        resources.files("memtopics").joinpath("data", "gazetteer.tsv")
    ) as path:
        return load_gazetteer(path)
