"""Tweet-aware text normalization.

tokenize splits on whitespace, drops URLs and @-mentions, keeps hashtag
bodies, strips punctuation and symbols from token edges (interior
punctuation like hyphens survives), and lowercases. normalize then applies
a misspelling-conversion map, a lemma lookup table, and stopword removal,
in that order. Diacritics are preserved throughout; there is no stemming.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources

from .corpus import Corpus
from .errors import ConfigError, DataError

_SUPPORTED_LANGUAGES = ("en", "es")


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: str
    tokens: tuple[str, ...]


class Lexicon:
    """Stopwords plus conversion and lemma lookup tables, all lowercase.

    Conversions run before lemmas. Conversion outputs must not be
    stopwords (they would silently vanish, hiding a lexicon mistake).
    """

    __slots__ = ("stopwords", "conversions", "lemmas")

    def __init__(self, stopwords, conversions, lemmas):
        stopwords = frozenset(stopwords)
        conversions = dict(conversions)
        lemmas = dict(lemmas)
        for word in stopwords:
            if word != word.lower():
                raise ValueError(f"stopword {word!r} is not lowercase")
        for name, table in (("conversion", conversions), ("lemma", lemmas)):
            for key, value in table.items():
                if key != key.lower() or value != value.lower():
                    raise ValueError(f"{name} entry {key!r} -> {value!r} is not lowercase")
        bad = {v for v in conversions.values() if v in stopwords}
        if bad:
            raise ValueError(
                f"conversion outputs {sorted(bad)} are stopwords; fix the lexicon"
            )
        object.__setattr__(self, "stopwords", stopwords)
        object.__setattr__(self, "conversions", conversions)
        object.__setattr__(self, "lemmas", lemmas)

    def __setattr__(self, name, value):
        raise AttributeError("Lexicon is immutable")

    def __repr__(self):
        return (
            f"Lexicon({len(self.stopwords)} stopwords, "
            f"{len(self.conversions)} conversions, {len(self.lemmas)} lemmas)"
        )


def _is_strippable(char: str) -> bool:
    return unicodedata.category(char)[0] in ("P", "S")


def _clean_token(raw: str) -> str | None:
    token = raw.replace("’", "'")
    lowered = token.lower()
    if "://" in lowered or lowered.startswith("www."):
        return None
    start, end = 0, len(token)
    # Leading '#'/'@' are meaningful markers; everything else strippable
    # peels off both edges.
    while start < end and _is_strippable(token[start]) and token[start] not in "#@":
        start += 1
    while end > start and _is_strippable(token[end - 1]):
        end -= 1
    token = token[start:end]
    if not token:
        return None
    if token[0] == "@":
        return None
    if token[0] == "#":
        token = token.lstrip("#")
        if not token:
            return None
    if "#" in token or "@" in token or "://" in token:
        return None
    return token.lower()


def tokenize(text: str) -> list[str]:
    """Whitespace-split tweet text into cleaned lowercase tokens."""
    tokens = []
    for raw in text.split():
        cleaned = _clean_token(raw)
        if cleaned:
            tokens.append(cleaned)
    return tokens


def normalize(tokens, lexicon: Lexicon) -> list[str]:
    """Conversion map, then lemma map, then stopword removal, per token."""
    out = []
    for token in tokens:
        token = lexicon.conversions.get(token, token)
        token = lexicon.lemmas.get(token, token)
        if token in lexicon.stopwords:
            continue
        out.append(token)
    return out


def prepare_documents(corpus: Corpus, lexicon: Lexicon) -> list[TokenizedDoc]:
    """Tokenize and normalize every tweet, preserving corpus order.

    Documents that normalize to nothing stay in the list; the matrix
    builder decides whether to keep them.
    """
    return [
        TokenizedDoc(doc_id=t.id, tokens=tuple(normalize(tokenize(t.text), lexicon)))
        for t in corpus.tweets
    ]


def _read_lines(path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read lexicon file {path}: {exc.strerror or exc}") from exc


def load_stopwords(path) -> frozenset[str]:
    """One stopword per line; blank lines ignored; lowercased on load."""
    words = {line.strip().lower() for line in _read_lines(path) if line.strip()}
    return frozenset(words)


def load_pairs(path) -> dict[str, str]:
    """Tab-separated (from, to) pairs, lowercased; duplicate keys rejected."""
    table: dict[str, str] = {}
    for line_no, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise DataError(f"lexicon pairs line {line_no}: expected 'from<TAB>to'")
        key = parts[0].strip().lower()
        value = parts[1].strip().lower()
        if key in table:
            raise DataError(f"lexicon pairs line {line_no}: duplicate entry {key!r}")
        table[key] = value
    return table


def _data_path(name: str):
    return resources.files("memtopics").joinpath("data", name)


def default_lexicon(language: str) -> Lexicon:
    """Bundled lexicon for a supported language code.

    The lists are this artifact's own curated configuration, not a
    canonical reference; swap any of them via the lexicon path flags.
    """
    if language not in _SUPPORTED_LANGUAGES:
        raise ConfigError(
            f"no bundled lexicon for language {language!r}; "
            f"supported: {', '.join(_SUPPORTED_LANGUAGES)} "
            "(pass explicit lexicon paths for other languages)"
        )
    with resources.as_file(_data_path(f"stopwords_{language}.txt")) as p:
        stopwords = load_stopwords(p)
    with resources.as_file(_data_path(f"conversions_{language}.tsv")) as p:
        conversions = load_pairs(p)
    with resources.as_file(_data_path(f"lemmas_{language}.tsv")) as p:
        lemmas = load_pairs(p)
    return Lexicon(stopwords=stopwords, conversions=conversions, lemmas=lemmas)


def build_lexicon(
    language: str,
    stopwords_path=None,
    conversions_path=None,
    lemmas_path=None,
) -> Lexicon:
    """Default lexicon with per-file overrides from explicit paths."""
    if stopwords_path and conversions_path and lemmas_path:
        base = None
    else:
        base = default_lexicon(language)
    return Lexicon(
        stopwords=load_stopwords(stopwords_path) if stopwords_path else base.stopwords,
        conversions=load_pairs(conversions_path) if conversions_path else base.conversions,
        lemmas=load_pairs(lemmas_path) if lemmas_path else base.lemmas,
    )
