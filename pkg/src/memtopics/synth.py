"""Deterministic synthetic bilingual tweet archive.

Each language gets three disjoint 10-term topics planted into human tweets,
15 low-frequency noise terms, bot accounts posting spam, low-activity
casual accounts, and retweet copies. Bot scores sit in five tight,
well-separated bands so a 5-way optimal clustering recovers them exactly
and the human/bot cutoff is the top of the third band.

Surface forms exercise the text pipeline: topic terms sometimes appear as
hashtags, capitalized, or as misspellings/inflections that the bundled
conversion and lemma tables map back to the planted term. All randomness
comes from one seeded generator per language, so the same seed always
produces the same archive bytes.
"""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone

TOPICS: dict[str, tuple[tuple[str, ...], ...]] = {
    "es": (
        (
            "dato",
            "privacidad",
            "seguridad",
            "información",
            "filtración",
            "contraseña",
            "acceso",
            "protección",
            "perfil",
            "consentimiento",
        ),
        (
            "elección",
            "voto",
            "campaña",
            "gobierno",
            "congreso",
            "senador",
            "político",
            "democracia",
            "propaganda",
            "manipulación",
        ),
        (
            "empresa",
            "facebook",
            "whatsapp",
            "aplicación",
            "usuario",
            "cuenta",
            "red",
            "anuncio",
            "tecnología",
            "escándalo",
        ),
    ),
    "en": (
        (
            "data",
            "privacy",
            "security",
            "breach",
            "password",
            "access",
            "protection",
            "profile",
            "consent",
            "leak",
        ),
        (
            "election",
            "vote",
            "campaign",
            "government",
            "congress",
            "senator",
            "politician",
            "democracy",
            "propaganda",
            "manipulation",
        ),
        (
            "company",
            "facebook",
            "whatsapp",
            "app",
            "user",
            "account",
            "network",
            "ad",
            "technology",
            "scandal",
        ),
    ),
}

NOISE_TERMS: dict[str, tuple[str, ...]] = {
    "es": (
        "tiempo",
        "mundo",
        "gente",
        "semana",
        "palabra",
        "libro",
        "ciudad",
        "casa",
        "momento",
        "historia",
        "trabajo",
        "juego",
        "camino",
        "lugar",
        "comida",
    ),
    "en": (
        "weather",
        "coffee",
        "music",
        "movie",
        "weekend",
        "morning",
        "city",
        "house",
        "friend",
        "game",
        "road",
        "book",
        "story",
        "work",
        "food",
    ),
}

# Alternate surfaces that the bundled lexicons map back to the planted term.
_VARIANTS: dict[str, dict[str, tuple[str, ...]]] = {
    "es": {
        "dato": ("datos",),
        "información": ("informacion",),
        "filtración": ("filtraciones",),
        "perfil": ("perfiles",),
        "privacidad": ("privasidad",),
        "elección": ("eleccion", "elecciones"),
        "voto": ("votos",),
        "campaña": ("campañas",),
        "gobierno": ("govierno",),
        "senador": ("senadores",),
        "político": ("políticos",),
        "empresa": ("empresas",),
        "facebook": ("feisbuk",),
        "whatsapp": ("wasap", "watsap"),
        "aplicación": ("aplicaciones",),
        "usuario": ("usuarios",),
        "cuenta": ("cuentas",),
        "red": ("redes",),
        "anuncio": ("anuncios",),
        "tecnología": ("tecnologia",),
        "escándalo": ("escandalo", "escándalos"),
    },
    "en": {
        "breach": ("breaches",),
        "profile": ("profiles",),
        "leak": ("leaks", "leaked"),
        "election": ("elections",),
        "vote": ("votes", "voted"),
        "campaign": ("campaigns",),
        "government": ("govt",),
        "congress": ("congres",),
        "senator": ("senators",),
        "politician": ("politicians",),
        "company": ("companies",),
        "facebook": ("fb",),
        "whatsapp": ("watsapp",),
        "app": ("apps",),
        "user": ("users",),
        "account": ("accounts",),
        "network": ("networks",),
        "ad": ("ads",),
        "scandal": ("scandel", "scandals"),
    },
}

_SPAM = {
    "es": ("click", "gratis", "premio", "oferta", "sigue", "gana", "descuento"),
    "en": ("click", "free", "prize", "offer", "follow", "win", "discount"),
}

_FILLERS = {
    "es": ("de", "la", "que", "el", "en", "y", "los", "para", "con", "por"),
    "en": ("the", "of", "and", "to", "in", "for", "on", "with", "at", "this"),
}

_LOCATIONS = {
    "es": (
        "Madrid, España",
        "Ciudad de México",
        "Buenos Aires, Argentina",
        "Santiago de Chile",
        "Bogotá, Colombia",
        "Lima, Perú",
        "",
        "algún lugar",
        "Caracas, Venezuela",
        "Montevideo, Uruguay",
    ),
    "en": (
        "New York, USA",
        "London, UK",
        "Los Angeles, California",
        "Toronto, Canada",
        "Sydney, Australia",
        "Dublin, Ireland",
        "",
        "somewhere out there",
        "Chicago",
        "Manchester, England",
    ),
}

# (low, high) score bands; the first three are human, the last two bot.
BOT_SCORE_BANDS = (
    (0.05, 0.12),
    (0.18, 0.25),
    (0.30, 0.38),
    (0.62, 0.72),
    (0.85, 0.93),
)

_BASE_TIME = datetime(2018, 4, 1, tzinfo=timezone.utc)

TOPIC_PROBABILITY = 0.35
TERM_PROBABILITY = 0.9
NOISE_PROBABILITY = 0.08


def topic_terms(language: str) -> tuple[tuple[str, ...], ...]:
    return TOPICS[language]


def noise_terms(language: str) -> tuple[str, ...]:
    return NOISE_TERMS[language]


def _surface(rng: random.Random, language: str, term: str) -> str:
    roll = rng.random()
    if roll < 0.15:
        return "#" + term
    if roll < 0.30:
        variants = _VARIANTS[language].get(term)
        if variants:
            return rng.choice(variants)
    if roll < 0.40:
        return term.capitalize()
    return term


def _human_text(rng: random.Random, language: str) -> str:
    tokens: list[str] = []
    for block in TOPICS[language]:
        if rng.random() < TOPIC_PROBABILITY:
            for term in block:
                if rng.random() < TERM_PROBABILITY:
                    tokens.append(_surface(rng, language, term))
    for term in NOISE_TERMS[language]:
        if rng.random() < NOISE_PROBABILITY:
            tokens.append(term)
    fillers = rng.randint(2, 6)
    tokens.extend(rng.choice(_FILLERS[language]) for _ in range(fillers))
    if rng.random() < 0.15:
        tokens.append("@amigo" if language == "es" else "@somebody")
    if rng.random() < 0.15:
        tokens.append(f"https://t.co/{rng.randrange(16**6):06x}")
    rng.shuffle(tokens)
    return " ".join(tokens)


def _bot_text(rng: random.Random, language: str) -> str:
    tokens = [rng.choice(_SPAM[language]) for _ in range(rng.randint(4, 8))]
    tokens.append(f"https://t.co/{rng.randrange(16**6):06x}")
    rng.shuffle(tokens)
    return " ".join(tokens)


def _casual_text(rng: random.Random, language: str) -> str:
    tokens = rng.sample(NOISE_TERMS[language], rng.randint(1, 3))
    tokens.extend(
        rng.choice(_FILLERS[language]) for _ in range(rng.randint(1, 4))
    )
    rng.shuffle(tokens)
    return " ".join(tokens)


def _band_score(rng: random.Random, band: tuple[float, float]) -> float:
    low, high = band
    return round(rng.uniform(low, high), 4)


def _language_records(language: str, seed: int, counts: dict) -> tuple[list[dict], dict]:
    rng = random.Random(f"{seed}:{language}")
    humans = [f"{language}_h{i:02d}" for i in range(counts["humans"])]
    bots = [f"{language}_b{i}" for i in range(counts["bots"])]
    casuals = [f"{language}_c{i:02d}" for i in range(counts["casual"])]

    locations = {
        uid: _LOCATIONS[language][i % len(_LOCATIONS[language])]
        for i, uid in enumerate(humans + bots + casuals)
    }
    scores: dict[str, float] = {}
    band_of: dict[str, int] = {}
    per_band = counts["humans"] // 3
    for i, uid in enumerate(humans):
        band = min(i // per_band, 2)
        scores[uid] = _band_score(rng, BOT_SCORE_BANDS[band])
        band_of[uid] = band
    for i, uid in enumerate(bots):
        band = 3 if i < (counts["bots"] + 1) // 2 else 4
        scores[uid] = _band_score(rng, BOT_SCORE_BANDS[band])
        band_of[uid] = band

    records: list[dict] = []
    human_texts: list[tuple[str, str]] = []
    seq = 0

    def push(author: str, text: str, is_retweet: bool) -> None:
        nonlocal seq
        stamp = _BASE_TIME + timedelta(seconds=37 * seq)
        record = {
            "id": f"{language}-{seq:06d}",
            "text": text,
            "lang": language,
            "author_id": author,
            "is_retweet": is_retweet,
            "created_at": stamp.isoformat(),
            "user_location": locations[author],
        }
        if author in scores:
            record["bot_score"] = scores[author]
        records.append(record)
        seq += 1

    for uid in humans:
        for _ in range(counts["docs_per_human"]):
            text = _human_text(rng, language)
            human_texts.append((uid, text))
            push(uid, text, is_retweet=False)
    for uid in bots:
        for _ in range(counts["docs_per_bot"]):
            push(uid, _bot_text(rng, language), is_retweet=False)
    for uid in casuals:
        for _ in range(rng.randint(3, 8)):
            push(uid, _casual_text(rng, language), is_retweet=False)
    for _ in range(counts["retweets"]):
        source_author, text = rng.choice(human_texts)
        retweeter = rng.choice(humans)
        push(retweeter, f"RT @{source_author}: {text}", is_retweet=True)

    rng.shuffle(records)
    threshold = max(scores[uid] for uid in humans if band_of[uid] == 2)
    summary = {
        "records": len(records),
        "humans": counts["humans"],
        "bots": counts["bots"],
        "casual": counts["casual"],
        "human_docs": counts["humans"] * counts["docs_per_human"],
        "retweets": counts["retweets"],
        "bot_threshold": threshold,
    }
    return records, summary


def generate_corpus(
    path,
    *,
    seed: int = 7,
    languages: tuple[str, ...] = ("es", "en"),
    humans: int = 60,
    docs_per_human: int = 50,
    bots: int = 5,
    docs_per_bot: int = 80,
    casual: int = 20,
    retweets: int = 300,
) -> dict:
    """Write a bilingual newline-delimited archive; returns per-language counts."""
    if humans < 3 or humans % 3:
        raise ValueError("humans must be a positive multiple of 3 (one third per score band)")
    counts = {
        "humans": humans,
        "docs_per_human": docs_per_human,
        "bots": bots,
        "docs_per_bot": docs_per_bot,
        "casual": casual,
        "retweets": retweets,
    }
    per_language: dict[str, list[dict]] = {}
    summaries: dict[str, dict] = {}
    for language in languages:
        if language not in TOPICS:
            raise ValueError(f"no synthetic vocabulary for language {language!r}")
        records, summary = _language_records(language, seed, counts)
        per_language[language] = records
        summaries[language] = summary

    # Round-robin interleave so language filtering is actually exercised.
    lines: list[str] = []
    queues = [per_language[lang] for lang in languages]
    longest = max(len(q) for q in queues)
    for i in range(longest):
        for queue in queues:
            if i < len(queue):
                lines.append(json.dumps(queue[i], ensure_ascii=False, sort_keys=True))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
    return {"seed": seed, "languages": summaries}
