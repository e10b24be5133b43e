"""News corpus ingestion and text cleaning.

Raw records arrive as JSONL or CSV exports of a news scrape, one record
per article.  This module turns them into :class:`NewsArticle` values:
text lowercased with digits, punctuation and other non-letter notation
replaced by spaces, stopwords removed (apart from a whitelist of
direction words such as "up" and "down" that carry market meaning),
headline and synopsis merged into one short-text field, and raw sector
tags clubbed into a fixed sector set with a financial/non-financial
segment split.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping

logger = logging.getLogger(__name__)


class Sector(str, Enum):
    STOCKS = "stocks"
    ECONOMY_BANKING = "economy_banking"
    POLITICS_INDIA = "politics_india"
    INTERNATIONAL = "international"
    OTHER = "other"


class Segment(str, Enum):
    FINANCIAL = "financial"
    NON_FINANCIAL = "non_financial"


FINANCIAL_SECTORS = frozenset({Sector.STOCKS, Sector.ECONOMY_BANKING})

# Raw tag -> sector, keyed on the tag lowercased with non-letters removed.
_SECTOR_ALIASES = {
    "stock": Sector.STOCKS,
    "stocks": Sector.STOCKS,
    "economybanking": Sector.ECONOMY_BANKING,
    "economyandbanking": Sector.ECONOMY_BANKING,
    "politicsindia": Sector.POLITICS_INDIA,
    "politicsandindia": Sector.POLITICS_INDIA,
    "international": Sector.INTERNATIONAL,
}

_NON_LETTER_KEY = re.compile(r"[^a-z]+")


def sector_for(raw: str) -> Sector:
    return _SECTOR_ALIASES.get(_NON_LETTER_KEY.sub("", raw.lower()), Sector.OTHER)


def segment_for(sector: Sector) -> Segment:
    return Segment.FINANCIAL if sector in FINANCIAL_SECTORS else Segment.NON_FINANCIAL


@dataclass
class NewsArticle:
    """One news item; text fields hold raw or cleaned text depending on stage."""

    id: str
    publish_datetime: datetime
    headline: str
    sector_raw: str
    update_datetime: datetime | None = None
    synopsis: str | None = None
    full_text: str | None = None
    sector: Sector = Sector.OTHER
    sector_norm: str = Sector.OTHER.value
    segment: Segment = Segment.NON_FINANCIAL
    headline_synopsis: str = ""


DEFAULT_STOPWORD_WHITELIST = frozenset(
    {"up", "down", "above", "below", "over", "under", "off", "no", "not", "nor", "against"}
)

DEFAULT_MIN_FULL_TEXT_CHARS = 20
DEFAULT_TOP_SECTOR_COUNT = 4


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Stopword set from a one-word-per-line file; bundled list by default."""
    if path is None:
        text = resources.files("sentikit.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    stopword_whitelist: frozenset[str] = DEFAULT_STOPWORD_WHITELIST
    min_full_text_chars: int = DEFAULT_MIN_FULL_TEXT_CHARS
    top_sector_count: int = DEFAULT_TOP_SECTOR_COUNT

    def __post_init__(self) -> None:
        if not self.stopword_whitelist <= self.stopwords:
            missing = sorted(self.stopword_whitelist - self.stopwords)
            raise ValueError(f"whitelist words not in the stopword list: {missing}")
        if self.min_full_text_chars < 1:
            raise ValueError("min_full_text_chars must be >= 1")
        if self.top_sector_count < 1:
            raise ValueError("top_sector_count must be >= 1")


_NON_LETTER = re.compile(r"[^a-z]+")


def clean_text(text: str, config: PreprocessConfig) -> str:
    """Lowercase, keep only letters, drop non-whitelisted stopwords."""
    spaced = _NON_LETTER.sub(" ", text.lower())
    kept = [
        token
        for token in spaced.split()
        if token not in config.stopwords or token in config.stopword_whitelist
    ]
    return " ".join(kept)


def preprocess(article: NewsArticle, config: PreprocessConfig | None = None) -> NewsArticle:
    """Cleaned copy of ``article``; idempotent, the input is not mutated.

    full_text shorter than ``min_full_text_chars`` after cleaning is
    treated as absent.  headline_synopsis is the cleaned headline and
    synopsis joined with a single space (empty parts skipped).
    """
    config = config or PreprocessConfig()
    headline = clean_text(article.headline, config)
    synopsis = None if article.synopsis is None else clean_text(article.synopsis, config)
    full_text = None if article.full_text is None else clean_text(article.full_text, config)
    if full_text is not None and len(full_text) < config.min_full_text_chars:
        full_text = None
    merged = " ".join(part for part in (headline, synopsis) if part)
    return replace(
        article,
        headline=headline,
        synopsis=synopsis,
        full_text=full_text,
        headline_synopsis=merged,
    )


def normalize_sectors(
    articles: Iterable[NewsArticle], top_k: int = DEFAULT_TOP_SECTOR_COUNT
) -> list[NewsArticle]:
    """Keep the ``top_k`` most frequent raw sector tags, club the rest as other.

    Frequency ties break alphabetically on the raw tag so the outcome is
    deterministic.  Segment follows the sector: stocks and
    economy/banking are financial, everything else is not.
    """
    articles = list(articles)
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    counts = Counter(a.sector_raw for a in articles)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    top = {raw for raw, _ in ranked[:top_k]}
    out = []
    for a in articles:
        if a.sector_raw in top:
            sector = sector_for(a.sector_raw)
            sector_norm = a.sector_raw.strip().lower()
        else:
            sector = Sector.OTHER
            sector_norm = Sector.OTHER.value
        out.append(
            replace(a, sector=sector, sector_norm=sector_norm, segment=segment_for(sector))
        )
    return out


@dataclass
class IngestResult:
    articles: list[NewsArticle]
    dropped: int = 0
    malformed: int = 0


_REQUIRED_KEYS = ("id", "publish_datetime", "headline", "sector")


def _parse_timestamp(value: str) -> datetime:
    # fromisoformat in 3.10 rejects a trailing Z; normalise it first
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


def _missing(value: object) -> bool:
    return value is None or value == ""


def _article_from_record(record: Mapping[str, object]) -> NewsArticle | None:
    """Article from one raw mapping; None when it lacks all body text."""
    for key in _REQUIRED_KEYS:
        if _missing(record.get(key)):
            raise ValueError(f"missing required field {key!r}")
    synopsis = record.get("synopsis")
    full_text = record.get("full_text")
    if _missing(synopsis) and _missing(full_text):
        return None
    update_raw = record.get("update_datetime")
    sector_raw = str(record["sector"])
    sector = sector_for(sector_raw)
    headline = str(record["headline"])
    synopsis_text = None if _missing(synopsis) else str(synopsis)
    # raw merge; preprocess later replaces it with the cleaned version
    merged = " ".join(part for part in (headline, synopsis_text) if part)
    return NewsArticle(
        id=str(record["id"]),
        publish_datetime=_parse_timestamp(str(record["publish_datetime"])),
        update_datetime=None if _missing(update_raw) else _parse_timestamp(str(update_raw)),
        headline=headline,
        synopsis=synopsis_text,
        full_text=None if _missing(full_text) else str(full_text),
        sector_raw=sector_raw,
        sector=sector,
        sector_norm=sector.value,
        segment=segment_for(sector),
        headline_synopsis=str(record.get("headline_synopsis") or merged),
    )


def _iter_raw_records(path: Path, fmt: str) -> Iterator[tuple[int, Mapping[str, object] | None]]:
    """Yields (line_number, record) pairs; record is None for unparseable rows."""
    if fmt == "jsonl":
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    yield lineno, None
                    continue
                yield lineno, record if isinstance(record, dict) else None
    elif fmt == "csv":
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [k for k in _REQUIRED_KEYS if k not in header]
            if missing:
                raise ValueError(f"csv header lacks required columns: {missing}")
            for lineno, row in enumerate(reader, start=2):
                yield lineno, row
    else:
        raise ValueError(f"unknown input format {fmt!r} (expected jsonl or csv)")


def ingest(path: str | Path, fmt: str = "jsonl") -> IngestResult:
    """Read raw records; skip and count malformed rows and textless records.

    A record missing both synopsis and full_text cannot be scored or
    annotated and is counted in ``dropped``; rows that fail to parse or
    lack a required field are counted in ``malformed``.
    """
    path = Path(path)
    result = IngestResult(articles=[])
    for lineno, record in _iter_raw_records(path, fmt):
        if record is None:
            result.malformed += 1
            logger.warning("%s:%d: unparseable record skipped", path, lineno)
            continue
        try:
            article = _article_from_record(record)
        except (ValueError, TypeError) as exc:
            result.malformed += 1
            logger.warning("%s:%d: %s", path, lineno, exc)
            continue
        if article is None:
            result.dropped += 1
            continue
        result.articles.append(article)
    return result


def _article_to_record(article: NewsArticle) -> dict[str, object]:
    return {
        "id": article.id,
        "publish_datetime": article.publish_datetime.isoformat(),
        "update_datetime": (
            None if article.update_datetime is None else article.update_datetime.isoformat()
        ),
        "headline": article.headline,
        "synopsis": article.synopsis,
        "full_text": article.full_text,
        "sector": article.sector_raw,
        "sector_norm": article.sector_norm,
        "segment": article.segment.value,
        "headline_synopsis": article.headline_synopsis,
    }


def write_articles(articles: Iterable[NewsArticle], path: str | Path) -> None:
    """One JSON object per line, keys in a fixed order for stable bytes."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for article in articles:
            fh.write(json.dumps(_article_to_record(article), ensure_ascii=False))
            fh.write("\n")


def load_processed(path: str | Path) -> list[NewsArticle]:
    """Read back a file written by :func:`write_articles` (no drop rules)."""
    articles = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            update_raw = rec.get("update_datetime")
            articles.append(
                NewsArticle(
                    id=rec["id"],
                    publish_datetime=_parse_timestamp(rec["publish_datetime"]),
                    update_datetime=(
                        None if _missing(update_raw) else _parse_timestamp(update_raw)
                    ),
                    headline=rec["headline"],
                    synopsis=rec.get("synopsis"),
                    full_text=rec.get("full_text"),
                    sector_raw=rec.get("sector", ""),
                    sector=sector_for(rec.get("sector_norm", rec.get("sector", ""))),
                    sector_norm=rec.get("sector_norm", Sector.OTHER.value),
                    segment=Segment(rec.get("segment", Segment.NON_FINANCIAL.value)),
                    headline_synopsis=rec.get("headline_synopsis", ""),
                )
            )
    return articles
