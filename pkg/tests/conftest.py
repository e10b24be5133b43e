"""Shared builders for the test suite."""

from __future__ import annotations

from datetime import datetime

import pytest

from sentikit.corpus import NewsArticle, normalize_sectors


def make_article(
    article_id: str,
    headline: str = "Markets steady",
    sector: str = "Stocks",
    synopsis: str | None = "A quiet day overall.",
    full_text: str | None = None,
    **overrides,
) -> NewsArticle:
    fields = dict(
        id=article_id,
        publish_datetime=datetime(2023, 3, 1, 9, 30),
        headline=headline,
        sector_raw=sector,
        synopsis=synopsis,
        full_text=full_text,
        headline_synopsis=" ".join(p for p in (headline, synopsis) if p),
    )
    fields.update(overrides)
    return NewsArticle(**fields)


@pytest.fixture
def sectored_articles() -> list[NewsArticle]:
    """Six sectors with distinct frequencies; top four are deterministic."""
    plan = [
        ("Stocks", 6),
        ("Politics & India", 5),
        ("Economy & Banking", 4),
        ("International", 3),
        ("Sports", 2),
        ("Entertainment", 1),
    ]
    articles = [
        make_article(f"{tag[:3].lower()}-{i}", sector=tag)
        for tag, count in plan
        for i in range(count)
    ]
    return normalize_sectors(articles)
