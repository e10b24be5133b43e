#!/usr/bin/env python3
"""Generate the bundled synthetic news corpus.

Articles carry a planted tone: every sentiment-bearing word in a
positive article comes from POSITIVE_WORDS and likewise for negative
ones, so scripted raters and trained models have a consistent signal
to find.  The planted words appear in both bundled lexicons with the
same sign, which keeps every scoring engine on the same footing.

A small slice of articles is deliberately degenerate (blank headline,
missing texts, too-short body) to exercise ingest and preprocess
edge handling.  Output is deterministic for a given seed.
"""

from __future__ import annotations

import argparse
import json
import random
from datetime import datetime, timedelta
from pathlib import Path

POSITIVE_WORDS = [
    "benefit", "boost", "confident", "excellent", "gain", "gains",
    "improve", "improved", "opportunity", "optimistic", "positive",
    "profit", "profitable", "profits", "reward", "strength", "strong",
    "success", "successful",
]

NEGATIVE_WORDS = [
    "bankrupt", "crash", "crisis", "deficit", "fail", "failed", "fails",
    "failure", "fear", "fears", "fraud", "lose", "losing", "loss",
    "losses", "negative", "panic", "penalty", "pessimistic", "recession",
    "turmoil", "weak", "weakness", "worried",
]

# raw tag -> article count; the four largest survive sector
# normalisation, the rest collapse into "other"
SECTOR_PLAN = [
    ("Stocks", 320),
    ("Politics & India", 220),
    ("Economy & Banking", 160),
    ("International", 120),
    ("Entertainment", 100),
    ("Sports", 80),
]

COMPANIES = [
    "Meridian Steel", "Kavya Textiles", "Bluepeak Energy", "Trident Pharma",
    "Orchid Foods", "Silverline Retail", "Zenith Chemicals", "Crestwood Finance",
    "Lotus Infra", "Pinnacle Airways", "Harbor Logistics", "Quartz Telecom",
    "Sunrise Agro", "Falcon Cement", "Granite Mining", "Cobalt Power",
    "Maple Autos", "Onyx Media", "Pearl Jewels", "Raven Shipping",
    "Topaz Bank", "Umber Realty", "Vortex Software", "Ivory Paper",
]

PLACES = [
    "Mumbai", "Delhi", "Chennai", "Kolkata", "Bengaluru",
    "Pune", "Hyderabad", "London", "Singapore", "New York",
]

TOPICS = {
    "Stocks": ["shares", "the stock", "equity volumes", "the trading session", "the order book"],
    "Economy & Banking": ["lending", "credit growth", "deposits", "bond yields", "inflation data"],
    "Politics & India": ["the policy debate", "the election campaign", "the assembly session",
                         "coalition talks", "the reform bill"],
    "International": ["trade talks", "the border summit", "the currency pact",
                      "export quotas", "the sanctions review"],
    "Entertainment": ["the box office", "a streaming deal", "award season",
                      "the concert tour", "the film release"],
    "Sports": ["the league final", "the test match", "the title race",
               "the transfer window", "the home series"],
}

VERBS = ["posts", "reports", "flags", "records", "announces", "cites"]

NEUTRAL_SENTENCES = [
    "Volumes stayed close to the monthly average through the afternoon.",
    "Officials are expected to publish the detailed figures on Friday.",
    "The board will meet again before the end of the quarter.",
    "Regional desks tracked the development through the day.",
    "A follow-up briefing has been scheduled for early next week.",
    "Brokers described the broader tape as orderly.",
    "The announcement followed weeks of quiet preparation.",
    "Coverage of the story continued into the evening bulletins.",
    "Several analysts updated their tracking sheets after the call.",
    "The committee took questions from reporters for an hour.",
    "Early estimates were compiled from exchange filings.",
    "Participants filed out without further comment.",
]


def _tone_sentence(rng: random.Random, word: str, positive: bool, sector: str) -> str:
    topic = rng.choice(TOPICS[sector])
    if positive:
        patterns = [
            f"Desk notes called the {word} reading a clear plus for {topic}.",
            f"Managers pointed to {word} momentum across {topic}.",
            f"The quarter's {word} tone carried over into {topic}.",
        ]
    else:
        patterns = [
            f"Desk notes flagged the {word} reading as a drag on {topic}.",
            f"Managers warned of {word} pressure across {topic}.",
            f"The quarter's {word} tone spilled over into {topic}.",
        ]
    return rng.choice(patterns)


def _make_article(rng: random.Random, idx: int, sector: str, positive: bool) -> dict:
    words = POSITIVE_WORDS if positive else NEGATIVE_WORDS
    company = rng.choice(COMPANIES)
    place = rng.choice(PLACES)
    topic = rng.choice(TOPICS[sector])
    w_head = rng.choice(words)
    headline = f"{company} {rng.choice(VERBS)} {w_head} quarter as {topic} shifts in {place}"
    if rng.random() < 0.08:
        headline += "!"

    w_syn = rng.choice(words)
    shown = w_syn.upper() if rng.random() < 0.04 else w_syn
    synopsis = f"Analysts in {place} called the update {shown} for {topic}."

    sentences = [f"{company} issued its quarterly update from {place} on {topic}."]
    for _ in range(rng.randint(2, 5)):
        if rng.random() < 0.55:
            sentences.append(_tone_sentence(rng, rng.choice(words), positive, sector))
        else:
            sentences.append(rng.choice(NEUTRAL_SENTENCES))
    full_text = " ".join(sentences)

    published = datetime(2023, 1, 1) + timedelta(
        days=rng.randrange(181), hours=rng.randrange(7, 22), minutes=rng.randrange(60)
    )
    record = {
        "id": f"syn-{idx:04d}",
        "publish_datetime": published.isoformat(),
        "headline": headline,
        "synopsis": synopsis,
        "full_text": full_text,
        "sector": sector,
    }
    if rng.random() < 0.3:
        record["update_datetime"] = (published + timedelta(hours=rng.randrange(1, 48))).isoformat()

    # planted degeneracies: textless items ingest drops, rows missing a
    # required field, and bodies short enough for preprocess to discard
    if idx % 97 == 3:
        record.pop("synopsis")
        record.pop("full_text")
    elif idx % 101 == 7:
        record.pop("headline")
    elif idx % 53 == 11:
        record["full_text"] = "Trading was quiet."
    return record


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output", default="data/synthetic_news.jsonl")
    parser.add_argument("--seed", type=int, default=20230115)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    sectors = [tag for tag, count in SECTOR_PLAN for _ in range(count)]
    total = len(sectors)
    tones = [True] * (total // 2) + [False] * (total - total // 2)
    rng.shuffle(sectors)
    rng.shuffle(tones)

    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for idx, (sector, positive) in enumerate(zip(sectors, tones), start=1):
            fh.write(json.dumps(_make_article(rng, idx, sector, positive)))
            fh.write("\n")
    print(f"wrote {total} articles -> {out}")


if __name__ == "__main__":
    main()
