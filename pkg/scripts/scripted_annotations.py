#!/usr/bin/env python3
"""Emit deterministic rater judgments for a sampled corpus.

Stands in for the interactive annotation step in automated runs.
Each scripted rater keys off the planted tone words in the article
text: strong agreement on the sign, per-rater variation in magnitude,
plus a small deliberate share of zero-mean disagreements so the
aggregation step has conflicts to discard.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from make_synthetic_corpus import NEGATIVE_WORDS, POSITIVE_WORDS  # noqa: E402

from sentikit import corpus, sampling  # noqa: E402
from sentikit.seeding import derive_seed  # noqa: E402

RATERS = ("r1", "r2", "r3")
CONFLICT_SCORES = (2, -1, -1)  # mean 0 -> aggregation marks it conflicted

_POS = frozenset(POSITIVE_WORDS)
_NEG = frozenset(NEGATIVE_WORDS)


def planted_sign(article: corpus.NewsArticle) -> int:
    tokens = article.headline_synopsis.split() + (article.full_text or "").split()
    score = sum((t in _POS) - (t in _NEG) for t in tokens)
    if score == 0:
        return 1
    return 1 if score > 0 else -1


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sample", required=True, help="sampled corpus JSONL")
    parser.add_argument("--output-dir", required=True)
    parser.add_argument("--seed", type=int, default=0, help="must match the pipeline seed")
    parser.add_argument("--conflict-rate", type=float, default=0.02)
    args = parser.parse_args()

    articles = corpus.load_processed(args.sample)
    mask = sampling.mask_ids([a.id for a in articles], derive_seed(args.seed, "mask"))
    rows = sorted((mask[a.id], planted_sign(a)) for a in articles)

    conflict_rng = random.Random(derive_seed(args.seed, "annotation-conflicts"))
    conflicted = {
        masked for masked, _ in rows if conflict_rng.random() < args.conflict_rate
    }

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for position, rater in enumerate(RATERS):
        rng = random.Random(derive_seed(args.seed, f"annotations-{rater}"))
        path = out_dir / f"annotations_{rater}.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(sampling.ANNOTATION_HEADER)
            for masked, sign in rows:
                if masked in conflicted:
                    score = CONFLICT_SCORES[position]
                else:
                    magnitude = 1 if rng.random() < 0.2 else 2
                    score = sign * magnitude
                writer.writerow([masked, rater, score])
        print(f"wrote {len(rows)} judgments ({len(conflicted)} conflicted) -> {path}")


if __name__ == "__main__":
    main()
