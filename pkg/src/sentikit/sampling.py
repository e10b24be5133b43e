"""Sample-size math, stratified draws, and the annotation workflow."""

from __future__ import annotations

import csv
import math
import random
import sys
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from statistics import NormalDist
from typing import Callable, Iterable, Mapping, Sequence, TextIO, TypeVar

T = TypeVar("T")

VALID_SCORES = (-2, -1, 1, 2)


class Label(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class AllocationError(ValueError):
    """A stratum cannot supply its allocated share of the sample."""


class IncompleteAnnotationError(ValueError):
    """Some articles lack the required number of rater judgments."""


def sample_size(confidence: float, margin_of_error: float) -> int:
    """Smallest n with a two-sided normal interval of the given width.

    Uses the conservative p=0.5 variance bound: n = ceil(z^2/4e^2) where z
    is the (1+confidence)/2 normal quantile.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    if not 0.0 < margin_of_error < 1.0:
        raise ValueError("margin_of_error must lie strictly between 0 and 1")
    z = NormalDist().inv_cdf((1.0 + confidence) / 2.0)
    return math.ceil(z * z * 0.25 / (margin_of_error * margin_of_error))


def round_to(n: int, multiple: int = 100) -> int:
    """Round n up to the next multiple (annotation batches come in rounds)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if multiple < 1:
        raise ValueError("multiple must be >= 1")
    return ((n + multiple - 1) // multiple) * multiple


def allocate(counts: Mapping[str, int], n: int) -> dict[str, int]:
    """Proportional allocation of n across strata by largest remainder.

    Quotas are exact rationals, so ties are decided by value and then by
    stratum name, never by float noise.
    """
    total = sum(counts.values())
    if total == 0:
        raise AllocationError("no articles to allocate from")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > total:
        raise AllocationError(f"requested {n} articles but only {total} exist")
    quotas = {name: Fraction(n * count, total) for name, count in counts.items()}
    shares = {name: int(q) for name, q in quotas.items()}
    leftover = n - sum(shares.values())
    by_remainder = sorted(
        counts, key=lambda name: (-(quotas[name] - shares[name]), name)
    )
    for name in by_remainder[:leftover]:
        shares[name] += 1
    for name, share in shares.items():
        if share > counts[name]:
            raise AllocationError(
                f"stratum {name!r} holds {counts[name]} articles but needs {share}"
            )
    return shares


def stratified_sample(
    items: Sequence[T],
    strata_of: Callable[[T], str] | str,
    n: int,
    seed: int,
) -> list[T]:
    """Draw n items, proportional across strata, reproducible under seed.

    Strata are processed in name order and items keep their own draw
    order within a stratum, so equal seeds give byte-identical output.
    """
    key = (lambda item: getattr(item, strata_of)) if isinstance(strata_of, str) else strata_of
    groups: dict[str, list[T]] = {}
    for item in items:
        groups.setdefault(str(key(item)), []).append(item)
    shares = allocate({name: len(g) for name, g in groups.items()}, n)
    rng = random.Random(seed)
    picked: list[T] = []
    for name in sorted(groups):
        picked.extend(rng.sample(groups[name], shares[name]))
    return picked


def mask_ids(ids: Sequence[str], seed: int) -> dict[str, str]:
    """Injective map from article id to an opaque 128-bit hex id.

    Masked ids are drawn from a seeded RNG so a rerun reproduces them,
    and they carry no trace of publish order or the original id.
    """
    if len(set(ids)) != len(ids):
        raise ValueError("article ids must be unique before masking")
    rng = random.Random(seed)
    mapping: dict[str, str] = {}
    used: set[str] = set()
    for article_id in ids:
        masked = f"{rng.getrandbits(128):032x}"
        while masked in used:
            masked = f"{rng.getrandbits(128):032x}"
        used.add(masked)
        mapping[article_id] = masked
    return mapping


@dataclass(frozen=True)
class AnnotationRecord:
    """One rater's judgment of one masked article."""

    masked_id: str
    rater_id: str
    score: int

    def __post_init__(self) -> None:
        if self.score not in VALID_SCORES:
            raise ValueError(f"score must be one of {VALID_SCORES}, got {self.score}")


@dataclass(frozen=True)
class LabeledArticle:
    article_id: str
    mean_score: Fraction
    label: Label | None
    conflicted: bool
    masked_id: str | None = None


@dataclass
class AggregateResult:
    labeled: list[LabeledArticle]
    conflicted: list[LabeledArticle]


ANNOTATION_HEADER = ["masked_id", "rater_id", "score"]


def write_annotations(records: Iterable[AnnotationRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ANNOTATION_HEADER)
        for rec in records:
            writer.writerow([rec.masked_id, rec.rater_id, rec.score])


def read_annotations(path: str | Path) -> list[AnnotationRecord]:
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or row == ANNOTATION_HEADER:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: bad annotation row {row!r}")
            records.append(AnnotationRecord(row[0], row[1], int(row[2])))
    return records


@dataclass
class SampleItem:
    """What an annotator sees: masked id plus text, nothing date-like."""

    masked_id: str
    headline_synopsis: str
    full_text: str | None = None


def run_annotation_session(
    items: Sequence[SampleItem],
    rater_id: str,
    progress_path: str | Path,
    show_full_text: bool = False,
    input_stream: TextIO | None = None,
    output_stream: TextIO | None = None,
) -> int:
    """Prompt for a -2..+2 (no zero) score per item, appending as we go.

    Already-scored items for this rater are skipped, so an interrupted
    session resumes where it stopped.  Returns the number of new
    judgments recorded.
    """
    input_stream = input_stream if input_stream is not None else sys.stdin
    output_stream = output_stream if output_stream is not None else sys.stdout
    progress_path = Path(progress_path)
    done = {
        rec.masked_id for rec in read_annotations(progress_path) if rec.rater_id == rater_id
    }
    new_file = not progress_path.exists() or progress_path.stat().st_size == 0
    recorded = 0
    with progress_path.open("a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(ANNOTATION_HEADER)
            fh.flush()
        for item in items:
            if item.masked_id in done:
                continue
            output_stream.write(f"\n[{item.masked_id}]\n{item.headline_synopsis}\n")
            if show_full_text and item.full_text:
                output_stream.write(f"{item.full_text}\n")
            while True:
                output_stream.write("score (-2, -1, 1, 2): ")
                output_stream.flush()
                line = input_stream.readline()
                if not line:
                    return recorded
                raw = line.strip()
                try:
                    score = int(raw)
                    if score not in VALID_SCORES:
                        raise ValueError
                except ValueError:
                    output_stream.write(
                        "score must be one of -2, -1, 1, 2 (neutral is not allowed)\n"
                    )
                    continue
                break
            writer.writerow([item.masked_id, rater_id, score])
            fh.flush()
            recorded += 1
    return recorded


def aggregate_labels(
    records: Iterable[AnnotationRecord], raters_required: int = 3
) -> AggregateResult:
    """Mean the raters' scores per article and label by the mean's sign.

    Articles whose mean is exactly zero are conflicted: reported, but
    kept out of the labeled set.  Any article with a duplicate
    (article, rater) pair or the wrong number of judgments is an error.
    """
    if raters_required < 1:
        raise ValueError("raters_required must be >= 1")
    scores: dict[str, dict[str, int]] = {}
    for rec in records:
        per_rater = scores.setdefault(rec.masked_id, {})
        if rec.rater_id in per_rater:
            raise ValueError(
                f"duplicate judgment for article {rec.masked_id!r} by rater {rec.rater_id!r}"
            )
        per_rater[rec.rater_id] = rec.score
    incomplete = sorted(
        aid for aid, per_rater in scores.items() if len(per_rater) != raters_required
    )
    if incomplete:
        raise IncompleteAnnotationError(
            f"articles without exactly {raters_required} judgments: {incomplete}"
        )
    labeled: list[LabeledArticle] = []
    conflicted: list[LabeledArticle] = []
    for aid in sorted(scores):
        values = scores[aid].values()
        mean = Fraction(sum(values), len(values))
        if mean == 0:
            conflicted.append(LabeledArticle(aid, mean, None, True, masked_id=aid))
        else:
            label = Label.POSITIVE if mean > 0 else Label.NEGATIVE
            labeled.append(LabeledArticle(aid, mean, label, False, masked_id=aid))
    return AggregateResult(labeled=labeled, conflicted=conflicted)


LABELS_HEADER = ["article_id", "mean_score", "label", "conflicted"]


def write_labels(result: AggregateResult, path: str | Path) -> None:
    """Labels CSV; conflicted articles appear with an empty label cell."""
    rows = sorted(result.labeled + result.conflicted, key=lambda a: a.article_id)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LABELS_HEADER)
        for art in rows:
            writer.writerow(
                [
                    art.article_id,
                    repr(float(art.mean_score)),
                    art.label.value if art.label else "",
                    "true" if art.conflicted else "false",
                ]
            )


def read_labels(path: str | Path) -> dict[str, Label]:
    """article_id -> label for the non-conflicted rows of a labels CSV."""
    labels: dict[str, Label] = {}
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row["conflicted"] == "true" or not row["label"]:
                continue
            labels[row["article_id"]] = Label(row["label"])
    return labels
