"""Splitting, accuracy metrics, score correlation and report tables.

Evaluation rows are keyed by (method, text_field, segment) and carry a
six-cell confusion: each gold polarity splits into predicted-positive,
predicted-negative and no-prediction counts.  Articles a scorer cannot
decide (no matched words, compound exactly zero, tied counts) land in
the no-prediction cells and count against accuracy.

Two table layouts are rendered: a lexicon layout with one column per
(text_field, segment) cell labelled A-F, and a model layout with
train/test accuracy for each text field.  Both also serialize to CSV
that parses back to the identical rows.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from operator import attrgetter
from pathlib import Path
from typing import Callable, Hashable, Mapping, Sequence, TypeVar

from .corpus import NewsArticle
from .lexicon import SentimentScore
from .sampling import Label
from .seeding import derive_seed

T = TypeVar("T")

TEXT_FIELDS = ("headline_synopsis", "full_text")
SEGMENTS = ("financial", "non_financial", "all")

# (text_field, segment) behind each lexicon-table column
LEXICON_TABLE_CELLS = (
    ("A", "headline_synopsis", "financial"),
    ("B", "full_text", "financial"),
    ("C", "headline_synopsis", "non_financial"),
    ("D", "full_text", "non_financial"),
    ("E", "full_text", "all"),
    ("F", "headline_synopsis", "all"),
)


class SplitError(ValueError):
    """The dataset cannot be split as requested."""


def split(
    dataset: Sequence[T],
    test_fraction: float | Fraction,
    seed: int,
    label_of: Callable[[T], Hashable] = attrgetter("label"),
) -> tuple[list[T], list[T]]:
    """Label-stratified, seeded, disjoint and exhaustive train/test split.

    Each class contributes round(count * test_fraction) test items,
    clamped so every class appears on both sides.  Input order is
    preserved within each side.
    """
    if not isinstance(test_fraction, Fraction):
        test_fraction = Fraction(str(test_fraction))
    if not 0 < test_fraction < 1:
        raise SplitError(f"test_fraction must be in (0, 1), got {test_fraction}")
    groups: dict[Hashable, list[int]] = {}
    for idx, item in enumerate(dataset):
        groups.setdefault(label_of(item), []).append(idx)
    if not groups:
        raise SplitError("cannot split an empty dataset")
    rng = random.Random(derive_seed(seed, "eval-split"))
    test_idx: set[int] = set()
    for key in sorted(groups, key=str):
        members = groups[key]
        if len(members) < 2:
            raise SplitError(f"class {key!r} has {len(members)} member(s); need at least 2")
        take = min(max(round(len(members) * test_fraction), 1), len(members) - 1)
        test_idx.update(rng.sample(members, take))
    train = [dataset[i] for i in range(len(dataset)) if i not in test_idx]
    test = [dataset[i] for i in sorted(test_idx)]
    return train, test


def accuracy(predictions: Sequence, labels: Sequence) -> Fraction:
    """Exact fraction of positions where prediction equals label."""
    if len(predictions) != len(labels):
        raise ValueError(f"{len(predictions)} predictions vs {len(labels)} labels")
    if not labels:
        raise ValueError("nothing to score")
    correct = sum(1 for p, l in zip(predictions, labels) if p == l)
    return Fraction(correct, len(labels))


@dataclass(frozen=True)
class EvalRow:
    """One evaluation cell: a method on one text field and segment."""

    method: str
    text_field: str
    segment: str
    n: int
    # gold positive: (pred pos, pred neg, none), then gold negative
    confusion: tuple[int, int, int, int, int, int]
    test_accuracy: float
    train_accuracy: float | None = None

    def __post_init__(self) -> None:
        if self.text_field not in TEXT_FIELDS:
            raise ValueError(f"unknown text_field {self.text_field!r}")
        if self.segment not in SEGMENTS:
            raise ValueError(f"unknown segment {self.segment!r}")
        if len(self.confusion) != 6 or any(c < 0 for c in self.confusion):
            raise ValueError("confusion must be six nonnegative counts")
        if sum(self.confusion) != self.n:
            raise ValueError(f"confusion sums to {sum(self.confusion)}, n is {self.n}")
        for value in (self.test_accuracy, self.train_accuracy):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"accuracy {value} outside [0, 1]")

    @property
    def no_signal_count(self) -> int:
        return self.confusion[2] + self.confusion[5]


def predicted_label(score: SentimentScore) -> Label | None:
    """Sign rule shared by both scorer families; None when undecided.

    The heuristic engine decides by compound (exactly zero reads as no
    signal); the counting engine by polarity.
    """
    if score.no_signal:
        return None
    value = score.compound if score.compound is not None else score.polarity
    if value > 0:
        return Label.POSITIVE
    if value < 0:
        return Label.NEGATIVE
    return None


def confusion_counts(
    gold: Sequence[Label], predicted: Sequence[Label | None]
) -> tuple[int, int, int, int, int, int]:
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted differ in length")
    cells = {(g, p): 0 for g in (Label.POSITIVE, Label.NEGATIVE) for p in (Label.POSITIVE, Label.NEGATIVE, None)}
    for g, p in zip(gold, predicted):
        cells[(g, p)] += 1
    return (
        cells[(Label.POSITIVE, Label.POSITIVE)],
        cells[(Label.POSITIVE, Label.NEGATIVE)],
        cells[(Label.POSITIVE, None)],
        cells[(Label.NEGATIVE, Label.POSITIVE)],
        cells[(Label.NEGATIVE, Label.NEGATIVE)],
        cells[(Label.NEGATIVE, None)],
    )


def classification_row(
    method: str,
    text_field: str,
    segment: str,
    gold: Sequence[Label],
    predicted: Sequence[Label | None],
    train_accuracy: float | None = None,
) -> EvalRow:
    """Score any predictor's output; undecided predictions are wrong."""
    if not gold:
        raise ValueError("nothing to evaluate")
    conf = confusion_counts(gold, predicted)
    acc = float(accuracy(predicted, gold))
    return EvalRow(
        method=method,
        text_field=text_field,
        segment=segment,
        n=len(gold),
        confusion=conf,
        test_accuracy=acc,
        train_accuracy=train_accuracy,
    )


def lexicon_accuracy(
    labeled: Sequence[tuple[NewsArticle, Label]],
    scorer: Callable[[str], SentimentScore],
    text_field: str,
    method: str,
    segment: str = "all",
) -> EvalRow:
    """Run a lexicon scorer over labeled articles and build its row."""
    if not labeled:
        raise ValueError("no labeled articles to evaluate")
    if text_field not in TEXT_FIELDS:
        raise ValueError(f"unknown text_field {text_field!r}")
    gold: list[Label] = []
    predicted: list[Label | None] = []
    for article, label in labeled:
        text = getattr(article, text_field)
        if not text:
            raise ValueError(f"article {article.id} has no {text_field}")
        gold.append(label)
        predicted.append(predicted_label(scorer(text)))
    return classification_row(method, text_field, segment, gold, predicted)


@dataclass(frozen=True)
class CorrelationMatrix:
    methods: tuple[str, ...]
    values: tuple[tuple[float | None, ...], ...]  # None marks undefined

    def value(self, a: str, b: str) -> float | None:
        return self.values[self.methods.index(a)][self.methods.index(b)]


def _pearson(x: Sequence[float | None], y: Sequence[float | None]) -> float | None:
    pairs = [(a, b) for a, b in zip(x, y) if a is not None and b is not None]
    if len(pairs) < 2:
        return None
    n = len(pairs)
    mx = sum(a for a, _ in pairs) / n
    my = sum(b for _, b in pairs) / n
    sxx = sum((a - mx) ** 2 for a, _ in pairs)
    syy = sum((b - my) ** 2 for _, b in pairs)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = sum((a - mx) * (b - my) for a, b in pairs)
    return sxy / math.sqrt(sxx * syy)


def correlate(scores: Mapping[str, Sequence[float | None]]) -> CorrelationMatrix:
    """Pairwise Pearson correlation over positions both methods scored.

    The diagonal is exactly 1.0 and the matrix exactly symmetric;
    zero-variance or under-populated pairs come back as None instead of
    NaN.
    """
    methods = tuple(scores)
    if not methods:
        raise ValueError("no score vectors given")
    lengths = {m: len(scores[m]) for m in methods}
    if len(set(lengths.values())) > 1:
        raise ValueError(f"score vectors differ in length: {lengths}")
    if lengths[methods[0]] < 2:
        raise ValueError("score vectors must have at least 2 entries")
    size = len(methods)
    grid: list[list[float | None]] = [[None] * size for _ in range(size)]
    for i in range(size):
        grid[i][i] = 1.0
        for j in range(i + 1, size):
            r = _pearson(scores[methods[i]], scores[methods[j]])
            grid[i][j] = r
            grid[j][i] = r
    return CorrelationMatrix(methods=methods, values=tuple(tuple(row) for row in grid))


def _aligned(rows: list[list[str]]) -> str:
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows
    )


def render_lexicon_table(rows: Sequence[EvalRow]) -> str:
    """Aligned text, one method per line, columns A-F as percentages."""
    methods: list[str] = []
    cells: dict[tuple[str, str, str], EvalRow] = {}
    for row in rows:
        if row.method not in methods:
            methods.append(row.method)
        cells[(row.method, row.text_field, row.segment)] = row
    table = [["Name"] + [tag for tag, _, _ in LEXICON_TABLE_CELLS]]
    for method in methods:
        line = [method]
        for _, field, segment in LEXICON_TABLE_CELLS:
            row = cells.get((method, field, segment))
            line.append(f"{row.test_accuracy * 100:.1f}" if row else "-")
        table.append(line)
    legend = [f"{tag}: {field}, {segment}" for tag, field, segment in LEXICON_TABLE_CELLS]
    return _aligned(table) + "\n\n" + "\n".join(legend) + "\n"


def render_model_table(rows: Sequence[EvalRow]) -> str:
    """Aligned text with train/test accuracy per text field."""
    columns = [
        ("train", "full_text", "Train (full_text)"),
        ("test", "full_text", "Test (full_text)"),
        ("train", "headline_synopsis", "Train (headline_synopsis)"),
        ("test", "headline_synopsis", "Test (headline_synopsis)"),
    ]
    methods: list[str] = []
    cells: dict[tuple[str, str], EvalRow] = {}
    for row in rows:
        if row.method not in methods:
            methods.append(row.method)
        cells[(row.method, row.text_field)] = row
    table = [["Model"] + [header for _, _, header in columns]]
    for method in methods:
        line = [method]
        for which, field, _ in columns:
            row = cells.get((method, field))
            value = None
            if row is not None:
                value = row.train_accuracy if which == "train" else row.test_accuracy
            line.append("-" if value is None else f"{value:.2f}")
        table.append(line)
    return _aligned(table) + "\n"


def render_correlation(matrix: CorrelationMatrix) -> str:
    table = [["method"] + list(matrix.methods)]
    for name, row in zip(matrix.methods, matrix.values):
        table.append([name] + ["undefined" if v is None else f"{v:.4f}" for v in row])
    return _aligned(table) + "\n"


_REPORT_HEADER = [
    "method", "text_field", "segment", "n",
    "train_accuracy", "test_accuracy",
    "gold_pos_pred_pos", "gold_pos_pred_neg", "gold_pos_none",
    "gold_neg_pred_pos", "gold_neg_pred_neg", "gold_neg_none",
]


def write_report_csv(rows: Sequence[EvalRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_REPORT_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.method, row.text_field, row.segment, row.n,
                    "" if row.train_accuracy is None else repr(row.train_accuracy),
                    repr(row.test_accuracy),
                ]
                + [str(c) for c in row.confusion]
            )


def read_report_csv(path: str | Path) -> list[EvalRow]:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _REPORT_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for rec in reader:
            rows.append(
                EvalRow(
                    method=rec[0],
                    text_field=rec[1],
                    segment=rec[2],
                    n=int(rec[3]),
                    confusion=tuple(int(c) for c in rec[6:12]),
                    test_accuracy=float(rec[5]),
                    train_accuracy=None if rec[4] == "" else float(rec[4]),
                )
            )
    return rows


def write_correlation_csv(matrix: CorrelationMatrix, path: str | Path) -> None:
    """Undefined correlations serialize as empty cells."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method"] + list(matrix.methods))
        for name, row in zip(matrix.methods, matrix.values):
            writer.writerow([name] + ["" if v is None else repr(v) for v in row])


def read_correlation_csv(path: str | Path) -> CorrelationMatrix:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "method":
            raise ValueError(f"{path}: unexpected header {header}")
        methods = tuple(header[1:])
        values = []
        for rec in reader:
            values.append(tuple(None if cell == "" else float(cell) for cell in rec[1:]))
    return CorrelationMatrix(methods=methods, values=tuple(values))
