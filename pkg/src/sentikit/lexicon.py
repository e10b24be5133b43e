"""Sentiment lexicons: loading, counting-style scoring, merging, diffing.

Two scales coexist.  Finance word lists mark words as positive or
negative (valence -1/+1) with extra non-scoring categories such as
litigious or uncertainty; general-purpose valence lists grade words on
a -4..+4 scale.  Merges translate one vocabulary into the other's scale
so each engine can run with the other's coverage.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class Scale(str, Enum):
    PLUS_MINUS_4 = "plus_minus_4"
    PLUS_MINUS_1 = "plus_minus_1"


class WordCategory(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    LITIGIOUS = "litigious"
    UNCERTAINTY = "uncertainty"
    STRONG_MODAL = "strong_modal"
    WEAK_MODAL = "weak_modal"


class LexiconFormatError(ValueError):
    """A lexicon file violates its format (duplicates, bad rows, bad range)."""


@dataclass(frozen=True)
class Lexicon:
    """Immutable word->valence map plus optional non-scoring category tags.

    On the plus_minus_1 scale, entries hold only the scoring words
    (valence exactly -1 or +1); category-only words (litigious,
    uncertainty, modals) live in ``category_tags`` with no entry, which
    is how they carry zero weight in scoring while still counting as
    members of the word list.
    """

    name: str
    entries: Mapping[str, float]
    scale: Scale
    category_tags: Mapping[str, WordCategory] = field(default_factory=dict)

    def __post_init__(self) -> None:
        lo, hi = (-4.0, 4.0) if self.scale is Scale.PLUS_MINUS_4 else (-1.0, 1.0)
        for word, valence in self.entries.items():
            if not lo <= valence <= hi:
                raise LexiconFormatError(
                    f"{self.name}: valence {valence} for {word!r} outside [{lo}, {hi}]"
                )
            if self.scale is Scale.PLUS_MINUS_1 and valence not in (-1.0, 1.0):
                raise LexiconFormatError(
                    f"{self.name}: plus_minus_1 valence must be -1 or +1, got "
                    f"{valence} for {word!r}"
                )

    def words(self) -> set[str]:
        """Every member word, scoring or category-only."""
        return set(self.entries) | set(self.category_tags)

    def valence(self, word: str) -> float:
        return self.entries.get(word, 0.0)

    def __len__(self) -> int:
        return len(self.words())


@dataclass(frozen=True)
class SentimentScore:
    """Counts plus derived polarity/subjectivity for one text.

    ``compound`` is set only by the heuristic engine; ``no_signal``
    means no scoring word matched, so the polarity carries no
    information.
    """

    pos_count: int
    neg_count: int
    token_count: int
    polarity: float
    subjectivity: float
    no_signal: bool
    compound: float | None = None
    pos_prop: float | None = None
    neg_prop: float | None = None
    neu_prop: float | None = None

    @classmethod
    def from_counts(
        cls,
        pos_count: int,
        neg_count: int,
        token_count: int,
        compound: float | None = None,
        pos_prop: float | None = None,
        neg_prop: float | None = None,
        neu_prop: float | None = None,
    ) -> "SentimentScore":
        hits = pos_count + neg_count
        polarity = (pos_count - neg_count) / hits if hits else 0.0
        subjectivity = hits / token_count if token_count else 0.0
        return cls(
            pos_count=pos_count,
            neg_count=neg_count,
            token_count=token_count,
            polarity=polarity,
            subjectivity=subjectivity,
            no_signal=hits == 0,
            compound=compound,
            pos_prop=pos_prop,
            neg_prop=neg_prop,
            neu_prop=neu_prop,
        )


def score_counting(tokens: Sequence[str], lexicon: Lexicon) -> SentimentScore:
    """Count matched positive/negative words; no ordering heuristics.

    polarity = (pos - neg) / (pos + neg), subjectivity = (pos + neg) / n,
    both zero (with no_signal set) when nothing matches.
    """
    if lexicon.scale is not Scale.PLUS_MINUS_1:
        raise ValueError("counting scorer expects a plus_minus_1 lexicon")
    pos = neg = 0
    for token in tokens:
        valence = lexicon.entries.get(token, 0.0)
        if valence > 0:
            pos += 1
        elif valence < 0:
            neg += 1
    return SentimentScore.from_counts(pos, neg, len(tokens))


_LM_HEADER = [
    "Word",
    "Positive",
    "Negative",
    "Litigious",
    "Uncertainty",
    "Strong_Modal",
    "Weak_Modal",
]

_LM_CATEGORY_ORDER = [
    ("Positive", WordCategory.POSITIVE),
    ("Negative", WordCategory.NEGATIVE),
    ("Litigious", WordCategory.LITIGIOUS),
    ("Uncertainty", WordCategory.UNCERTAINTY),
    ("Strong_Modal", WordCategory.STRONG_MODAL),
    ("Weak_Modal", WordCategory.WEAK_MODAL),
]


def _load_vader_tsv(path: Path, name: str, on_duplicate: str = "error") -> Lexicon:
    """``on_duplicate="last"`` mirrors the reference loader, which silently
    keeps a later line; the published word file itself repeats a handful
    of emoticon entries, so scoring fidelity requires last-wins there."""
    entries: dict[str, float] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) < 2:
                raise LexiconFormatError(f"{path}:{lineno}: expected word<TAB>valence")
            word, raw = fields[0], fields[1]
            if word in entries and on_duplicate == "error":
                raise LexiconFormatError(f"{path}:{lineno}: duplicate word {word!r}")
            try:
                entries[word] = float(raw)
            except ValueError as exc:
                raise LexiconFormatError(f"{path}:{lineno}: bad valence {raw!r}") from exc
    return Lexicon(name=name, entries=entries, scale=Scale.PLUS_MINUS_4)


def _truthy_cell(cell: str, where: str) -> bool:
    cell = cell.strip()
    if not cell:
        return False
    try:
        return float(cell) != 0.0
    except ValueError as exc:
        raise LexiconFormatError(f"{where}: non-numeric membership cell {cell!r}") from exc


def _load_lm_csv(path: Path, name: str) -> Lexicon:
    """Words are lowercased on load; master lists ship uppercase."""
    entries: dict[str, float] = {}
    tags: dict[str, WordCategory] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in _LM_HEADER if c not in header]
        if missing:
            raise LexiconFormatError(f"{path}: header lacks columns {missing}")
        for lineno, row in enumerate(reader, start=2):
            word = (row["Word"] or "").strip().lower()
            if not word:
                raise LexiconFormatError(f"{path}:{lineno}: empty word")
            if word in tags:
                raise LexiconFormatError(f"{path}:{lineno}: duplicate word {word!r}")
            where = f"{path}:{lineno}"
            member = [
                category
                for column, category in _LM_CATEGORY_ORDER
                if _truthy_cell(row[column] or "", where)
            ]
            if WordCategory.POSITIVE in member and WordCategory.NEGATIVE in member:
                raise LexiconFormatError(f"{where}: {word!r} marked both positive and negative")
            if not member:
                continue
            tags[word] = member[0]
            if WordCategory.POSITIVE in member:
                entries[word] = 1.0
            elif WordCategory.NEGATIVE in member:
                entries[word] = -1.0
    return Lexicon(name=name, entries=entries, scale=Scale.PLUS_MINUS_1, category_tags=tags)


def _load_valence_csv(path: Path, name: str, scale: Scale | None) -> Lexicon:
    entries: dict[str, float] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or row == ["word", "valence"]:
                continue
            if len(row) != 2:
                raise LexiconFormatError(f"{path}:{lineno}: expected word,valence")
            word, raw = row
            if word in entries:
                raise LexiconFormatError(f"{path}:{lineno}: duplicate word {word!r}")
            entries[word] = float(raw)
    if scale is None:
        all_unit = all(v in (-1.0, 1.0) for v in entries.values())
        scale = Scale.PLUS_MINUS_1 if all_unit else Scale.PLUS_MINUS_4
    return Lexicon(name=name, entries=entries, scale=scale)


def load_lexicon(
    path: str | Path,
    fmt: str,
    name: str | None = None,
    scale: Scale | None = None,
    on_duplicate: str = "error",
) -> Lexicon:
    """Load ``vader_tsv``, ``lm_csv``, or two-column ``valence_csv`` files."""
    path = Path(path)
    name = name or path.stem
    if fmt == "vader_tsv":
        return _load_vader_tsv(path, name, on_duplicate)
    if fmt == "lm_csv":
        return _load_lm_csv(path, name)
    if fmt == "valence_csv":
        return _load_valence_csv(path, name, scale)
    raise ValueError(f"unknown lexicon format {fmt!r}")


def bundled_vader_lexicon() -> Lexicon:
    path = resources.files("sentikit.data").joinpath("vader_lexicon.txt")
    with resources.as_file(path) as real:
        return _load_vader_tsv(Path(real), "vader", on_duplicate="last")


def bundled_demo_lm_lexicon() -> Lexicon:
    path = resources.files("sentikit.data").joinpath("lm_demo.csv")
    with resources.as_file(path) as real:
        return _load_lm_csv(Path(real), "lm_demo")


def merge_lm_in_vader(vader: Lexicon, lm: Lexicon) -> Lexicon:
    """Finance words override the general list, on the -4..+4 scale.

    Every word of the finance list takes its finance valence (category-
    only words take 0.0, deliberately neutralising any general-lexicon
    valence); words only the general list knows keep their valence.
    """
    if vader.scale is not Scale.PLUS_MINUS_4 or lm.scale is not Scale.PLUS_MINUS_1:
        raise ValueError("expected a plus_minus_4 base and a plus_minus_1 overlay")
    entries = dict(vader.entries)
    for word in sorted(lm.words()):
        entries[word] = lm.valence(word)
    return Lexicon(
        name=f"{lm.name}_in_{vader.name}",
        entries=entries,
        scale=Scale.PLUS_MINUS_4,
        category_tags=dict(lm.category_tags),
    )


def merge_vader_in_lm(lm: Lexicon, vader: Lexicon) -> Lexicon:
    """General-list words join the finance list as bare signs (-1/+1).

    Finance words keep their own valence (category-only words stay
    category-only); general-list words with valence 0 are not added.
    """
    if vader.scale is not Scale.PLUS_MINUS_4 or lm.scale is not Scale.PLUS_MINUS_1:
        raise ValueError("expected a plus_minus_1 base and a plus_minus_4 overlay")
    entries = dict(lm.entries)
    lm_words = lm.words()
    for word in sorted(vader.entries):
        if word in lm_words:
            continue
        valence = vader.entries[word]
        if valence > 0:
            entries[word] = 1.0
        elif valence < 0:
            entries[word] = -1.0
    return Lexicon(
        name=f"{vader.name}_in_{lm.name}",
        entries=entries,
        scale=Scale.PLUS_MINUS_1,
        category_tags=dict(lm.category_tags),
    )


@dataclass(frozen=True)
class LexiconDiff:
    """Overlap counts between a left and a right lexicon.

    Signs come from each side's valence; zero-valence members (category-
    only words) count toward common/exclusive word totals but toward no
    sign bucket, which is why common_words can exceed common_negative +
    common_positive.
    """

    common_words: int
    common_negative: int
    common_positive: int
    left_negative_right_positive: int
    left_positive_right_negative: int
    exclusive_left: int
    exclusive_right: int


def diff_lexicons(left: Lexicon, right: Lexicon) -> LexiconDiff:
    left_words = left.words()
    right_words = right.words()
    common = left_words & right_words
    counts = Counter()
    for word in common:
        lv = left.valence(word)
        rv = right.valence(word)
        if lv < 0 and rv < 0:
            counts["neg_neg"] += 1
        elif lv > 0 and rv > 0:
            counts["pos_pos"] += 1
        elif lv < 0 and rv > 0:
            counts["neg_pos"] += 1
        elif lv > 0 and rv < 0:
            counts["pos_neg"] += 1
    return LexiconDiff(
        common_words=len(common),
        common_negative=counts["neg_neg"],
        common_positive=counts["pos_pos"],
        left_negative_right_positive=counts["neg_pos"],
        left_positive_right_negative=counts["pos_neg"],
        exclusive_left=len(left_words - right_words),
        exclusive_right=len(right_words - left_words),
    )


def export_valence_csv(lexicon: Lexicon, path: str | Path) -> None:
    """Two-column word,valence export, sorted by word for stable bytes."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "valence"])
        for word in sorted(lexicon.entries):
            writer.writerow([word, repr(lexicon.entries[word])])
