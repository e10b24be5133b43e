"""TF-IDF bag-of-words features over token lists.

Raw term counts are weighted by the smoothed inverse document
frequency idf(t) = ln((1 + n) / (1 + df(t))) + 1 and each document
vector is L2-normalised.  Documents are token lists; tokenisation and
cleaning happen upstream.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseVector:
    """Sorted-coordinate sparse row of a fixed-dimension space."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    dim: int

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if any(i < 0 or i >= self.dim for i in self.indices):
            raise ValueError("index out of range")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))

    def dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        if self.indices:
            out[list(self.indices)] = self.values
        return out


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]  # term -> column, in first-seen order
    idf: np.ndarray
    doc_count: int

    def __post_init__(self) -> None:
        if len(self.idf) != len(self.vocabulary):
            raise ValueError("idf length must match vocabulary size")

    @property
    def dim(self) -> int:
        return len(self.vocabulary)


def fit_tfidf(docs: Sequence[Sequence[str]]) -> TfidfModel:
    """Learn vocabulary and idf weights from tokenised documents."""
    if not docs:
        raise ValueError("no documents to fit")
    if all(len(doc) == 0 for doc in docs):
        raise ValueError("every document is empty")
    vocabulary: dict[str, int] = {}
    df = Counter()
    for doc in docs:
        for term in doc:
            if term not in vocabulary:
                vocabulary[term] = len(vocabulary)
        df.update(set(doc))
    n = len(docs)
    if len(vocabulary) > n:
        logger.warning(
            "vocabulary (%d terms) larger than corpus (%d docs); idf weights "
            "will be nearly uniform",
            len(vocabulary),
            n,
        )
    idf = np.empty(len(vocabulary))
    for term, j in vocabulary.items():
        idf[j] = math.log((1 + n) / (1 + df[term])) + 1.0
    return TfidfModel(vocabulary=vocabulary, idf=idf, doc_count=n)


def transform_tfidf(model: TfidfModel, doc: Sequence[str]) -> SparseVector:
    """Weight raw counts by idf and L2-normalise; unseen terms are ignored."""
    counts = Counter(t for t in doc if t in model.vocabulary)
    indices = sorted(model.vocabulary[t] for t in counts)
    values = np.array(
        [counts[t] * model.idf[model.vocabulary[t]] for t in sorted(counts, key=model.vocabulary.get)]
    )
    norm = float(np.sqrt((values * values).sum()))
    if norm > 0:
        values = values / norm
    return SparseVector(indices=tuple(indices), values=tuple(float(v) for v in values), dim=model.dim)


def transform_corpus(model: TfidfModel, docs: Iterable[Sequence[str]]) -> list[SparseVector]:
    return [transform_tfidf(model, doc) for doc in docs]


def stack_dense(vectors: Sequence[SparseVector]) -> np.ndarray:
    """Dense matrix view of sparse rows (classifiers work on this)."""
    if not vectors:
        raise ValueError("no vectors to stack")
    dim = vectors[0].dim
    if any(v.dim != dim for v in vectors):
        raise ValueError("vectors disagree on dimension")
    out = np.zeros((len(vectors), dim))
    for i, v in enumerate(vectors):
        if v.indices:
            out[i, list(v.indices)] = v.values
    return out


def save_tfidf(model: TfidfModel, path: str | Path) -> None:
    """CSV of term,index,idf prefixed with a doc_count metadata line."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# doc_count={model.doc_count}\n")
        writer = csv.writer(fh)
        writer.writerow(["term", "index", "idf"])
        for term, j in sorted(model.vocabulary.items(), key=lambda kv: kv[1]):
            writer.writerow([term, j, repr(float(model.idf[j]))])


def load_tfidf(path: str | Path) -> TfidfModel:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# doc_count="):
            raise ValueError(f"{path}: missing doc_count metadata line")
        doc_count = int(first.split("=", 1)[1])
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["term", "index", "idf"]:
            raise ValueError(f"{path}: unexpected header {header}")
        vocabulary: dict[str, int] = {}
        pairs: list[tuple[int, float]] = []
        for term, j, idf in reader:
            vocabulary[term] = int(j)
            pairs.append((int(j), float(idf)))
    idf_arr = np.empty(len(pairs))
    for j, value in pairs:
        idf_arr[j] = value
    return TfidfModel(vocabulary=vocabulary, idf=idf_arr, doc_count=doc_count)
