"""Classical classifiers over bag-of-words vectors, written from scratch.

Implements multinomial naive bayes, a CART-style decision tree on Gini
impurity, and bootstrap ensembles (bagging and random forest) that vote
over trees.  Labels are binary: 0 = negative, 1 = positive.  All ties
(leaf majorities, posterior argmax, ensemble votes) resolve to 0 so the
same inputs always give the same outputs.

Split search is exact: candidate thresholds are midpoints between
consecutive distinct observed values, scored in float for speed, and
candidates within a tiny window of the float optimum are re-compared
with rational arithmetic before tie-breaking on (feature, threshold).

Models serialize to JSON, one document per model:

    {"format": "classifier", "version": 1, "model": "tree", ...}

Tree nodes are nested records, either
``{"kind": "split", "feature": f, "threshold": t, "left": ..., "right": ...}``
or ``{"kind": "leaf", "label": c, "counts": [n0, n1]}``.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .features import SparseVector, stack_dense
from .seeding import derive_seed

# Candidates this close (in float) to the best split score are re-ranked
# exactly; float error on the score is orders of magnitude smaller.
_SPLIT_SCORE_WINDOW = 1e-9

NEGATIVE_CLASS = 0
POSITIVE_CLASS = 1


@dataclass(frozen=True)
class LeafNode:
    label: int
    counts: tuple[int, int]  # (negative, positive) training rows


@dataclass(frozen=True)
class SplitNode:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[LeafNode, SplitNode]


@dataclass(frozen=True)
class TreeModel:
    root: TreeNode
    n_features: int
    max_depth: int


@dataclass(frozen=True)
class NaiveBayesModel:
    log_priors: tuple[float, float]
    log_likelihoods: tuple[tuple[float, ...], tuple[float, ...]]
    alpha: float

    @property
    def n_features(self) -> int:
        return len(self.log_likelihoods[0])


@dataclass(frozen=True)
class EnsembleModel:
    trees: tuple[TreeModel, ...]
    kind: str  # "bagging" or "random_forest"
    features_per_split: int | None
    seed: int
    n_features: int

    def __post_init__(self) -> None:
        if self.kind not in ("bagging", "random_forest"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "bagging" and self.features_per_split is not None:
            raise ValueError("bagging considers every feature at each split")
        if self.kind == "random_forest" and self.features_per_split is None:
            raise ValueError("random_forest requires features_per_split")


ClassicalModel = Union[TreeModel, NaiveBayesModel, EnsembleModel]


def _as_matrix(X: Sequence[SparseVector] | np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    if isinstance(X, np.ndarray):
        out = np.asarray(X, dtype=float)
    elif len(X) and isinstance(X[0], SparseVector):
        out = stack_dense(X)
    else:
        out = np.asarray(X, dtype=float)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-d design matrix, got shape {out.shape}")
    return out


def _as_labels(y: Sequence[int]) -> np.ndarray:
    arr = np.asarray(y, dtype=int)
    if arr.ndim != 1:
        raise ValueError("labels must be a flat sequence")
    bad = set(np.unique(arr)) - {0, 1}
    if bad:
        raise ValueError(f"labels must be 0 or 1, found {sorted(bad)}")
    return arr


def fit_nb(
    X: Sequence[SparseVector] | np.ndarray,
    y: Sequence[int],
    alpha: float = 1.0,
) -> NaiveBayesModel:
    """Multinomial naive bayes with additive smoothing.

    Feature values act as nonnegative pseudo-counts, so tf-idf weights
    feed in directly.  Both classes must appear in ``y``.
    """
    mat = _as_matrix(X)
    labels = _as_labels(y)
    if len(mat) != len(labels):
        raise ValueError("X and y differ in length")
    if len(labels) == 0:
        raise ValueError("empty training set")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if (mat < 0).any():
        raise ValueError("naive bayes requires nonnegative feature values")
    counts = np.bincount(labels, minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise ValueError("both classes must appear in the training labels")
    log_priors = []
    log_liks = []
    for c in (0, 1):
        totals = mat[labels == c].sum(axis=0) + alpha
        log_liks.append(tuple(float(v) for v in np.log(totals) - math.log(totals.sum())))
        log_priors.append(math.log(counts[c] / len(labels)))
    return NaiveBayesModel(
        log_priors=(log_priors[0], log_priors[1]),
        log_likelihoods=(log_liks[0], log_liks[1]),
        alpha=float(alpha),
    )


def nb_log_posterior(model: NaiveBayesModel, X: Sequence[SparseVector] | np.ndarray) -> np.ndarray:
    """Unnormalised log posterior per row, columns ordered (negative, positive)."""
    mat = _as_matrix(X)
    if mat.shape[1] != model.n_features:
        raise ValueError(
            f"feature dimension {mat.shape[1]} does not match model ({model.n_features})"
        )
    lik = np.asarray(model.log_likelihoods)
    return np.asarray(model.log_priors) + mat @ lik.T


def _best_split(
    mat: np.ndarray, labels: np.ndarray, feature_indices: Iterable[int]
) -> tuple[int, float] | None:
    """Exhaustive Gini split over midpoint thresholds of the given features.

    Minimising weighted Gini over a binary split is equivalent to
    minimising  n0L*n1L/nL + n0R*n1R/nR,  which stays in integers until
    the final divisions, so near-ties are settled with Fractions.
    """
    n = len(labels)
    total_pos = int(labels.sum())
    per_feature: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, int]] = []
    for f in feature_indices:
        col = mat[:, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        sy = labels[order]
        boundary = np.nonzero(sv[1:] != sv[:-1])[0]
        if not len(boundary):
            continue
        cum_pos = np.cumsum(sy)
        n_left = boundary + 1
        n1_left = cum_pos[boundary]
        n0_left = n_left - n1_left
        n_right = n - n_left
        n1_right = total_pos - n1_left
        n0_right = n_right - n1_right
        score = n0_left * n1_left / n_left + n0_right * n1_right / n_right
        thresholds = (sv[boundary] + sv[boundary + 1]) / 2.0
        keep = score <= score.min() + _SPLIT_SCORE_WINDOW
        per_feature.append(
            (score[keep], thresholds[keep], n0_left[keep], n1_left[keep], f)
        )
    if not per_feature:
        return None
    global_min = min(float(entry[0].min()) for entry in per_feature)
    best: tuple[Fraction, int, float] | None = None
    for score, thresholds, n0_left, n1_left, f in per_feature:
        for s, t, a, b in zip(score, thresholds, n0_left, n1_left):
            if s > global_min + _SPLIT_SCORE_WINDOW:
                continue
            n_l = int(a) + int(b)
            n_r = n - n_l
            a_r = (n - total_pos) - int(a)
            b_r = total_pos - int(b)
            exact = Fraction(int(a) * int(b), n_l) + Fraction(a_r * b_r, n_r)
            key = (exact, f, float(t))
            if best is None or key < best:
                best = key
    assert best is not None
    return best[1], best[2]


def _leaf(labels: np.ndarray) -> LeafNode:
    n1 = int(labels.sum())
    n0 = len(labels) - n1
    return LeafNode(label=NEGATIVE_CLASS if n0 >= n1 else POSITIVE_CLASS, counts=(n0, n1))


def _grow(
    mat: np.ndarray,
    labels: np.ndarray,
    depth: int,
    max_depth: int,
    min_samples_split: int,
    rng: random.Random | None,
    features_per_split: int | None,
) -> TreeNode:
    n1 = int(labels.sum())
    if n1 == 0 or n1 == len(labels):  # pure
        return _leaf(labels)
    if depth >= max_depth or len(labels) < min_samples_split:
        return _leaf(labels)
    n_features = mat.shape[1]
    if features_per_split is None:
        candidates: Iterable[int] = range(n_features)
    else:
        assert rng is not None
        candidates = sorted(rng.sample(range(n_features), min(features_per_split, n_features)))
    found = _best_split(mat, labels, candidates)
    if found is None:  # constant features, nothing to cut on
        return _leaf(labels)
    feature, threshold = found
    go_left = mat[:, feature] <= threshold
    return SplitNode(
        feature=feature,
        threshold=threshold,
        left=_grow(mat[go_left], labels[go_left], depth + 1, max_depth, min_samples_split, rng, features_per_split),
        right=_grow(mat[~go_left], labels[~go_left], depth + 1, max_depth, min_samples_split, rng, features_per_split),
    )


def fit_tree(
    X: Sequence[SparseVector] | np.ndarray,
    y: Sequence[int],
    max_depth: int,
    min_samples_split: int = 2,
    rng: random.Random | None = None,
    features_per_split: int | None = None,
) -> TreeModel:
    """Greedy CART on Gini impurity.

    Zero-gain splits are still taken while the node is impure and depth
    remains, which lets depth-2 trees solve XOR-style interactions.
    Ties between splits go to the lowest feature index, then the lowest
    threshold.  Rows with value <= threshold go left.
    """
    mat = _as_matrix(X)
    labels = _as_labels(y)
    if len(mat) != len(labels):
        raise ValueError("X and y differ in length")
    if len(labels) == 0:
        raise ValueError("empty training set")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    if min_samples_split < 2:
        raise ValueError("min_samples_split must be at least 2")
    if features_per_split is not None:
        if features_per_split < 1:
            raise ValueError("features_per_split must be at least 1")
        if rng is None:
            raise ValueError("feature subsampling needs a seeded rng")
    root = _grow(mat, labels, 0, max_depth, min_samples_split, rng, features_per_split)
    return TreeModel(root=root, n_features=mat.shape[1], max_depth=max_depth)


def fit_ensemble(
    X: Sequence[SparseVector] | np.ndarray,
    y: Sequence[int],
    kind: str,
    n_trees: int,
    max_depth: int,
    seed: int,
    min_samples_split: int = 2,
    bootstrap: bool = True,
) -> EnsembleModel:
    """Bootstrap ensemble of trees; random_forest also subsamples features.

    Every tree draws from its own deterministically derived seed, so
    training order cannot change the result.  ``bootstrap=False`` exists
    for degenerate-equivalence checks against a single tree.
    """
    mat = _as_matrix(X)
    labels = _as_labels(y)
    if len(mat) != len(labels):
        raise ValueError("X and y differ in length")
    if len(labels) == 0:
        raise ValueError("empty training set")
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    n_features = mat.shape[1]
    if kind == "random_forest":
        features_per_split = math.isqrt(n_features)
        if features_per_split * features_per_split < n_features:
            features_per_split += 1
    elif kind == "bagging":
        features_per_split = None
    else:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    trees = []
    n = len(labels)
    for i in range(n_trees):
        rng = random.Random(derive_seed(seed, f"tree-{i}"))
        if bootstrap:
            idx = [rng.randrange(n) for _ in range(n)]
            sub_mat, sub_labels = mat[idx], labels[idx]
        else:
            sub_mat, sub_labels = mat, labels
        trees.append(
            fit_tree(
                sub_mat,
                sub_labels,
                max_depth=max_depth,
                min_samples_split=min_samples_split,
                rng=rng,
                features_per_split=features_per_split,
            )
        )
    return EnsembleModel(
        trees=tuple(trees),
        kind=kind,
        features_per_split=features_per_split,
        seed=seed,
        n_features=n_features,
    )


def _predict_row(node: TreeNode, row: np.ndarray) -> int:
    while isinstance(node, SplitNode):
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node.label


def predict(model: ClassicalModel, X: Sequence[SparseVector] | np.ndarray) -> np.ndarray:
    """One 0/1 label per row; works for every model in this module."""
    mat = _as_matrix(X)
    if isinstance(model, NaiveBayesModel):
        post = nb_log_posterior(model, mat)
        #  >, not >=: posterior ties fall to the negative class
        return (post[:, 1] > post[:, 0]).astype(int)
    if isinstance(model, TreeModel):
        if mat.shape[1] != model.n_features:
            raise ValueError(
                f"feature dimension {mat.shape[1]} does not match model ({model.n_features})"
            )
        return np.array([_predict_row(model.root, row) for row in mat], dtype=int)
    if isinstance(model, EnsembleModel):
        if mat.shape[1] != model.n_features:
            raise ValueError(
                f"feature dimension {mat.shape[1]} does not match model ({model.n_features})"
            )
        votes = np.zeros(len(mat), dtype=int)
        for tree in model.trees:
            votes += predict(tree, mat)
        #  strict majority for positive; exact ties predict negative
        return (2 * votes > len(model.trees)).astype(int)
    raise TypeError(f"not a classical model: {type(model).__name__}")


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, LeafNode):
        return {"kind": "leaf", "label": node.label, "counts": list(node.counts)}
    return {
        "kind": "split",
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(data: dict) -> TreeNode:
    if data["kind"] == "leaf":
        return LeafNode(label=data["label"], counts=(data["counts"][0], data["counts"][1]))
    return SplitNode(
        feature=data["feature"],
        threshold=data["threshold"],
        left=_node_from_dict(data["left"]),
        right=_node_from_dict(data["right"]),
    )


def model_to_dict(model: ClassicalModel) -> dict:
    base = {"format": "classifier", "version": 1}
    if isinstance(model, NaiveBayesModel):
        return base | {
            "model": "nb",
            "alpha": model.alpha,
            "log_priors": list(model.log_priors),
            "log_likelihoods": [list(row) for row in model.log_likelihoods],
        }
    if isinstance(model, TreeModel):
        return base | {
            "model": "tree",
            "n_features": model.n_features,
            "max_depth": model.max_depth,
            "root": _node_to_dict(model.root),
        }
    if isinstance(model, EnsembleModel):
        return base | {
            "model": model.kind,
            "n_features": model.n_features,
            "features_per_split": model.features_per_split,
            "seed": model.seed,
            "trees": [model_to_dict(t) for t in model.trees],
        }
    raise TypeError(f"not a classical model: {type(model).__name__}")


def model_from_dict(data: dict) -> ClassicalModel:
    if data.get("format") != "classifier" or data.get("version") != 1:
        raise ValueError("not a recognised classifier document")
    kind = data["model"]
    if kind == "nb":
        return NaiveBayesModel(
            log_priors=tuple(data["log_priors"]),
            log_likelihoods=tuple(tuple(row) for row in data["log_likelihoods"]),
            alpha=data["alpha"],
        )
    if kind == "tree":
        return TreeModel(
            root=_node_from_dict(data["root"]),
            n_features=data["n_features"],
            max_depth=data["max_depth"],
        )
    if kind in ("bagging", "random_forest"):
        return EnsembleModel(
            trees=tuple(model_from_dict(t) for t in data["trees"]),
            kind=kind,
            features_per_split=data["features_per_split"],
            seed=data["seed"],
            n_features=data["n_features"],
        )
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model: ClassicalModel, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> ClassicalModel:
    with Path(path).open("r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
