"""Ship gate: one test per guarantee, each with an independent oracle.

Every test here is a release criterion.  `pytest -v tests/test_acceptance.py`
prints one pass/fail line per criterion.  Oracles are computed inside this
module (closed forms, brute-force searches, exact rational arithmetic)
rather than imported from the unit suites, so a bug cannot hide in shared
helper code.  The pipeline check (c13) shells out twice and is the slow
one, around half a minute.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import random
import subprocess
import time
from collections import Counter
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from statistics import NormalDist

import numpy as np
import pytest

from sentikit.classical import (
    LeafNode,
    SplitNode,
    fit_ensemble,
    fit_nb,
    fit_tree,
    nb_log_posterior,
    predict,
)
from sentikit.evaluation import correlate
from sentikit.features import fit_tfidf, transform_tfidf
from sentikit.lexicon import (
    Lexicon,
    Scale,
    SentimentScore,
    WordCategory,
    bundled_vader_lexicon,
    diff_lexicons,
    load_lexicon,
    merge_lm_in_vader,
    merge_vader_in_lm,
    score_counting,
)
from sentikit.neural import (
    BiLstmModel,
    TrainConfig,
    backward,
    forward,
    init_model,
    loss,
    train,
)
from sentikit.sampling import (
    AnnotationRecord,
    SampleItem,
    aggregate_labels,
    allocate,
    read_annotations,
    run_annotation_session,
    sample_size,
)
from sentikit.tokenization import WordPieceModel, encode_ids, encode_word, train_wordpiece
from sentikit.vader import score_heuristic

REPO_ROOT = Path(__file__).resolve().parents[1]
PARITY_SUITE = Path(__file__).parent / "data" / "vader_parity_suite.json"


@contextmanager
def budget(seconds: float):
    start = time.perf_counter()
    yield
    spent = time.perf_counter() - start
    assert spent < seconds, f"took {spent:.2f}s, budget is {seconds}s"


# --- c01: counting-equation exactness ---------------------------------------

def test_c01_counting_equations_exact_on_count_grid():
    toy = Lexicon(name="toy", entries={"good": 1.0, "bad": -1.0}, scale=Scale.PLUS_MINUS_1)
    with budget(1.0):
        checked = 0
        for total in range(1, 101):
            step = max(1, total // 7)
            pos_values = sorted(set(range(0, total + 1, step)) | {total})
            for pos in pos_values:
                neg = total - pos
                for n in sorted({total, min(2 * total, 500), (total + 500) // 2, 500}):
                    score = SentimentScore.from_counts(pos, neg, n)
                    assert score.polarity == float(Fraction(pos - neg, total))
                    assert score.subjectivity == float(Fraction(total, n))
                    assert not score.no_signal
                    checked += 1
        assert checked > 2000

        # the same equations through real token matching
        for pos, neg, pad in [(3, 1, 6), (0, 4, 1), (5, 5, 0), (2, 0, 9)]:
            tokens = ["good"] * pos + ["bad"] * neg + ["flat"] * pad
            score = score_counting(tokens, toy)
            assert score.polarity == float(Fraction(pos - neg, pos + neg))
            assert score.subjectivity == float(Fraction(pos + neg, len(tokens)))

        for n in range(1, 501):
            silent = SentimentScore.from_counts(0, 0, n)
            assert silent.polarity == 0.0
            assert silent.no_signal


# --- c02: heuristic-engine parity on the committed suite ---------------------

def test_c02_heuristic_engine_parity_on_committed_suite():
    with PARITY_SUITE.open(encoding="utf-8") as fh:
        doc = json.load(fh)
    cases = doc["cases"]
    assert doc["case_count"] == len(cases) >= 100
    buckets = {case["bucket"] for case in cases}
    assert {"punctuation", "caps", "degree", "negation", "but"} <= buckets
    lexicon = bundled_vader_lexicon()
    with budget(5.0):
        for case in cases:
            got = score_heuristic(case["text"], lexicon).compound
            assert got == pytest.approx(case["compound"], abs=1e-6), case["text"]


# --- c03: merge semantics on randomized lexicon pairs ------------------------

OTHER_TAGS = (
    WordCategory.LITIGIOUS,
    WordCategory.UNCERTAINTY,
    WordCategory.STRONG_MODAL,
    WordCategory.WEAK_MODAL,
)


def random_lexicon_pair(rng: random.Random) -> tuple[Lexicon, Lexicon]:
    pool = [f"w{i:02d}" for i in range(30)]
    vader_entries = {}
    for word in rng.sample(pool, rng.randint(5, 20)):
        vader_entries[word] = 0.0 if rng.random() < 0.1 else round(rng.uniform(-4, 4), 2)
    vader = Lexicon(name="general", entries=vader_entries, scale=Scale.PLUS_MINUS_4)
    lm_words = rng.sample(pool, rng.randint(3, 15))
    entries, tags = {}, {}
    for word in lm_words:
        if rng.random() < 0.25:
            tags[word] = rng.choice(OTHER_TAGS)
        else:
            entries[word] = rng.choice((-1.0, 1.0))
    lm = Lexicon(name="finance", entries=entries, scale=Scale.PLUS_MINUS_1, category_tags=tags)
    return vader, lm


def test_c03_merge_semantics_randomized():
    rng = random.Random(20240811)
    for _ in range(1000):
        vader, lm = random_lexicon_pair(rng)
        folded = merge_lm_in_vader(vader, lm)
        assert folded.scale is Scale.PLUS_MINUS_4
        assert folded.words() == vader.words() | lm.words()
        for word in lm.words():
            assert folded.valence(word) == lm.valence(word)
        for word in vader.words() - lm.words():
            assert folded.valence(word) == vader.valence(word)

        joined = merge_vader_in_lm(lm, vader)
        assert joined.scale is Scale.PLUS_MINUS_1
        for word in lm.words():
            assert joined.valence(word) == lm.valence(word)
            if word in lm.category_tags:
                assert word not in joined.entries  # stays category-only
        for word in vader.words() - lm.words():
            valence = vader.valence(word)
            if valence > 0:
                assert joined.valence(word) == 1.0
            elif valence < 0:
                assert joined.valence(word) == -1.0
            else:
                assert word not in joined.words()


# --- c04: canonical wordlist overlap (needs the full finance list) -----------

def test_c04_canonical_lexicon_diff_counts():
    lm_csv = os.environ.get("SENTIKIT_LM_CSV")
    if not lm_csv:
        pytest.skip("set SENTIKIT_LM_CSV to the full finance wordlist CSV to run this check")
    lm = load_lexicon(lm_csv, "lm_csv")
    vader_txt = os.environ.get("SENTIKIT_VADER_TXT")
    vader = (
        load_lexicon(vader_txt, "vader_tsv", on_duplicate="last")
        if vader_txt
        else bundled_vader_lexicon()
    )
    diff = diff_lexicons(vader, lm)
    expected = {
        "common_words": 930,
        "common_negative": 662,
        "common_positive": 179,
        "left_positive_right_negative": 20,
        "left_negative_right_positive": 1,
    }
    computed = {key: getattr(diff, key) for key in expected}
    assert computed == expected, f"canonical overlap drifted, computed {computed}"


# --- c05: sample sizing and proportional allocation ---------------------------

def test_c05_sample_size_and_allocation():
    assert sample_size(0.95, 0.05) == 385
    # closed form the implementation must agree with
    z = NormalDist().inv_cdf(0.975)
    assert sample_size(0.95, 0.05) == math.ceil(z * z * 0.25 / 0.05**2)

    assert allocate({"financial": 840, "non_financial": 160}, 400) == {
        "financial": 336,
        "non_financial": 64,
    }

    rng = random.Random(404)
    for _ in range(1000):
        counts = {
            f"s{i}": rng.randint(1, 500) for i in range(rng.randint(1, 8))
        }
        total = sum(counts.values())
        n = rng.randint(1, total)
        got = allocate(counts, n)
        assert sum(got.values()) == n
        assert got.keys() == counts.keys()
        assert all(0 <= got[k] <= counts[k] for k in counts)


# --- c06: annotation scale and label aggregation ------------------------------

def test_c06_annotation_scale_and_aggregation(tmp_path):
    progress = tmp_path / "progress.csv"
    items = [SampleItem(masked_id="aa", headline_synopsis="Shares rise.", full_text=None)]
    out = io.StringIO()
    recorded = run_annotation_session(
        items, "r1", progress, input_stream=io.StringIO("0\nmaybe\n2\n"), output_stream=out
    )
    assert recorded == 1
    assert out.getvalue().count("neutral is not allowed") == 2
    scores = [rec.score for rec in read_annotations(progress)]
    assert scores == [2]  # neither the 0 nor the garbage line landed

    for triple in itertools.product((-2, -1, 1, 2), repeat=3):
        records = [
            AnnotationRecord(masked_id="m", rater_id=f"r{i}", score=s)
            for i, s in enumerate(triple)
        ]
        result = aggregate_labels(records, raters_required=3)
        mean = Fraction(sum(triple), 3)
        if mean == 0:
            assert [a.mean_score for a in result.conflicted] == [mean], triple
            assert not result.labeled
        else:
            (article,) = result.labeled
            assert article.mean_score == mean
            assert (article.label.value == "positive") == (mean > 0), triple
            assert not result.conflicted


# --- c07: wordpiece trainer against a brute-force argmax ----------------------

def reference_merges(word_freq: dict[str, int], merge_budget: int) -> list[str]:
    """Recount everything each step and take the exact-arithmetic argmax."""
    segments = {w: [w[0]] + ["##" + c for c in w[1:]] for w in word_freq}
    merged_pieces = []
    for _ in range(merge_budget):
        pair_counts, piece_counts = Counter(), Counter()
        for word, freq in word_freq.items():
            for piece in segments[word]:
                piece_counts[piece] += freq
            for a, b in zip(segments[word], segments[word][1:]):
                pair_counts[(a, b)] += freq
        best, best_score = None, None
        for pair in sorted(pair_counts):
            score = Fraction(pair_counts[pair], piece_counts[pair[0]] * piece_counts[pair[1]])
            if best_score is None or score > best_score:
                best, best_score = pair, score
        if best is None:
            break
        joined = best[0] + best[1][2:]
        merged_pieces.append(joined)
        for word, pieces in segments.items():
            rebuilt, i = [], 0
            while i < len(pieces):
                if i + 1 < len(pieces) and (pieces[i], pieces[i + 1]) == best:
                    rebuilt.append(joined)
                    i += 2
                else:
                    rebuilt.append(pieces[i])
                    i += 1
            segments[word] = rebuilt
    return merged_pieces


def corpus_of(word_freq: dict[str, int]) -> list[str]:
    return [" ".join([word] * freq) for word, freq in sorted(word_freq.items())]


def test_c07_wordpiece_trainer_matches_brute_force():
    with budget(10.0):
        favours_rare_pair = {"ab": 4, "ac": 2, "db": 3}
        base = 1 + 2 * len({c for w in favours_rare_pair for c in w})
        model = train_wordpiece(corpus_of(favours_rare_pair), base + 1)
        # (a,##c) scores 2/(6*2); (a,##b) only 4/(6*7); (d,##b) 3/(3*7)
        assert model.vocab[base:] == ["ac"]

        rng = random.Random(1729)
        for _ in range(50):
            alphabet = rng.sample("abcdefgh", rng.randint(2, 5))
            word_freq = {}
            for _ in range(rng.randint(3, 20)):
                word = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 6)))
                word_freq[word] = rng.randint(1, 9)
            base = 1 + 2 * len({c for w in word_freq for c in w})
            merge_budget = rng.randint(1, 8)
            model = train_wordpiece(corpus_of(word_freq), base + merge_budget)
            assert model.vocab[base:] == reference_merges(word_freq, merge_budget)


# --- c08: encoder round trip and greedy-vs-exhaustive segmentation ------------

def naive_greedy(word: str, vocab: set[str]) -> list[str] | None:
    pieces, pos = [], 0
    while pos < len(word):
        for end in range(len(word), pos, -1):
            piece = word[pos:end] if pos == 0 else "##" + word[pos:end]
            if piece in vocab:
                pieces.append(piece)
                pos = end
                break
        else:
            return None
    return pieces


def all_segmentations(word: str, vocab: set[str]) -> list[list[str]]:
    out: list[list[str]] = []

    def grow(pos: int, acc: list[str]) -> None:
        if pos == len(word):
            out.append(list(acc))
            return
        for end in range(pos + 1, len(word) + 1):
            piece = word[pos:end] if pos == 0 else "##" + word[pos:end]
            if piece in vocab:
                acc.append(piece)
                grow(end, acc)
                acc.pop()

    grow(0, [])
    return out


def rebuild(pieces: list[str]) -> str:
    return pieces[0] + "".join(p[2:] for p in pieces[1:])


def test_c08_encoder_round_trip_and_greedy_segmentation():
    rng = random.Random(88)
    word_freq = {
        "".join(rng.choice("abcdef") for _ in range(rng.randint(1, 7))): rng.randint(1, 9)
        for _ in range(30)
    }
    base = 1 + 2 * len({c for w in word_freq for c in w})
    model = train_wordpiece(corpus_of(word_freq), base + 15)
    vocab = set(model.vocab)

    for i in range(10_000):
        word = "".join(rng.choice("abcdef") for _ in range(rng.randint(1, 12)))
        if i % 20 == 0:
            word += "z"  # an unseen character must force the unknown token
        pieces = encode_word(model, word)
        if "z" in word:
            assert pieces == ["[UNK]"]
        else:
            assert rebuild(pieces) == word

    for _ in range(2000):
        word = "".join(rng.choice("abcdef") for _ in range(rng.randint(1, 8)))
        pieces = encode_word(model, word)
        options = all_segmentations(word, vocab)
        assert options, word  # all corpus characters are in the base vocab
        assert pieces in options
        assert pieces == naive_greedy(word, vocab)


# --- c09: tf-idf worked example and norm invariant ----------------------------

def test_c09_tfidf_worked_example_and_norms():
    model = fit_tfidf([["gain", "gain", "loss"], ["loss"]])
    assert model.idf[model.vocabulary["gain"]] == pytest.approx(1.4055, abs=1e-3)
    assert model.idf[model.vocabulary["loss"]] == pytest.approx(1.0, abs=1e-3)
    dense = transform_tfidf(model, ["gain", "gain", "loss"]).dense()
    assert dense[model.vocabulary["gain"]] == pytest.approx(0.9424, abs=1e-3)
    assert dense[model.vocabulary["loss"]] == pytest.approx(0.3353, abs=1e-3)

    rng = random.Random(9)
    terms = ["gain", "loss", "flat", "oovword", "another"]
    for _ in range(300):
        doc = [rng.choice(terms) for _ in range(rng.randint(0, 12))]
        norm = transform_tfidf(model, doc).norm()
        assert min(abs(norm), abs(norm - 1.0)) <= 1e-12


# --- c10: classical models against exhaustive references ----------------------

def gini(labels: list[int]) -> Fraction:
    total = len(labels)
    ones = sum(labels)
    return 1 - Fraction(ones, total) ** 2 - Fraction(total - ones, total) ** 2


def brute_best_split(X: np.ndarray, y: list[int]) -> tuple[int, float] | None:
    if len(set(y)) < 2:
        return None
    best = None
    for feature in range(X.shape[1]):
        values = sorted(set(X[:, feature]))
        for lo, hi in zip(values, values[1:]):
            threshold = (lo + hi) / 2
            left = [label for value, label in zip(X[:, feature], y) if value <= threshold]
            right = [label for value, label in zip(X[:, feature], y) if value > threshold]
            score = len(left) * gini(left) + len(right) * gini(right)
            key = (score, feature, threshold)
            if best is None or key < best:
                best = key
    return None if best is None else (best[1], best[2])


def closed_form_p1(X_train, y_train, row, alpha=1) -> Fraction:
    n, f = len(X_train), len(X_train[0])
    joints = []
    for cls in (0, 1):
        rows = [x for x, label in zip(X_train, y_train) if label == cls]
        class_total = sum(sum(r) for r in rows)
        joint = Fraction(len(rows), n)
        for j, count in enumerate(row):
            theta = Fraction(alpha + sum(r[j] for r in rows), f * alpha + class_total)
            joint *= theta ** int(count)
        joints.append(joint)
    return joints[1] / (joints[0] + joints[1])


def test_c10_classical_models_match_references():
    rng = random.Random(31)
    with budget(60.0):
        # stump splits equal the exhaustive gini argmin, ties and all
        for _ in range(40):
            n = rng.randint(4, 40)
            n_features = rng.randint(1, max(1, min(6, 200 // n)))
            X = np.array(
                [[round(rng.uniform(0, 1), 2) for _ in range(n_features)] for _ in range(n)]
            )
            y = [rng.randint(0, 1) for _ in range(n)]
            if rng.random() < 0.1:
                y = [1] * n
            expected = brute_best_split(X, y)
            root = fit_tree(X, y, max_depth=1).root
            if expected is None:
                assert isinstance(root, LeafNode)
            else:
                assert isinstance(root, SplitNode)
                assert (root.feature, root.threshold) == expected

        # naive bayes posteriors vs the exact rational closed form
        for _ in range(20):
            n, f = rng.randint(8, 25), rng.randint(2, 5)
            X = [[rng.randint(0, 5) for _ in range(f)] for _ in range(n)]
            y = [0, 1] + [rng.randint(0, 1) for _ in range(n - 2)]
            model = fit_nb(np.array(X, dtype=float), y, alpha=1.0)
            probes = [[rng.randint(0, 5) for _ in range(f)] for _ in range(5)]
            log_post = nb_log_posterior(model, np.array(probes, dtype=float))
            shifted = log_post - log_post.max(axis=1, keepdims=True)
            p1 = np.exp(shifted[:, 1]) / np.exp(shifted).sum(axis=1)
            for probe, got in zip(probes, p1):
                assert got == pytest.approx(float(closed_form_p1(X, y, probe)), abs=1e-9)

        # a depth-2 tree must solve xor exactly
        X_xor = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y_xor = [0, 1, 1, 0]
        assert list(predict(fit_tree(X_xor, y_xor, max_depth=2), X_xor)) == y_xor

        # bagging beats a lone tree on a label-noise task, on average
        def noisy_task(seed):
            task_rng = random.Random(seed)
            rule = lambda row: int(sum(v > 0.5 for v in row[:3]) >= 2)
            X = [[task_rng.random() for _ in range(5)] for _ in range(200)]
            y = [rule(r) for r in X]
            for i in task_rng.sample(range(200), 30):  # 15% flipped
                y[i] = 1 - y[i]
            X_test = [[task_rng.random() for _ in range(5)] for _ in range(500)]
            return np.array(X), y, np.array(X_test), [rule(r) for r in X_test]

        tree_accs, bag_accs = [], []
        for seed in range(10):
            X, y, X_test, y_test = noisy_task(seed)
            tree = fit_tree(X, y, max_depth=5)
            bag = fit_ensemble(X, y, kind="bagging", n_trees=25, max_depth=5, seed=seed)
            tree_accs.append(float(np.mean(predict(tree, X_test) == y_test)))
            bag_accs.append(float(np.mean(predict(bag, X_test) == y_test)))
        assert sum(bag_accs) / 10 >= sum(tree_accs) / 10, (bag_accs, tree_accs)


# --- c11: analytic gradients against finite differences -----------------------

def conditioned_model(seed: int) -> BiLstmModel:
    """Tiny model rescaled away from the near-zero init so no gate saturates
    into a numerically flat region where finite differences lose meaning."""
    model = init_model(vocab_size=7, d_embed=3, hidden_size=4, max_seq_len=6, seed=seed)
    rng = np.random.default_rng(seed + 1)
    model.embedding[:] = rng.normal(0.0, 1.0, model.embedding.shape)
    model.embedding[model.vocab_size] = 0.0
    for cell in (model.forward_cell, model.backward_cell):
        cell.W[:] = rng.uniform(-0.5, 0.5, cell.W.shape)
        cell.U[:] = rng.uniform(-0.5, 0.5, cell.U.shape)
        cell.b[:] = rng.uniform(-0.5, 0.5, cell.b.shape)
    model.head_w[:] = rng.uniform(-0.5, 0.5, model.head_w.shape)
    model.head_b[:] = rng.uniform(-0.5, 0.5, model.head_b.shape)
    return model


def param_tensors(model: BiLstmModel) -> dict[str, np.ndarray]:
    return {
        "embedding": model.embedding,
        "fw_W": model.forward_cell.W,
        "fw_U": model.forward_cell.U,
        "fw_b": model.forward_cell.b,
        "bw_W": model.backward_cell.W,
        "bw_U": model.backward_cell.U,
        "bw_b": model.backward_cell.b,
        "head_w": model.head_w,
        "head_b": model.head_b,
    }


def test_c11_bilstm_gradients_match_finite_differences():
    eps = 1e-5
    worst = 0.0
    with budget(30.0):
        for seed in range(5):
            model = conditioned_model(seed)
            rng = np.random.default_rng(100 + seed)
            for _ in range(2):
                ids = list(rng.integers(0, 7, size=rng.integers(2, 7)))
                y = int(rng.integers(0, 2))
                grads = backward(model, ids, y)
                for name, tensor in param_tensors(model).items():
                    flat = tensor.reshape(-1)
                    analytic = grads[name].reshape(-1)
                    probes = rng.choice(flat.size, size=min(10, flat.size), replace=False)
                    for i in probes:
                        original = flat[i]
                        flat[i] = original + eps
                        up = loss(forward(model, ids), y)
                        flat[i] = original - eps
                        down = loss(forward(model, ids), y)
                        flat[i] = original
                        fd = (up - down) / (2 * eps)
                        # the 1e-7 floor keeps central-difference roundoff
                        # (~5e-12 here) from reading as relative error on
                        # near-zero gradients
                        denom = max(abs(fd), abs(analytic[i]), 1e-7)
                        worst = max(worst, abs(fd - analytic[i]) / denom)
    assert worst < 1e-4, f"max relative gradient error {worst:.3e}"


# --- c12: training learns a separable corpus under the default config ---------

def test_c12_bilstm_learns_separable_corpus():
    vocab = ["[UNK]", "the", "market", "was", "up", "down", "today", "again", "session"]
    wp = WordPieceModel(vocab=vocab)
    positive = ["the market was up today", "up again today", "the session was up", "up up today"]
    negative = ["the market was down today", "down again today", "the session was down", "down down today"]
    dataset = []
    for i in range(250):
        dataset.append((encode_ids(wp, positive[i % len(positive)]), 1))
        dataset.append((encode_ids(wp, negative[i % len(negative)]), 0))
    assert len(dataset) == 500

    with budget(300.0):
        model = init_model(len(vocab), seed=0)
        result = train(model, dataset, TrainConfig(epochs=20, seed=0))
    assert max(e.val_accuracy for e in result.history) >= 0.95
    for epoch in result.history:
        assert math.isfinite(epoch.train_loss)
        assert epoch.val_loss is None or math.isfinite(epoch.val_loss)


# --- c13: the one-command pipeline is fast and byte-reproducible --------------

def tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(path.relative_to(root)): path.read_bytes()
        for path in sorted(root.rglob("*"))
        if path.is_file()
    }


def run_pipeline(out_dir: Path) -> float:
    script = REPO_ROOT / "scripts" / "run_pipeline.sh"
    start = time.perf_counter()
    proc = subprocess.run(
        ["bash", str(script), str(out_dir)],
        capture_output=True,
        text=True,
        env=dict(os.environ),
    )
    spent = time.perf_counter() - start
    assert proc.returncode == 0, proc.stderr[-2000:]
    return spent


def test_c13_pipeline_reproducible_end_to_end(tmp_path):
    first, second = tmp_path / "run1", tmp_path / "run2"
    assert run_pipeline(first) < 600.0
    assert run_pipeline(second) < 600.0

    left, right = tree_bytes(first), tree_bytes(second)
    assert left.keys() == right.keys()
    differing = [name for name in left if left[name] != right[name]]
    assert not differing, f"reruns differ in {differing}"

    lexicon_table = (first / "lexicon_table.txt").read_text(encoding="utf-8")
    assert lexicon_table.splitlines()[0].split() == ["Name", "A", "B", "C", "D", "E", "F"]
    for method in ("vader", "lm", "lm-in-vader", "vader-in-lm"):
        assert method in lexicon_table
    model_table = (first / "model_table.txt").read_text(encoding="utf-8")
    assert model_table.splitlines()[0].startswith("Model")
    for method in ("nb", "tree", "bagging", "forest", "bilstm"):
        assert method in model_table


# --- c14: correlation matrix contract -----------------------------------------

def test_c14_correlation_matrix_properties():
    rng = random.Random(14)
    for _ in range(50):
        n = rng.randint(5, 40)
        scores = {
            name: [None if rng.random() < 0.1 else rng.uniform(-1, 1) for _ in range(n)]
            for name in ("a", "b", "c")
        }
        matrix = correlate(scores)
        for i in range(3):
            assert abs(matrix.values[i][i] - 1.0) <= 1e-12
            for j in range(3):
                left, right = matrix.values[i][j], matrix.values[j][i]
                if left is None or right is None:
                    assert left is right
                else:
                    assert abs(left - right) <= 1e-12

    base = [rng.uniform(0, 1) for _ in range(25)]
    with_self = correlate({"a": base, "b": list(base)})
    assert abs(with_self.value("a", "b") - 1.0) <= 1e-12
    flipped = correlate({"a": base, "b": [3.0 - 2.0 * v for v in base]})
    assert abs(flipped.value("a", "b") + 1.0) <= 1e-12
