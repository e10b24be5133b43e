"""Command line entry point exposing the pipeline as subcommands.

Every subcommand reads defaults from an optional YAML config file
(``--config`` flag, falling back to the ``SENTIKIT_CONFIG`` environment
variable) with one section per module; explicit flags win over config
values.  One global ``--seed`` drives every stochastic step, with
per-component seeds derived from it by stable hashing, so reruns with
the same inputs are byte-identical.

Exit codes: 0 success, 1 validation failure (one ``error: ...`` line on
stderr), 2 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import yaml

from . import classical, corpus, evaluation, features, lexicon, neural, sampling, tokenization
from .sampling import Label
from .seeding import derive_seed
from .vader import score_heuristic

BUILTIN_LEXICONS = ("builtin:vader", "builtin:lm-demo")
LEXICON_METHODS = ("vader", "lm", "lm-in-vader", "vader-in-lm")
CLASSICAL_METHODS = ("nb", "tree", "bagging", "forest")

SCORES_HEADER = [
    "article_id", "engine", "compound", "polarity", "subjectivity",
    "pos_count", "neg_count", "token_count", "no_signal",
]


class CliError(Exception):
    """Validation failure; message becomes the one-line stderr error."""


def _load_config(path_flag: str | None) -> dict:
    path = path_flag or os.environ.get("SENTIKIT_CONFIG")
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {p}")
    try:
        data = yaml.safe_load(p.read_text("utf-8"))
    except yaml.YAMLError as exc:
        raise CliError(f"config file {p} is not valid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise CliError(f"config root in {p} must be a mapping")
    return data


def _cfg(config: dict, section: str, key: str, flag_value, default):
    """Flag beats config beats default."""
    if flag_value is not None:
        return flag_value
    block = config.get(section)
    if isinstance(block, dict) and key in block:
        return block[key]
    return default


def _seed(config: dict, args: argparse.Namespace) -> int:
    value = _cfg(config, "", "", args.seed, config.get("seed", 0))
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise CliError(f"seed must be an integer, got {value!r}") from exc


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise CliError(f"{what} not found: {p}")
    return p


def _field_text(article: corpus.NewsArticle, field: str) -> str | None:
    text = getattr(article, field)
    return text if text else None


def _segment_matches(article: corpus.NewsArticle, segment: str) -> bool:
    return segment == "all" or article.segment.value == segment


def _labeled_pairs(
    articles: list[corpus.NewsArticle],
    labels: dict[str, Label],
    field: str,
    segment: str,
) -> list[tuple[corpus.NewsArticle, Label]]:
    pairs = [
        (a, labels[a.id])
        for a in articles
        if a.id in labels and _segment_matches(a, segment) and _field_text(a, field)
    ]
    if not pairs:
        raise CliError(f"no labeled articles with {field} text in segment {segment!r}")
    return pairs


def _infer_lexicon_format(path: Path) -> str:
    if path.suffix == ".txt":
        return "vader_tsv"
    with path.open("r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("Word,"):
        return "lm_csv"
    if first.startswith("word,valence"):
        return "valence_csv"
    raise CliError(
        f"cannot infer the format of {path}; pass --lexicon-format "
        "(vader_tsv, lm_csv or valence_csv)"
    )


def _load_lexicon_arg(spec: str, fmt: str | None = None) -> lexicon.Lexicon:
    if spec == "builtin:vader":
        return lexicon.bundled_vader_lexicon()
    if spec == "builtin:lm-demo":
        return lexicon.bundled_demo_lm_lexicon()
    path = _require_file(spec, "lexicon file")
    return lexicon.load_lexicon(path, fmt or _infer_lexicon_format(path))


def _clean_tokens(text: str) -> list[str]:
    return corpus.clean_text(text, corpus.PreprocessConfig()).split()


def _lexicon_scorer(method: str, args: argparse.Namespace):
    """(scorer, engine_name) for one of the four lexicon methods.

    The host lexicon's engine applies: heuristic scoring for the
    vader-hosted lexicons, plain counting for the lm-hosted ones.  The
    counting engine cleans text itself; the heuristic engine must see
    the raw field.
    """
    fmt = getattr(args, "lexicon_format", None)
    if method == "vader":
        lex = _load_lexicon_arg(args.lexicon or "builtin:vader", fmt)
        return (lambda text: score_heuristic(text, lex)), "vader"
    if method == "lm":
        lex = _load_lexicon_arg(args.lexicon or "builtin:lm-demo", fmt)
        return (lambda text: lexicon.score_counting(_clean_tokens(text), lex)), "lm"
    if args.lexicon:
        merged = _load_lexicon_arg(args.lexicon, fmt)
    else:
        vader_lex = _load_lexicon_arg(args.vader or "builtin:vader")
        lm_lex = _load_lexicon_arg(args.lm or "builtin:lm-demo")
        if method == "lm-in-vader":
            merged = lexicon.merge_lm_in_vader(vader_lex, lm_lex)
        else:
            merged = lexicon.merge_vader_in_lm(lm_lex, vader_lex)
    if method == "lm-in-vader":
        return (lambda text: score_heuristic(text, merged)), "vader"
    return (lambda text: lexicon.score_counting(_clean_tokens(text), merged)), "lm"


def _merge_report_row(path: str, row: evaluation.EvalRow) -> None:
    """Insert or replace the row keyed (method, text_field, segment)."""
    existing = []
    if Path(path).exists():
        existing = evaluation.read_report_csv(path)
    key = (row.method, row.text_field, row.segment)
    rows = [r for r in existing if (r.method, r.text_field, r.segment) != key]
    rows.append(row)
    evaluation.write_report_csv(rows, path)


def _row_summary(row: evaluation.EvalRow) -> str:
    train = "-" if row.train_accuracy is None else f"{row.train_accuracy:.4f}"
    return (
        f"{row.method} field={row.text_field} segment={row.segment} n={row.n} "
        f"train_acc={train} test_acc={row.test_accuracy:.4f} no_signal={row.no_signal_count}"
    )


# ---------------------------------------------------------------- handlers


def cmd_ingest(args: argparse.Namespace, config: dict) -> int:
    fmt = _cfg(config, "ingest", "format", args.format, "jsonl")
    top = int(_cfg(config, "preprocess", "top_sector_count", args.top_sectors, corpus.DEFAULT_TOP_SECTOR_COUNT))
    result = corpus.ingest(_require_file(args.input, "input file"), fmt)
    if not result.articles:
        raise CliError(f"no usable articles in {args.input}")
    articles = corpus.normalize_sectors(result.articles, top)
    corpus.write_articles(articles, args.output)
    print(
        f"ingested {len(articles)} articles "
        f"({result.malformed} malformed, {result.dropped} dropped) -> {args.output}"
    )
    return 0


def _preprocess_config(args: argparse.Namespace, config: dict) -> corpus.PreprocessConfig:
    stopwords_path = _cfg(config, "preprocess", "stopwords", args.stopwords, None)
    stopwords = corpus.load_stopwords(stopwords_path)
    whitelist_value = _cfg(config, "preprocess", "stopword_whitelist", args.whitelist, None)
    if whitelist_value is None:
        whitelist = frozenset(corpus.DEFAULT_STOPWORD_WHITELIST) & stopwords
    elif isinstance(whitelist_value, str):
        whitelist = frozenset(w for w in whitelist_value.split(",") if w)
    else:
        whitelist = frozenset(whitelist_value)
    min_chars = int(
        _cfg(config, "preprocess", "min_full_text_chars", args.min_full_text_chars,
             corpus.DEFAULT_MIN_FULL_TEXT_CHARS)
    )
    top = int(_cfg(config, "preprocess", "top_sector_count", args.top_sectors, corpus.DEFAULT_TOP_SECTOR_COUNT))
    return corpus.PreprocessConfig(
        stopwords=stopwords,
        stopword_whitelist=whitelist,
        min_full_text_chars=min_chars,
        top_sector_count=top,
    )


def cmd_preprocess(args: argparse.Namespace, config: dict) -> int:
    pc = _preprocess_config(args, config)
    articles = corpus.load_processed(_require_file(args.input, "input file"))
    articles = corpus.normalize_sectors(articles, pc.top_sector_count)
    kept, dropped = [], 0
    for article in articles:
        cleaned = corpus.preprocess(article, pc)
        if not cleaned.headline_synopsis and not cleaned.full_text:
            dropped += 1
            continue
        kept.append(cleaned)
    if not kept:
        raise CliError("preprocessing left no articles with any text")
    corpus.write_articles(kept, args.output)
    print(f"preprocessed {len(kept)} articles ({dropped} dropped empty) -> {args.output}")
    return 0


def cmd_sample(args: argparse.Namespace, config: dict) -> int:
    seed = _seed(config, args)
    articles = corpus.load_processed(_require_file(args.input, "input file"))
    if args.size is not None:
        n = args.size
    else:
        confidence = float(_cfg(config, "sampling", "confidence", args.confidence, 0.95))
        margin = float(_cfg(config, "sampling", "margin", args.margin, 0.05))
        n = sampling.sample_size(confidence, margin)
    multiple = _cfg(config, "sampling", "round_to", args.round_to, None)
    if multiple is not None:
        n = sampling.round_to(n, int(multiple))
    picked = sampling.stratified_sample(articles, args.by, n, derive_seed(seed, "sample"))
    corpus.write_articles(picked, args.output)
    print(f"sampled {len(picked)} of {len(articles)} articles by {args.by} -> {args.output}")
    return 0


def _masked_items(sample_path: str, seed: int) -> tuple[list[sampling.SampleItem], dict[str, str]]:
    articles = corpus.load_processed(_require_file(sample_path, "sample file"))
    mask = sampling.mask_ids([a.id for a in articles], derive_seed(seed, "mask"))
    items = [
        sampling.SampleItem(
            masked_id=mask[a.id],
            headline_synopsis=a.headline_synopsis,
            full_text=a.full_text,
        )
        for a in articles
    ]
    # masked order hides publish order from the raters
    items.sort(key=lambda item: item.masked_id)
    return items, mask


def cmd_annotate(args: argparse.Namespace, config: dict) -> int:
    items, _ = _masked_items(args.sample, _seed(config, args))
    recorded = sampling.run_annotation_session(
        items, args.rater, args.output, show_full_text=args.show_full_text
    )
    print(f"recorded {recorded} new judgments by {args.rater} -> {args.output}")
    return 0


def cmd_aggregate_labels(args: argparse.Namespace, config: dict) -> int:
    raters = int(_cfg(config, "sampling", "raters_required", args.raters_required, 3))
    _, mask = _masked_items(args.sample, _seed(config, args))
    unmask = {masked: original for original, masked in mask.items()}
    records = []
    for path in args.annotations:
        records.extend(sampling.read_annotations(_require_file(path, "annotations file")))
    unknown = sorted({r.masked_id for r in records} - set(unmask))
    if unknown:
        raise CliError(f"annotations reference ids outside the sample: {unknown[:3]}")
    result = sampling.aggregate_labels(records, raters_required=raters)
    result = sampling.AggregateResult(
        labeled=[replace(a, article_id=unmask[a.masked_id]) for a in result.labeled],
        conflicted=[replace(a, article_id=unmask[a.masked_id]) for a in result.conflicted],
    )
    sampling.write_labels(result, args.output)
    print(
        f"labeled {len(result.labeled)} articles "
        f"({len(result.conflicted)} conflicted) -> {args.output}"
    )
    return 0


def cmd_score_lexicon(args: argparse.Namespace, config: dict) -> int:
    default = "builtin:vader" if args.engine == "vader" else "builtin:lm-demo"
    lex = _load_lexicon_arg(args.lexicon or default, args.lexicon_format)
    articles = corpus.load_processed(_require_file(args.input, "input file"))
    scored = skipped = 0
    with Path(args.output).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCORES_HEADER)
        for article in articles:
            text = _field_text(article, args.field)
            if text is None:
                skipped += 1
                continue
            if args.engine == "vader":
                score = score_heuristic(text, lex)
            else:
                score = lexicon.score_counting(_clean_tokens(text), lex)
            writer.writerow(
                [
                    article.id,
                    args.engine,
                    "" if score.compound is None else repr(score.compound),
                    repr(score.polarity),
                    repr(score.subjectivity),
                    score.pos_count,
                    score.neg_count,
                    score.token_count,
                    "true" if score.no_signal else "false",
                ]
            )
            scored += 1
    print(f"scored {scored} articles ({skipped} without {args.field}) -> {args.output}")
    return 0


def cmd_merge_lexicons(args: argparse.Namespace, config: dict) -> int:
    vader_lex = _load_lexicon_arg(args.vader)
    lm_lex = _load_lexicon_arg(args.lm)
    if args.strategy == "lm-in-vader":
        merged = lexicon.merge_lm_in_vader(vader_lex, lm_lex)
    else:
        merged = lexicon.merge_vader_in_lm(lm_lex, vader_lex)
    lexicon.export_valence_csv(merged, args.output)
    print(f"{args.strategy}: {len(merged.entries)} entries -> {args.output}")
    return 0


def cmd_diff_lexicons(args: argparse.Namespace, config: dict) -> int:
    left = _load_lexicon_arg(args.left, args.left_format)
    right = _load_lexicon_arg(args.right, args.right_format)
    diff = lexicon.diff_lexicons(left, right)
    counts = dataclasses.asdict(diff)
    common = left.words() & right.words()
    document = {
        "left": left.name,
        "right": right.name,
        "counts": counts,
        "sign_mismatches": {
            "left_negative_right_positive": sorted(
                w for w in common if left.valence(w) < 0 < right.valence(w)
            ),
            "left_positive_right_negative": sorted(
                w for w in common if right.valence(w) < 0 < left.valence(w)
            ),
        },
    }
    with Path(args.output).open("w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    return 0


def _tokenizer_texts(args: argparse.Namespace) -> list[str]:
    articles = corpus.load_processed(_require_file(args.input, "input file"))
    texts = []
    fields = ("headline_synopsis", "full_text") if args.field == "both" else (args.field,)
    for article in articles:
        if not _segment_matches(article, args.segment):
            continue
        for field in fields:
            text = _field_text(article, field)
            if text:
                texts.append(text)
    if not texts:
        raise CliError(f"no {args.field} text in segment {args.segment!r}")
    return texts


def cmd_train_tokenizer(args: argparse.Namespace, config: dict) -> int:
    vocab_size = int(_cfg(config, "tokenizer", "vocab_size", args.vocab_size, 4000))
    max_chars = int(_cfg(config, "tokenizer", "max_word_chars", args.max_word_chars, 100))
    texts = _tokenizer_texts(args)
    model = tokenization.train_wordpiece(texts, vocab_size, max_word_chars=max_chars)
    tokenization.save_wordpiece(model, args.output)
    print(
        f"trained wordpiece vocab of {len(model)} tokens "
        f"({len(model.merges)} merges) on {len(texts)} texts -> {args.output}"
    )
    return 0


def cmd_encode(args: argparse.Namespace, config: dict) -> int:
    wp = tokenization.load_wordpiece(_require_file(args.tokenizer, "tokenizer file"))
    if args.text is not None:
        tokens = tokenization.encode_text(wp, args.text)
        print(json.dumps({"tokens": tokens, "ids": [wp.token_id(t) for t in tokens]}))
        return 0
    if not (args.input and args.output):
        raise CliError("encode needs either --text or both --input and --output")
    articles = corpus.load_processed(_require_file(args.input, "input file"))
    encoded = skipped = 0
    with Path(args.output).open("w", encoding="utf-8") as fh:
        for article in articles:
            text = _field_text(article, args.field)
            if text is None:
                skipped += 1
                continue
            ids = tokenization.encode_ids(wp, text)
            fh.write(json.dumps({"article_id": article.id, "ids": ids}))
            fh.write("\n")
            encoded += 1
    print(f"encoded {encoded} articles ({skipped} without {args.field}) -> {args.output}")
    return 0


def _split_pairs(pairs, test_fraction: float, seed: int):
    try:
        return evaluation.split(pairs, test_fraction, seed, label_of=lambda p: p[1])
    except evaluation.SplitError as exc:
        raise CliError(str(exc)) from exc


def _int_labels(pairs) -> list[int]:
    return [1 if label is Label.POSITIVE else 0 for _, label in pairs]


def _docs(pairs, field: str) -> list[list[str]]:
    return [getattr(a, field).split() for a, _ in pairs]


def cmd_train_classical(args: argparse.Namespace, config: dict) -> int:
    seed = _seed(config, args)
    test_fraction = float(_cfg(config, "classical", "test_fraction", args.test_fraction, 0.2))
    max_depth = int(_cfg(config, "classical", "max_depth", args.max_depth, 5))
    n_trees = int(_cfg(config, "classical", "n_trees", args.n_trees, 25))
    alpha = float(_cfg(config, "classical", "alpha", args.alpha, 1.0))
    labels = sampling.read_labels(_require_file(args.labels, "labels file"))
    articles = corpus.load_processed(_require_file(args.corpus, "corpus file"))
    pairs = _labeled_pairs(articles, labels, args.field, args.segment)
    train_pairs, test_pairs = _split_pairs(pairs, test_fraction, seed)
    vectorizer = features.fit_tfidf(_docs(train_pairs, args.field))
    X_train = features.stack_dense(features.transform_corpus(vectorizer, _docs(train_pairs, args.field)))
    X_test = features.stack_dense(features.transform_corpus(vectorizer, _docs(test_pairs, args.field)))
    y_train = _int_labels(train_pairs)
    if args.model == "nb":
        model = classical.fit_nb(X_train, y_train, alpha=alpha)
    elif args.model == "tree":
        model = classical.fit_tree(X_train, y_train, max_depth=max_depth)
    else:
        kind = "bagging" if args.model == "bagging" else "random_forest"
        model = classical.fit_ensemble(
            X_train, y_train, kind, n_trees=n_trees, max_depth=max_depth, seed=seed
        )
    train_acc = float(evaluation.accuracy(list(classical.predict(model, X_train)), y_train))
    predicted = [
        Label.POSITIVE if p == 1 else Label.NEGATIVE for p in classical.predict(model, X_test)
    ]
    row = evaluation.classification_row(
        args.model, args.field, args.segment,
        [label for _, label in test_pairs], predicted, train_accuracy=train_acc,
    )
    classical.save_model(model, args.output)
    vec_path = args.vectorizer or str(Path(args.output).with_suffix("")) + ".tfidf.csv"
    features.save_tfidf(vectorizer, vec_path)
    if args.report:
        _merge_report_row(args.report, row)
    print(_row_summary(row) + f" -> {args.output}")
    return 0


def cmd_train_bilstm(args: argparse.Namespace, config: dict) -> int:
    seed = _seed(config, args)
    get = lambda key, flag, default: _cfg(config, "bilstm", key, flag, default)
    epochs = int(get("epochs", args.epochs, 5))
    d_embed = int(get("d_embed", args.d_embed, 64))
    hidden = int(get("hidden_size", args.hidden_size, 64))
    default_len = 256 if args.field == "headline_synopsis" else 512
    max_len = int(get("max_seq_len", args.max_seq_len, default_len))
    lr = float(get("learning_rate", args.learning_rate, 1e-3))
    batch = int(get("batch_size", args.batch_size, 32))
    val_fraction = float(get("validation_fraction", args.validation_fraction, 0.2))
    optimizer = get("optimizer", args.optimizer, "adam")
    test_fraction = float(get("test_fraction", args.test_fraction, 0.2))

    wp = tokenization.load_wordpiece(_require_file(args.tokenizer, "tokenizer file"))
    labels = sampling.read_labels(_require_file(args.labels, "labels file"))
    articles = corpus.load_processed(_require_file(args.corpus, "corpus file"))
    pairs = _labeled_pairs(articles, labels, args.field, args.segment)
    train_pairs, _ = _split_pairs(pairs, test_fraction, seed)
    dataset = []
    undecodable = 0
    for article, label in train_pairs:
        ids = tokenization.encode_ids(wp, getattr(article, args.field))
        if not ids or all(i == wp.unk_id for i in ids):
            undecodable += 1
            continue
        dataset.append((ids, 1 if label is Label.POSITIVE else 0))
    if not dataset:
        raise CliError("no training article encodes to known tokens")
    model = neural.init_model(
        vocab_size=len(wp), d_embed=d_embed, hidden_size=hidden, max_seq_len=max_len, seed=seed
    )
    cfg = neural.TrainConfig(
        epochs=epochs, seed=seed, learning_rate=lr, batch_size=batch,
        optimizer=optimizer, validation_fraction=val_fraction,
    )
    try:
        result = neural.train(model, dataset, cfg)
    except neural.TrainingDiverged as exc:
        raise CliError(f"training diverged: {exc}") from exc
    for m in result.history:
        val = "" if m.val_loss is None else f" val_loss={m.val_loss:.4f} val_acc={m.val_accuracy:.4f}"
        print(f"epoch {m.epoch}: train_loss={m.train_loss:.4f} train_acc={m.train_accuracy:.4f}{val}")
    neural.save_checkpoint(result.model, args.output, tokenization.vocab_fingerprint(wp))
    if args.history:
        with Path(args.history).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy"])
            for m in result.history:
                writer.writerow([
                    m.epoch, repr(m.train_loss), repr(m.train_accuracy),
                    "" if m.val_loss is None else repr(m.val_loss),
                    "" if m.val_accuracy is None else repr(m.val_accuracy),
                ])
    print(
        f"trained on {len(dataset)} articles ({undecodable} undecodable, "
        f"{result.truncated_sequences} truncated) -> {args.output}"
    )
    return 0


def _evaluate_lexicon(args, pairs) -> evaluation.EvalRow:
    scorer, _ = _lexicon_scorer(args.method, args)
    return evaluation.lexicon_accuracy(pairs, scorer, args.field, args.method, args.segment)


def _evaluate_classical(args, config, pairs, seed) -> evaluation.EvalRow:
    if not args.model_path:
        raise CliError(f"--model is required for method {args.method}")
    model = classical.load_model(_require_file(args.model_path, "model file"))
    vec_path = args.vectorizer or str(Path(args.model_path).with_suffix("")) + ".tfidf.csv"
    vectorizer = features.load_tfidf(_require_file(vec_path, "vectorizer file"))
    test_fraction = float(_cfg(config, "classical", "test_fraction", args.test_fraction, 0.2))
    train_pairs, test_pairs = _split_pairs(pairs, test_fraction, seed)
    X_train = features.stack_dense(features.transform_corpus(vectorizer, _docs(train_pairs, args.field)))
    X_test = features.stack_dense(features.transform_corpus(vectorizer, _docs(test_pairs, args.field)))
    train_acc = float(
        evaluation.accuracy(list(classical.predict(model, X_train)), _int_labels(train_pairs))
    )
    predicted = [
        Label.POSITIVE if p == 1 else Label.NEGATIVE for p in classical.predict(model, X_test)
    ]
    return evaluation.classification_row(
        args.method, args.field, args.segment,
        [label for _, label in test_pairs], predicted, train_accuracy=train_acc,
    )


def _evaluate_bilstm(args, config, pairs, seed) -> evaluation.EvalRow:
    if not (args.model_path and args.tokenizer):
        raise CliError("--model and --tokenizer are required for method bilstm")
    model, vocab_hash = neural.load_checkpoint(_require_file(args.model_path, "checkpoint"))
    wp = tokenization.load_wordpiece(_require_file(args.tokenizer, "tokenizer file"))
    if tokenization.vocab_fingerprint(wp) != vocab_hash:
        raise CliError("tokenizer vocabulary does not match the checkpoint's vocab hash")
    test_fraction = float(_cfg(config, "bilstm", "test_fraction", args.test_fraction, 0.2))
    train_pairs, test_pairs = _split_pairs(pairs, test_fraction, seed)

    def predict_pairs(subset):
        out = []
        for article, _ in subset:
            pred = neural.predict_sentiment(model, wp, getattr(article, args.field))
            out.append(pred.label)
        return out

    train_acc = float(
        evaluation.accuracy(predict_pairs(train_pairs), [label for _, label in train_pairs])
    )
    return evaluation.classification_row(
        args.method, args.field, args.segment,
        [label for _, label in test_pairs], predict_pairs(test_pairs),
        train_accuracy=train_acc,
    )


def cmd_evaluate(args: argparse.Namespace, config: dict) -> int:
    seed = _seed(config, args)
    labels = sampling.read_labels(_require_file(args.labels, "labels file"))
    articles = corpus.load_processed(_require_file(args.corpus, "corpus file"))
    pairs = _labeled_pairs(articles, labels, args.field, args.segment)
    if args.method in LEXICON_METHODS:
        row = _evaluate_lexicon(args, pairs)
    elif args.method in CLASSICAL_METHODS:
        row = _evaluate_classical(args, config, pairs, seed)
    else:
        row = _evaluate_bilstm(args, config, pairs, seed)
    _merge_report_row(args.report, row)
    print(_row_summary(row) + f" -> {args.report}")
    return 0


def _read_scores(path: Path) -> dict[str, float | None]:
    """article_id -> comparable score; None where the scorer had no signal."""
    scores: dict[str, float | None] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SCORES_HEADER:
            raise CliError(f"{path} is not a score-lexicon output file")
        for rec in reader:
            if rec["no_signal"] == "true":
                scores[rec["article_id"]] = None
            elif rec["engine"] == "vader":
                scores[rec["article_id"]] = float(rec["compound"])
            else:
                scores[rec["article_id"]] = float(rec["polarity"])
    return scores


def cmd_correlate(args: argparse.Namespace, config: dict) -> int:
    names = args.names.split(",") if args.names else [Path(p).stem for p in args.scores]
    if len(names) != len(args.scores):
        raise CliError(f"{len(args.scores)} score files but {len(names)} names")
    if len(set(names)) != len(names):
        raise CliError(f"method names must be unique, got {names}")
    per_method = [_read_scores(_require_file(p, "scores file")) for p in args.scores]
    shared = set(per_method[0])
    for scores in per_method[1:]:
        shared &= set(scores)
    if len(shared) < 2:
        raise CliError("fewer than 2 articles are scored by every input")
    ordered = sorted(shared)
    vectors = {name: [scores[a] for a in ordered] for name, scores in zip(names, per_method)}
    matrix = evaluation.correlate(vectors)
    evaluation.write_correlation_csv(matrix, args.output)
    print(evaluation.render_correlation(matrix), end="")
    print(f"correlated {len(names)} methods over {len(ordered)} articles -> {args.output}")
    return 0


def cmd_report(args: argparse.Namespace, config: dict) -> int:
    rows = evaluation.read_report_csv(_require_file(args.rows, "report rows file"))
    if args.layout == "lexicon":
        text = evaluation.render_lexicon_table(rows)
    else:
        text = evaluation.render_model_table(rows)
    if args.output:
        Path(args.output).write_text(text, "utf-8")
    print(text, end="")
    return 0


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentikit",
        description="Financial-news sentiment toolkit: lexicons, classical models and a Bi-LSTM.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (or set SENTIKIT_CONFIG)")
    common.add_argument("--seed", type=int, help="global seed; component seeds derive from it")
    common.add_argument("--jobs", type=int, default=1, help="worker cap for parallel steps")
    sub = parser.add_subparsers(dest="command", metavar="command")

    field_kw = dict(choices=("headline_synopsis", "full_text"), default="headline_synopsis")
    segment_kw = dict(choices=("all", "financial", "non_financial"), default="all")

    p = sub.add_parser("ingest", parents=[common], help="parse raw news records into the corpus format")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"))
    p.add_argument("--top-sectors", type=int, dest="top_sectors")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("preprocess", parents=[common], help="clean text and normalise sectors")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--min-full-text-chars", type=int, dest="min_full_text_chars")
    p.add_argument("--top-sectors", type=int, dest="top_sectors")
    p.add_argument("--stopwords", help="stopword file, one word per line")
    p.add_argument("--whitelist", help="comma-separated stopwords to keep")
    p.set_defaults(handler=cmd_preprocess)

    p = sub.add_parser("sample", parents=[common], help="draw a stratified annotation sample")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--size", type=int, help="explicit sample size (overrides confidence/margin)")
    p.add_argument("--confidence", type=float)
    p.add_argument("--margin", type=float)
    p.add_argument("--round-to", type=int, dest="round_to", help="round size up to this multiple")
    p.add_argument("--by", default="sector_norm", help="article attribute to stratify on")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("annotate", parents=[common], help="interactively score a sample (-2..2, no 0)")
    p.add_argument("--sample", required=True)
    p.add_argument("--rater", required=True)
    p.add_argument("--output", required=True, help="progress CSV, appended to on resume")
    p.add_argument("--show-full-text", action="store_true", dest="show_full_text")
    p.set_defaults(handler=cmd_annotate)

    p = sub.add_parser("aggregate-labels", parents=[common], help="combine rater judgments into labels")
    p.add_argument("--sample", required=True)
    p.add_argument("--annotations", required=True, nargs="+")
    p.add_argument("--raters-required", type=int, dest="raters_required")
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_aggregate_labels)

    p = sub.add_parser("score-lexicon", parents=[common], help="score every article with one lexicon")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--engine", choices=("vader", "lm"), required=True)
    p.add_argument("--lexicon", help="lexicon path, builtin:vader or builtin:lm-demo")
    p.add_argument("--lexicon-format", choices=("vader_tsv", "lm_csv", "valence_csv"),
                   dest="lexicon_format")
    p.add_argument("--field", **field_kw)
    p.set_defaults(handler=cmd_score_lexicon)

    p = sub.add_parser("merge-lexicons", parents=[common], help="fold one lexicon into the other")
    p.add_argument("--strategy", choices=("lm-in-vader", "vader-in-lm"), required=True)
    p.add_argument("--vader", default="builtin:vader")
    p.add_argument("--lm", default="builtin:lm-demo")
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_merge_lexicons)

    p = sub.add_parser("diff-lexicons", parents=[common], help="set statistics between two lexicons")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--left-format", choices=("vader_tsv", "lm_csv", "valence_csv"), dest="left_format")
    p.add_argument("--right-format", choices=("vader_tsv", "lm_csv", "valence_csv"), dest="right_format")
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_diff_lexicons)

    p = sub.add_parser("train-tokenizer", parents=[common], help="learn a wordpiece vocabulary")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--field", choices=("headline_synopsis", "full_text", "both"),
                   default="headline_synopsis")
    p.add_argument("--segment", **segment_kw)
    p.add_argument("--vocab-size", type=int, dest="vocab_size")
    p.add_argument("--max-word-chars", type=int, dest="max_word_chars")
    p.set_defaults(handler=cmd_train_tokenizer)

    p = sub.add_parser("encode", parents=[common], help="wordpiece-encode articles or one text")
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--text", help="encode this string and print tokens/ids")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--field", **field_kw)
    p.set_defaults(handler=cmd_encode)

    p = sub.add_parser("train-classical", parents=[common], help="fit nb/tree/bagging/forest on tf-idf")
    p.add_argument("--model", choices=CLASSICAL_METHODS, required=True)
    p.add_argument("--corpus", required=True, help="preprocessed corpus")
    p.add_argument("--labels", required=True)
    p.add_argument("--field", **field_kw)
    p.add_argument("--segment", **segment_kw)
    p.add_argument("--test-fraction", type=float, dest="test_fraction")
    p.add_argument("--max-depth", type=int, dest="max_depth")
    p.add_argument("--n-trees", type=int, dest="n_trees")
    p.add_argument("--alpha", type=float)
    p.add_argument("--output", required=True, help="model JSON path")
    p.add_argument("--vectorizer", help="tf-idf CSV path (default: alongside the model)")
    p.add_argument("--report", help="EvalRow CSV to create or update")
    p.set_defaults(handler=cmd_train_classical)

    p = sub.add_parser("train-bilstm", parents=[common], help="train the bidirectional LSTM")
    p.add_argument("--corpus", required=True, help="preprocessed corpus")
    p.add_argument("--labels", required=True)
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--field", **field_kw)
    p.add_argument("--segment", choices=("all", "financial", "non_financial"), default="financial")
    p.add_argument("--epochs", type=int)
    p.add_argument("--d-embed", type=int, dest="d_embed")
    p.add_argument("--hidden-size", type=int, dest="hidden_size")
    p.add_argument("--max-seq-len", type=int, dest="max_seq_len")
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--validation-fraction", type=float, dest="validation_fraction")
    p.add_argument("--optimizer", choices=("sgd", "adam"))
    p.add_argument("--test-fraction", type=float, dest="test_fraction",
                   help="held out before training; evaluate uses the same split")
    p.add_argument("--output", required=True, help="checkpoint path")
    p.add_argument("--history", help="optional per-epoch metrics CSV")
    p.set_defaults(handler=cmd_train_bilstm)

    p = sub.add_parser("evaluate", parents=[common], help="add one method's row to a report")
    p.add_argument("--method", required=True,
                   choices=LEXICON_METHODS + CLASSICAL_METHODS + ("bilstm",))
    p.add_argument("--corpus", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--field", **field_kw)
    p.add_argument("--segment", **segment_kw)
    p.add_argument("--report", required=True)
    p.add_argument("--lexicon", help="lexicon path or builtin name (lexicon methods)")
    p.add_argument("--lexicon-format", choices=("vader_tsv", "lm_csv", "valence_csv"),
                   dest="lexicon_format")
    p.add_argument("--vader", help="vader-side source for merge methods")
    p.add_argument("--lm", help="lm-side source for merge methods")
    p.add_argument("--model", dest="model_path", help="model file (classical or bilstm)")
    p.add_argument("--vectorizer", help="tf-idf CSV (classical)")
    p.add_argument("--tokenizer", help="wordpiece vocab (bilstm)")
    p.add_argument("--test-fraction", type=float, dest="test_fraction")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("correlate", parents=[common], help="correlate per-article score files")
    p.add_argument("--scores", required=True, nargs="+")
    p.add_argument("--names", help="comma-separated method names (default: file stems)")
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_correlate)

    p = sub.add_parser("report", parents=[common], help="render a report CSV as an aligned table")
    p.add_argument("--rows", required=True)
    p.add_argument("--layout", choices=("lexicon", "model"), required=True)
    p.add_argument("--output")
    p.set_defaults(handler=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return 1
    try:
        config = _load_config(args.config)
        return args.handler(args, config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # every validation error surfaces as one line
        message = str(exc).replace("\n", " ") or type(exc).__name__
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
