"""Whitespace word tokens and a trainable WordPiece subword vocabulary.

Training scores each adjacent piece pair by count(xy) / (count(x) *
count(y)), frequency-weighted over the corpus, merges the best pair
(ties break lexicographically on the left then the right piece), and
repeats until the vocabulary budget is spent.  Non-initial pieces carry
a continuation prefix.  Encoding is greedy longest-match with no
backtracking; a word that cannot be covered becomes the unknown token.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence


def word_tokenize(text: str) -> list[str]:
    """Whitespace tokens; cleaning happens upstream."""
    return text.split()


DEFAULT_UNK_TOKEN = "[UNK]"
DEFAULT_CONTINUATION_PREFIX = "##"
DEFAULT_MAX_WORD_CHARS = 100


@dataclass
class WordPieceModel:
    vocab: list[str]
    unk_token: str = DEFAULT_UNK_TOKEN
    continuation_prefix: str = DEFAULT_CONTINUATION_PREFIX
    max_word_chars: int = DEFAULT_MAX_WORD_CHARS
    target_vocab_size: int | None = None
    merges: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(set(self.vocab)) != len(self.vocab):
            raise ValueError("vocabulary contains duplicate tokens")
        if self.unk_token not in self.vocab:
            raise ValueError("vocabulary must contain the unknown token")
        self._token_ids = {token: i for i, token in enumerate(self.vocab)}

    def __len__(self) -> int:
        return len(self.vocab)

    def token_id(self, token: str) -> int:
        return self._token_ids[token]

    @property
    def unk_id(self) -> int:
        return self._token_ids[self.unk_token]


def _base_vocab(words: Iterable[str], unk_token: str, prefix: str) -> list[str]:
    # every seen character enters in both initial and continuation form,
    # so any in-alphabet word can always fall back to single characters
    chars = sorted({c for w in words for c in w})
    return [unk_token] + chars + [prefix + c for c in chars]


def _merge_pieces(pieces: list[str], left: str, right: str, joined: str) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(pieces):
        if i + 1 < len(pieces) and pieces[i] == left and pieces[i + 1] == right:
            out.append(joined)
            i += 2
        else:
            out.append(pieces[i])
            i += 1
    return out


def train_wordpiece(
    corpus: Iterable[str],
    target_vocab_size: int,
    unk_token: str = DEFAULT_UNK_TOKEN,
    continuation_prefix: str = DEFAULT_CONTINUATION_PREFIX,
    max_word_chars: int = DEFAULT_MAX_WORD_CHARS,
) -> WordPieceModel:
    """Learn a subword vocabulary from an iterable of documents.

    The budget for merges is ``target_vocab_size`` minus the base
    alphabet (unknown token plus both forms of every seen character);
    a budget below zero is an error.  Training may stop early when no
    adjacent pair remains.
    """
    word_freq = Counter()
    for doc in corpus:
        word_freq.update(word_tokenize(doc))
    if not word_freq:
        raise ValueError("training corpus has no words")

    vocab = _base_vocab(word_freq, unk_token, continuation_prefix)
    if target_vocab_size < len(vocab):
        raise ValueError(
            f"target_vocab_size {target_vocab_size} is below the base "
            f"alphabet size {len(vocab)}"
        )

    plen = len(continuation_prefix)
    segments = {
        w: [w[0]] + [continuation_prefix + c for c in w[1:]] for w in word_freq
    }
    merges: list[tuple[str, str]] = []
    while len(vocab) < target_vocab_size:
        pair_counts: Counter[tuple[str, str]] = Counter()
        piece_counts: Counter[str] = Counter()
        for word, pieces in segments.items():
            freq = word_freq[word]
            for piece in pieces:
                piece_counts[piece] += freq
            for pair in zip(pieces, pieces[1:]):
                pair_counts[pair] += freq
        if not pair_counts:
            break
        best_pair = None
        best_score: Fraction | None = None
        for pair in sorted(pair_counts):
            score = Fraction(
                pair_counts[pair], piece_counts[pair[0]] * piece_counts[pair[1]]
            )
            if best_score is None or score > best_score:
                best_pair, best_score = pair, score
        left, right = best_pair
        joined = left + right[plen:]
        vocab.append(joined)
        merges.append(best_pair)
        segments = {
            w: _merge_pieces(p, left, right, joined) if left in p else p
            for w, p in segments.items()
        }

    return WordPieceModel(
        vocab=vocab,
        unk_token=unk_token,
        continuation_prefix=continuation_prefix,
        max_word_chars=max_word_chars,
        target_vocab_size=target_vocab_size,
        merges=merges,
    )


def encode_word(model: WordPieceModel, word: str) -> list[str]:
    """Greedy longest-match pieces for one word; [unk] if uncoverable."""
    if not word:
        return []
    if len(word) > model.max_word_chars:
        return [model.unk_token]
    tokens = model._token_ids
    prefix = model.continuation_prefix
    pieces: list[str] = []
    start = 0
    while start < len(word):
        lead = prefix if start else ""
        end = len(word)
        while end > start:
            candidate = lead + word[start:end]
            if candidate in tokens:
                pieces.append(candidate)
                break
            end -= 1
        else:
            return [model.unk_token]
        start = end
    return pieces


def encode_text(model: WordPieceModel, text: str) -> list[str]:
    """Pieces for every whitespace word of ``text``, concatenated."""
    out: list[str] = []
    for word in word_tokenize(text):
        out.extend(encode_word(model, word))
    return out


def encode_ids(model: WordPieceModel, text: str) -> list[int]:
    return [model.token_id(p) for p in encode_text(model, text)]


def save_wordpiece(model: WordPieceModel, path: str | Path) -> None:
    """Vocab file with one token per line plus a JSON metadata sidecar."""
    path = Path(path)
    path.write_text("\n".join(model.vocab) + "\n", "utf-8")
    meta = {
        "unk_token": model.unk_token,
        "continuation_prefix": model.continuation_prefix,
        "max_word_chars": model.max_word_chars,
        "target_vocab_size": model.target_vocab_size,
        "merges": [list(m) for m in model.merges],
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=1) + "\n", "utf-8")


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".meta.json")


def vocab_fingerprint(model: WordPieceModel) -> str:
    """Digest of the ordered vocabulary; pairs checkpoints to tokenizers."""
    return hashlib.sha256("\n".join(model.vocab).encode("utf-8")).hexdigest()


def load_wordpiece(path: str | Path) -> WordPieceModel:
    path = Path(path)
    vocab = path.read_text("utf-8").splitlines()
    meta = json.loads(sidecar_path(path).read_text("utf-8"))
    return WordPieceModel(
        vocab=vocab,
        unk_token=meta["unk_token"],
        continuation_prefix=meta["continuation_prefix"],
        max_word_chars=meta["max_word_chars"],
        target_vocab_size=meta.get("target_vocab_size"),
        merges=[tuple(m) for m in meta.get("merges", [])],
    )
