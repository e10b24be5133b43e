"""Bidirectional LSTM sentiment classifier, implemented on numpy.

Token ids pass through a trainable embedding, one LSTM runs left to
right and another right to left, the two final hidden states are
concatenated, and a dense sigmoid head yields the probability that the
text is positive.  Training is mini-batch gradient descent (sgd or
adam) on binary cross-entropy with exact backpropagation through time;
the gradients are verified against finite differences in the test
suite.

Gate blocks inside each cell's stacked weights are ordered input,
forget, candidate, output.  Batches pad with a reserved id equal to
``vocab_size`` whose embedding row is frozen at zero; padded positions
carry the previous hidden and cell state through unchanged, so padding
never affects the result.

Checkpoints are a single file: one JSON header line (dims, vocabulary
hash, parameter names and shapes) followed by every parameter tensor
as row-major little-endian float64 bytes in header order.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import PreprocessConfig, clean_text
from .sampling import Label
from .seeding import derive_seed
from .tokenization import WordPieceModel, encode_ids

logger = logging.getLogger(__name__)

_LOSS_EPS = 1e-12
_PARAM_NAMES = (
    "embedding",
    "fw_W", "fw_U", "fw_b",
    "bw_W", "bw_U", "bw_b",
    "head_w", "head_b",
)


class TrainingDiverged(RuntimeError):
    """Raised when the training loss stops being finite."""


@dataclass
class LstmCell:
    """One direction's parameters; gate rows stack as i, f, g, o."""

    W: np.ndarray  # (4h, d_embed)
    U: np.ndarray  # (4h, h)
    b: np.ndarray  # (4h,)


@dataclass
class BiLstmModel:
    embedding: np.ndarray  # (vocab_size + 1, d_embed); last row = frozen pad
    forward_cell: LstmCell
    backward_cell: LstmCell
    head_w: np.ndarray  # (2h,)
    head_b: np.ndarray  # (1,)
    d_embed: int
    hidden_size: int
    vocab_size: int
    max_seq_len: int

    def __post_init__(self) -> None:
        h, d = self.hidden_size, self.d_embed
        expected = {
            "embedding": (self.vocab_size + 1, d),
            "head_w": (2 * h,),
            "head_b": (1,),
        }
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ValueError(f"{name} has shape {got}, expected {shape}")
        for tag, cell in (("forward", self.forward_cell), ("backward", self.backward_cell)):
            if cell.W.shape != (4 * h, d) or cell.U.shape != (4 * h, h) or cell.b.shape != (4 * h,):
                raise ValueError(f"{tag} cell shapes inconsistent with dims")
        for name, arr in self._params():
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite values")

    @property
    def pad_id(self) -> int:
        return self.vocab_size

    def _params(self) -> list[tuple[str, np.ndarray]]:
        return [
            ("embedding", self.embedding),
            ("fw_W", self.forward_cell.W),
            ("fw_U", self.forward_cell.U),
            ("fw_b", self.forward_cell.b),
            ("bw_W", self.backward_cell.W),
            ("bw_U", self.backward_cell.U),
            ("bw_b", self.backward_cell.b),
            ("head_w", self.head_w),
            ("head_b", self.head_b),
        ]

    def copy(self) -> "BiLstmModel":
        return BiLstmModel(
            embedding=self.embedding.copy(),
            forward_cell=LstmCell(self.forward_cell.W.copy(), self.forward_cell.U.copy(), self.forward_cell.b.copy()),
            backward_cell=LstmCell(self.backward_cell.W.copy(), self.backward_cell.U.copy(), self.backward_cell.b.copy()),
            head_w=self.head_w.copy(),
            head_b=self.head_b.copy(),
            d_embed=self.d_embed,
            hidden_size=self.hidden_size,
            vocab_size=self.vocab_size,
            max_seq_len=self.max_seq_len,
        )


def init_model(
    vocab_size: int,
    d_embed: int = 64,
    hidden_size: int = 64,
    max_seq_len: int = 256,
    seed: int = 0,
) -> BiLstmModel:
    """Seeded initial parameters.

    Recurrent and head weights draw uniform(-0.08, 0.08), embeddings
    normal(0, 0.01), biases start at zero except the forget gate at
    +1.0.  The pad row is zeroed.
    """
    if vocab_size < 1:
        raise ValueError("vocab_size must be at least 1")
    if min(d_embed, hidden_size, max_seq_len) < 1:
        raise ValueError("dims must be positive")
    rng = np.random.default_rng(derive_seed(seed, "bilstm-init"))
    h, d = hidden_size, d_embed
    embedding = rng.normal(0.0, 0.01, size=(vocab_size + 1, d))
    embedding[vocab_size] = 0.0
    cells = []
    for _ in range(2):
        W = rng.uniform(-0.08, 0.08, size=(4 * h, d))
        U = rng.uniform(-0.08, 0.08, size=(4 * h, h))
        b = np.zeros(4 * h)
        b[h:2 * h] = 1.0
        cells.append(LstmCell(W=W, U=U, b=b))
    head_w = rng.uniform(-0.08, 0.08, size=2 * h)
    return BiLstmModel(
        embedding=embedding,
        forward_cell=cells[0],
        backward_cell=cells[1],
        head_w=head_w,
        head_b=np.zeros(1),
        d_embed=d,
        hidden_size=h,
        vocab_size=vocab_size,
        max_seq_len=max_seq_len,
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _pad_batch(model: BiLstmModel, sequences: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    if not sequences:
        raise ValueError("empty batch")
    for ids in sequences:
        if not ids:
            raise ValueError("cannot run an empty token sequence")
        for i in ids:
            if not 0 <= i < model.vocab_size:
                raise ValueError(f"token id {i} outside vocabulary of size {model.vocab_size}")
    clipped = [list(ids[: model.max_seq_len]) for ids in sequences]
    longest = max(len(ids) for ids in clipped)
    X = np.full((len(clipped), longest), model.pad_id, dtype=int)
    mask = np.zeros((len(clipped), longest))
    for r, ids in enumerate(clipped):
        X[r, : len(ids)] = ids
        mask[r, : len(ids)] = 1.0
    return X, mask


@dataclass
class _DirectionTrace:
    """Everything the backward pass needs, per timestep."""

    gates: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]
    tanh_c: list[np.ndarray]
    h_prev: list[np.ndarray]
    c_prev: list[np.ndarray]
    h_final: np.ndarray


def _run_direction(cell: LstmCell, emb: np.ndarray, mask: np.ndarray, order: range, h: int) -> _DirectionTrace:
    B = emb.shape[0]
    h_state = np.zeros((B, h))
    c_state = np.zeros((B, h))
    trace = _DirectionTrace(gates=[], tanh_c=[], h_prev=[], c_prev=[], h_final=h_state)
    for t in order:
        x_t = emb[:, t]
        m = mask[:, t:t + 1]
        a = x_t @ cell.W.T + h_state @ cell.U.T + cell.b
        i = _sigmoid(a[:, 0 * h:1 * h])
        f = _sigmoid(a[:, 1 * h:2 * h])
        g = np.tanh(a[:, 2 * h:3 * h])
        o = _sigmoid(a[:, 3 * h:4 * h])
        c_new = f * c_state + i * g
        tanh_c = np.tanh(c_new)
        h_new = o * tanh_c
        trace.gates.append((i, f, g, o))
        trace.tanh_c.append(tanh_c)
        trace.h_prev.append(h_state)
        trace.c_prev.append(c_state)
        # padded positions carry state through untouched
        h_state = m * h_new + (1.0 - m) * h_state
        c_state = m * c_new + (1.0 - m) * c_state
    trace.h_final = h_state
    return trace


def _forward_batch(model: BiLstmModel, X: np.ndarray, mask: np.ndarray):
    emb = model.embedding[X]
    T = X.shape[1]
    fw = _run_direction(model.forward_cell, emb, mask, range(T), model.hidden_size)
    bw = _run_direction(model.backward_cell, emb, mask, range(T - 1, -1, -1), model.hidden_size)
    concat = np.concatenate([fw.h_final, bw.h_final], axis=1)
    probs = _sigmoid(concat @ model.head_w + model.head_b[0])
    return probs, concat, fw, bw, emb


def forward_batch(model: BiLstmModel, sequences: Sequence[Sequence[int]]) -> np.ndarray:
    """Probabilities for many sequences at once; padding cannot leak."""
    X, mask = _pad_batch(model, sequences)
    probs, *_ = _forward_batch(model, X, mask)
    return probs


def forward(model: BiLstmModel, ids: Sequence[int]) -> float:
    """Probability that one token-id sequence is positive."""
    if len(ids) > model.max_seq_len:
        logger.debug("sequence of %d tokens truncated to %d", len(ids), model.max_seq_len)
    return float(forward_batch(model, [ids])[0])


def loss(p: float, y: int) -> float:
    """Binary cross-entropy with the probability clamped to (eps, 1-eps)."""
    p = min(max(p, _LOSS_EPS), 1.0 - _LOSS_EPS)
    return -(y * math.log(p) + (1 - y) * math.log(1.0 - p))


def _zero_grads(model: BiLstmModel) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in model._params()}


def _backprop_direction(
    cell: LstmCell,
    trace: _DirectionTrace,
    emb: np.ndarray,
    mask: np.ndarray,
    order: range,
    dh_final: np.ndarray,
    grads: dict[str, np.ndarray],
    prefix: str,
    d_emb: np.ndarray,
) -> None:
    h = cell.U.shape[1]
    B = emb.shape[0]
    dh = dh_final
    dc = np.zeros((B, h))
    for step in range(len(trace.gates) - 1, -1, -1):
        t = order[step]
        m = mask[:, t:t + 1]
        i, f, g, o = trace.gates[step]
        tanh_c = trace.tanh_c[step]
        h_prev = trace.h_prev[step]
        c_prev = trace.c_prev[step]
        dh_new = dh * m
        dc_new = dc * m
        carry_h = dh * (1.0 - m)
        carry_c = dc * (1.0 - m)
        do = dh_new * tanh_c
        dc_total = dc_new + dh_new * o * (1.0 - tanh_c * tanh_c)
        di = dc_total * g
        df = dc_total * c_prev
        dg = dc_total * i
        dc = dc_total * f + carry_c
        da = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f), dg * (1.0 - g * g), do * o * (1.0 - o)],
            axis=1,
        )
        grads[prefix + "_W"] += da.T @ emb[:, t]
        grads[prefix + "_U"] += da.T @ h_prev
        grads[prefix + "_b"] += da.sum(axis=0)
        d_emb[:, t] += da @ cell.W
        dh = da @ cell.U + carry_h


def _backward_batch(
    model: BiLstmModel, X: np.ndarray, mask: np.ndarray, y: np.ndarray
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Summed loss gradients over the batch, plus the probabilities."""
    probs, concat, fw, bw, emb = _forward_batch(model, X, mask)
    grads = _zero_grads(model)
    ds = probs - y  # d(sum of BCE)/d(pre-sigmoid score)
    grads["head_w"] += concat.T @ ds
    grads["head_b"] += np.array([ds.sum()])
    dconcat = np.outer(ds, model.head_w)
    h = model.hidden_size
    d_emb = np.zeros_like(emb)
    T = X.shape[1]
    _backprop_direction(model.forward_cell, fw, emb, mask, range(T), dconcat[:, :h], grads, "fw", d_emb)
    _backprop_direction(model.backward_cell, bw, emb, mask, range(T - 1, -1, -1), dconcat[:, h:], grads, "bw", d_emb)
    np.add.at(grads["embedding"], X, d_emb)
    grads["embedding"][model.pad_id] = 0.0
    return grads, probs


def backward(model: BiLstmModel, ids: Sequence[int], y: int) -> dict[str, np.ndarray]:
    """Exact gradients of loss(forward(ids), y) for every parameter."""
    if y not in (0, 1):
        raise ValueError("label must be 0 or 1")
    X, mask = _pad_batch(model, [ids])
    grads, _ = _backward_batch(model, X, mask, np.array([float(y)]))
    return grads


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    seed: int = 0
    learning_rate: float = 1e-3
    batch_size: int = 32
    gradient_clip_norm: float | None = 5.0
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    validation_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if not 0 <= self.validation_fraction < 1:
            raise ValueError("validation_fraction must be in [0, 1)")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.gradient_clip_norm is not None and self.gradient_clip_norm <= 0:
            raise ValueError("gradient_clip_norm must be positive when set")


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_loss: float | None
    val_accuracy: float | None


@dataclass(frozen=True)
class TrainResult:
    model: BiLstmModel
    history: tuple[EpochMetrics, ...]
    truncated_sequences: int


def _metrics(model: BiLstmModel, data: list[tuple[list[int], int]], batch_size: int) -> tuple[float, float]:
    total_loss = 0.0
    correct = 0
    for start in range(0, len(data), batch_size):
        chunk = data[start:start + batch_size]
        probs = forward_batch(model, [ids for ids, _ in chunk])
        for p, (_, y) in zip(probs, chunk):
            total_loss += loss(float(p), y)
            correct += int((p >= 0.5) == bool(y))
    return total_loss / len(data), correct / len(data)


def train(model: BiLstmModel, dataset: Sequence[tuple[Sequence[int], int]], cfg: TrainConfig) -> TrainResult:
    """Mini-batch training; returns a new model plus per-epoch metrics.

    Shuffling and the validation split derive from cfg.seed, so the
    same inputs always produce the same parameters.  A non-finite batch
    loss aborts with TrainingDiverged.
    """
    if not dataset:
        raise ValueError("empty training dataset")
    truncated = 0
    prepared: list[tuple[list[int], int]] = []
    for ids, y in dataset:
        if y not in (0, 1):
            raise ValueError("labels must be 0 or 1")
        if not ids:
            raise ValueError("cannot train on an empty token sequence")
        if len(ids) > model.max_seq_len:
            truncated += 1
        prepared.append((list(ids[: model.max_seq_len]), int(y)))
    if truncated:
        logger.info("truncated %d of %d sequences to %d tokens", truncated, len(prepared), model.max_seq_len)

    val: list[tuple[list[int], int]] = []
    train_set = prepared
    if cfg.validation_fraction > 0:
        by_label: dict[int, list[int]] = {0: [], 1: []}
        for idx, (_, y) in enumerate(prepared):
            by_label[y].append(idx)
        rng = random.Random(derive_seed(cfg.seed, "val-split"))
        val_idx: set[int] = set()
        for y in (0, 1):
            members = by_label[y]
            take = round(len(members) * cfg.validation_fraction)
            val_idx.update(rng.sample(members, take))
        train_set = [ex for i, ex in enumerate(prepared) if i not in val_idx]
        val = [ex for i, ex in enumerate(prepared) if i in val_idx]
        if not train_set:
            raise ValueError("validation split consumed every example")

    out = model.copy()
    params = dict(out._params())
    if cfg.optimizer == "adam":
        m_state = {k: np.zeros_like(v) for k, v in params.items()}
        v_state = {k: np.zeros_like(v) for k, v in params.items()}
        steps = 0
    shuffle_rng = random.Random(derive_seed(cfg.seed, "shuffle"))
    history = []
    for epoch in range(cfg.epochs):
        order = list(range(len(train_set)))
        shuffle_rng.shuffle(order)
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_set[i] for i in order[start:start + cfg.batch_size]]
            X, mask = _pad_batch(out, [ids for ids, _ in batch])
            y_vec = np.array([float(y) for _, y in batch])
            grads, probs = _backward_batch(out, X, mask, y_vec)
            batch_loss = sum(loss(float(p), int(y)) for p, y in zip(probs, y_vec))
            if not math.isfinite(batch_loss):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch + 1}, batch {start // cfg.batch_size + 1}"
                )
            for g in grads.values():
                g /= len(batch)
            if cfg.gradient_clip_norm is not None:
                norm = math.sqrt(sum(float((g * g).sum()) for g in grads.values()))
                if norm > cfg.gradient_clip_norm:
                    scale = cfg.gradient_clip_norm / norm
                    for g in grads.values():
                        g *= scale
            if cfg.optimizer == "sgd":
                for name, p in params.items():
                    p -= cfg.learning_rate * grads[name]
            else:
                steps += 1
                for name, p in params.items():
                    m_state[name] = cfg.beta1 * m_state[name] + (1 - cfg.beta1) * grads[name]
                    v_state[name] = cfg.beta2 * v_state[name] + (1 - cfg.beta2) * grads[name] ** 2
                    m_hat = m_state[name] / (1 - cfg.beta1 ** steps)
                    v_hat = v_state[name] / (1 - cfg.beta2 ** steps)
                    p -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
            params["embedding"][out.pad_id] = 0.0
        train_loss, train_acc = _metrics(out, train_set, cfg.batch_size)
        val_loss, val_acc = _metrics(out, val, cfg.batch_size) if val else (None, None)
        history.append(EpochMetrics(epoch + 1, train_loss, train_acc, val_loss, val_acc))
    return TrainResult(model=out, history=tuple(history), truncated_sequences=truncated)


@dataclass(frozen=True)
class SentimentPrediction:
    probability: float | None
    label: Label | None
    no_signal: bool


def predict_sentiment(
    model: BiLstmModel,
    tokenizer: WordPieceModel,
    text: str,
    preprocess: PreprocessConfig | None = None,
) -> SentimentPrediction:
    """Clean, wordpiece-encode and classify one text.

    Probability >= 0.5 reads as positive.  Text that cleans to nothing
    or encodes entirely to the unknown token carries no signal.
    """
    if len(tokenizer) > model.vocab_size:
        raise ValueError(
            f"tokenizer vocabulary ({len(tokenizer)}) exceeds model vocabulary ({model.vocab_size})"
        )
    cleaned = clean_text(text, preprocess or PreprocessConfig())
    ids = encode_ids(tokenizer, cleaned)
    if not ids or all(i == tokenizer.unk_id for i in ids):
        return SentimentPrediction(probability=None, label=None, no_signal=True)
    p = forward(model, ids)
    label = Label.POSITIVE if p >= 0.5 else Label.NEGATIVE
    return SentimentPrediction(probability=p, label=label, no_signal=False)


def save_checkpoint(model: BiLstmModel, path: str | Path, vocab_hash: str) -> None:
    """One JSON header line, then raw little-endian float64 tensors."""
    params = model._params()
    header = {
        "format": "bilstm-checkpoint",
        "version": 1,
        "vocab_size": model.vocab_size,
        "d_embed": model.d_embed,
        "hidden_size": model.hidden_size,
        "max_seq_len": model.max_seq_len,
        "vocab_hash": vocab_hash,
        "params": [{"name": name, "shape": list(arr.shape)} for name, arr in params],
    }
    with Path(path).open("wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        for _, arr in params:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> tuple[BiLstmModel, str]:
    with Path(path).open("rb") as fh:
        header_line = fh.readline()
        blob = fh.read()
    header = json.loads(header_line.decode("utf-8"))
    if header.get("format") != "bilstm-checkpoint" or header.get("version") != 1:
        raise ValueError(f"{path}: not a recognised checkpoint")
    tensors = {}
    offset = 0
    for entry in header["params"]:
        size = int(np.prod(entry["shape"])) if entry["shape"] else 1
        chunk = blob[offset * 8:(offset + size) * 8]
        if len(chunk) != size * 8:
            raise ValueError(f"{path}: truncated checkpoint")
        tensors[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(entry["shape"]).copy()
        offset += size
    if offset * 8 != len(blob):
        raise ValueError(f"{path}: trailing bytes after parameters")
    missing = set(_PARAM_NAMES) - set(tensors)
    if missing:
        raise ValueError(f"{path}: checkpoint missing tensors {sorted(missing)}")
    model = BiLstmModel(
        embedding=tensors["embedding"],
        forward_cell=LstmCell(tensors["fw_W"], tensors["fw_U"], tensors["fw_b"]),
        backward_cell=LstmCell(tensors["bw_W"], tensors["bw_U"], tensors["bw_b"]),
        head_w=tensors["head_w"],
        head_b=tensors["head_b"],
        d_embed=header["d_embed"],
        hidden_size=header["hidden_size"],
        vocab_size=header["vocab_size"],
        max_seq_len=header["max_seq_len"],
    )
    return model, header["vocab_hash"]
