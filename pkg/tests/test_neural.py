"""Bi-LSTM forward/backward correctness, training behavior, checkpoints."""

from __future__ import annotations

import copy
import random

import numpy as np
import pytest

from sentikit.neural import (
    BiLstmModel,
    LstmCell,
    TrainConfig,
    TrainingDiverged,
    backward,
    forward,
    forward_batch,
    init_model,
    load_checkpoint,
    loss,
    predict_sentiment,
    save_checkpoint,
    train,
)
from sentikit.sampling import Label
from sentikit.tokenization import WordPieceModel

TINY = dict(vocab_size=7, d_embed=3, hidden_size=4, max_seq_len=6)


def tiny_model(seed=0):
    return init_model(seed=seed, **TINY)


def conditioned_model(seed):
    """Random parameters away from the saturation plateaus.

    Healthy gradient magnitudes keep the finite-difference quotient well
    above roundoff, which is what a relative-error comparison needs.
    """
    model = tiny_model()
    rng = np.random.default_rng(seed)
    model.embedding = rng.normal(0.0, 1.0, model.embedding.shape)
    model.embedding[model.pad_id] = 0.0
    for cell in (model.forward_cell, model.backward_cell):
        cell.W = rng.uniform(-0.5, 0.5, cell.W.shape)
        cell.U = rng.uniform(-0.5, 0.5, cell.U.shape)
        cell.b = rng.uniform(-0.5, 0.5, cell.b.shape)
    model.head_w = rng.uniform(-0.5, 0.5, model.head_w.shape)
    model.head_b = rng.uniform(-0.5, 0.5, model.head_b.shape)
    return model


BATCH = [([0, 2, 4], 1), ([5, 1], 0), ([3, 3, 3, 6, 2], 1)]


class TestForward:
    def test_zero_parameters_give_half(self):
        model = tiny_model()
        for name in ("embedding", "head_w", "head_b"):
            setattr(model, name, np.zeros_like(getattr(model, name)))
        for cell in (model.forward_cell, model.backward_cell):
            cell.W[:] = 0.0
            cell.U[:] = 0.0
            cell.b[:] = 0.0
        assert forward(model, [1, 2, 3]) == pytest.approx(0.5)

    def test_padding_does_not_change_short_sequences(self):
        model = conditioned_model(3)
        alone = forward_batch(model, [[1, 2]])[0]
        padded = forward_batch(model, [[1, 2], [3, 4, 5, 6, 1]])[0]
        assert alone == pytest.approx(padded, abs=1e-12)

    def test_direction_symmetry_under_mirror(self):
        """Swapping the two cells and reversing the input is a no-op."""
        model = conditioned_model(4)
        mirrored = model.copy()
        mirrored.forward_cell, mirrored.backward_cell = (
            LstmCell(W=model.backward_cell.W.copy(), U=model.backward_cell.U.copy(),
                     b=model.backward_cell.b.copy()),
            LstmCell(W=model.forward_cell.W.copy(), U=model.forward_cell.U.copy(),
                     b=model.forward_cell.b.copy()),
        )
        h = model.hidden_size
        mirrored.head_w = np.concatenate([model.head_w[h:], model.head_w[:h]])
        ids = [1, 2, 3, 4]
        assert forward(model, ids) == pytest.approx(forward(mirrored, ids[::-1]), abs=1e-12)

    def test_out_of_range_ids_rejected(self):
        model = tiny_model()
        with pytest.raises(ValueError):
            forward(model, [0, TINY["vocab_size"]])

    def test_sequences_truncate_at_max_len(self):
        model = conditioned_model(5)
        long_ids = [1, 2, 3, 4, 5, 6, 1, 2]
        assert forward(model, long_ids) == pytest.approx(
            forward(model, long_ids[: TINY["max_seq_len"]]), abs=1e-12
        )


def param_tensors(model):
    """Live parameter arrays keyed by the gradient dict's names."""
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


def max_relative_fd_error(model, ids, y, probes_per_tensor=12, eps=1e-5):
    # central differences carry ~eps_machine*|loss|/(2*eps) = 5e-12 of
    # roundoff, so gradients under the 1e-7 denominator floor cannot be
    # distinguished from that noise and are compared in absolute terms
    grads = backward(model, ids, y)
    worst = 0.0
    for name, tensor in param_tensors(model).items():
        flat = tensor.reshape(-1)
        flat_grad = grads[name].reshape(-1)
        rng = random.Random(name)
        probes = rng.sample(range(flat.size), min(probes_per_tensor, flat.size))
        for idx in probes:
            keep = flat[idx]
            flat[idx] = keep + eps
            up = loss(forward(model, ids), y)
            flat[idx] = keep - eps
            down = loss(forward(model, ids), y)
            flat[idx] = keep
            fd = (up - down) / (2 * eps)
            denom = max(abs(fd), abs(flat_grad[idx]), 1e-7)
            worst = max(worst, abs(fd - flat_grad[idx]) / denom)
    return worst


class TestGradients:
    def test_finite_difference_check(self):
        model = conditioned_model(11)
        for ids, y in BATCH:
            assert max_relative_fd_error(model, ids, y) < 1e-4

    def test_label_flip_negates_score_gradient(self):
        # dL/dscore = p - y, so labels 1 and 0 give gradients p-1 and p
        model = conditioned_model(12)
        ids = BATCH[0][0]
        pos = backward(model, ids, 1)
        neg = backward(model, ids, 0)
        diff = neg["head_b"] - pos["head_b"]
        assert diff == pytest.approx(np.array([1.0]), abs=1e-12)

    def test_unseen_embedding_rows_get_zero_gradient(self):
        model = conditioned_model(13)
        grads = backward(model, [1, 2], 1)
        untouched = [i for i in range(TINY["vocab_size"]) if i not in (1, 2)]
        assert np.all(grads["embedding"][untouched] == 0.0)
        assert np.all(grads["embedding"][model.pad_id] == 0.0)


class TestTrainConfig:
    def test_zero_learning_rate_is_allowed(self):
        TrainConfig(epochs=1, learning_rate=0.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(epochs=0),
            dict(epochs=1, learning_rate=-1e-3),
            dict(epochs=1, batch_size=0),
            dict(epochs=1, validation_fraction=1.0),
            dict(epochs=1, optimizer="rmsprop"),
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


class TestTraining:
    def test_zero_learning_rate_leaves_parameters_unchanged(self):
        model = tiny_model(seed=21)
        before = copy.deepcopy(model)
        result = train(
            model, BATCH * 4, TrainConfig(epochs=2, learning_rate=0.0, validation_fraction=0.0)
        )
        after = result.model
        assert np.array_equal(after.embedding, before.embedding)
        assert np.array_equal(after.forward_cell.W, before.forward_cell.W)
        assert np.array_equal(after.head_w, before.head_w)

    def test_training_is_deterministic(self):
        data = BATCH * 6
        results = []
        for _ in range(2):
            result = train(tiny_model(seed=2), data, TrainConfig(epochs=3, seed=5))
            results.append(result)
        a, b = results
        assert np.array_equal(a.model.embedding, b.model.embedding)
        assert np.array_equal(a.model.head_w, b.model.head_w)
        assert a.history == b.history

    def test_history_shape_and_metrics(self):
        result = train(tiny_model(), BATCH * 10, TrainConfig(epochs=3, seed=1))
        assert [m.epoch for m in result.history] == [1, 2, 3]
        for metrics in result.history:
            assert 0.0 <= metrics.train_accuracy <= 1.0
            assert metrics.val_loss is not None

    def test_truncation_counted(self):
        long_example = ([1, 2, 3, 4, 5, 6, 1], 1)
        result = train(
            tiny_model(), [long_example] + BATCH * 3,
            TrainConfig(epochs=1, validation_fraction=0.0),
        )
        assert result.truncated_sequences == 1

    def test_separable_task_reaches_high_accuracy(self):
        rng = random.Random(0)
        up, down = 1, 2
        data = []
        for _ in range(120):
            label = rng.randint(0, 1)
            ids = [rng.choice([3, 4, 5]) for _ in range(rng.randint(2, 5))]
            ids[rng.randrange(len(ids))] = up if label else down
            data.append((ids, label))
        result = train(
            tiny_model(seed=3),
            data,
            TrainConfig(epochs=20, seed=3, learning_rate=0.02),
        )
        assert max(m.val_accuracy for m in result.history) >= 0.95

    def test_divergence_is_reported(self):
        config = TrainConfig(
            epochs=1, learning_rate=1e308, gradient_clip_norm=None, batch_size=2,
            validation_fraction=0.0,
        )
        # the overflow that produces the non-finite loss is the point here
        with np.errstate(all="ignore"), pytest.raises(TrainingDiverged):
            train(tiny_model(), BATCH * 4, config)

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError):
            train(tiny_model(), [], TrainConfig(epochs=1))


class TestCheckpoint:
    def test_round_trip_preserves_everything(self, tmp_path):
        model = conditioned_model(31)
        path = tmp_path / "model.ckpt"
        save_checkpoint(model, path, vocab_hash="abc123")
        loaded, vocab_hash = load_checkpoint(path)
        assert vocab_hash == "abc123"
        assert np.array_equal(loaded.embedding, model.embedding)
        assert np.array_equal(loaded.backward_cell.U, model.backward_cell.U)
        assert loaded.max_seq_len == model.max_seq_len
        assert forward(loaded, [1, 2, 3]) == forward(model, [1, 2, 3])

    def test_written_bytes_stable(self, tmp_path):
        model = tiny_model(seed=9)
        a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
        save_checkpoint(model, a, vocab_hash="h")
        save_checkpoint(model, b, vocab_hash="h")
        assert a.read_bytes() == b.read_bytes()

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "model.ckpt"
        save_checkpoint(tiny_model(), path, vocab_hash="h")
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(ValueError):
            load_checkpoint(path)


class TestPredictSentiment:
    TOKENIZER = WordPieceModel(vocab=["[UNK]", "u", "d", "##p", "up", "down"])

    def test_label_follows_probability(self):
        model = init_model(vocab_size=len(self.TOKENIZER), d_embed=3, hidden_size=3, seed=1)
        pred = predict_sentiment(model, self.TOKENIZER, "up down up")
        assert pred.label in (Label.POSITIVE, Label.NEGATIVE)
        assert pred.no_signal is False
        assert (pred.label is Label.POSITIVE) == (pred.probability >= 0.5)

    def test_unknown_only_text_is_no_signal(self):
        model = init_model(vocab_size=len(self.TOKENIZER), d_embed=3, hidden_size=3, seed=1)
        pred = predict_sentiment(model, self.TOKENIZER, "zzz qqq")
        assert pred.no_signal and pred.label is None and pred.probability is None

    def test_empty_text_is_no_signal(self):
        model = init_model(vocab_size=len(self.TOKENIZER), d_embed=3, hidden_size=3, seed=1)
        assert predict_sentiment(model, self.TOKENIZER, "   ").no_signal

    def test_vocabulary_size_mismatch_rejected(self):
        model = init_model(vocab_size=3, d_embed=3, hidden_size=3, seed=1)
        with pytest.raises(ValueError):
            predict_sentiment(model, self.TOKENIZER, "up")


class TestInit:
    def test_forget_gate_bias_is_one(self):
        model = tiny_model()
        h = model.hidden_size
        for cell in (model.forward_cell, model.backward_cell):
            assert np.all(cell.b[h : 2 * h] == 1.0)

    def test_pad_row_is_zero(self):
        model = tiny_model()
        assert np.all(model.embedding[model.pad_id] == 0.0)

    def test_same_seed_same_model(self):
        a, b = tiny_model(seed=5), tiny_model(seed=5)
        assert np.array_equal(a.embedding, b.embedding)
        assert np.array_equal(a.forward_cell.W, b.forward_cell.W)

    def test_shape_validation(self):
        model = tiny_model()
        with pytest.raises(ValueError):
            BiLstmModel(
                embedding=model.embedding[:, :2],
                forward_cell=model.forward_cell,
                backward_cell=model.backward_cell,
                head_w=model.head_w,
                head_b=model.head_b,
                d_embed=model.d_embed,
                hidden_size=model.hidden_size,
                vocab_size=model.vocab_size,
                max_seq_len=model.max_seq_len,
            )
