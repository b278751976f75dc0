import numpy as np
import pytest
import torch

from skewkit import fixtures, metrics
from skewkit.encoders import HashTokenizer, TinyEncoder, build_encoder
from skewkit.errors import AllConfigsFailed, CheckpointMismatch, EncoderFailure
from skewkit.finetune import (
    Checkpoint,
    ModelAssembly,
    TrainConfig,
    collate,
    default_config,
    dropout_sweep,
    forward,
    hyperparameter_search,
    predict,
    train,
    weighted_ce_terms,
)
from skewkit.losses import onehot_from_indices, weighted_cross_entropy
from skewkit.textprep import tokenize


def balanced_config(task_id="1A", **overrides):
    defaults = dict(
        task_id=task_id,
        encoder_id="tiny-32",
        dropout_rate=0.0,
        class_weights={"prop": 1.0, "non-prop": 1.0},
        seed=0,
        batch_size=8,
        epochs=2,
    )
    defaults.update(overrides)
    return TrainConfig(**defaults)


def tokenized_batch(texts, max_seq_len=32):
    tok = HashTokenizer()
    return [tokenize(t, tok, max_seq_len, str(i)) for i, t in enumerate(texts)], tok


class TestConfig:
    def test_defaults_follow_the_recipe(self):
        config = default_config("1A")
        assert config.max_seq_len == 128
        assert config.batch_size == 16
        assert config.epochs == 3
        assert config.learning_rate == 4e-5
        assert config.optimizer == "AdamW"
        assert config.class_weights == {"prop": 1.0, "non-prop": 4.0}

    def test_minority_weight_is_explicit_per_task(self):
        # the heavy weight attaches to each task's minority class, by name
        assert default_config("1A").class_weights["non-prop"] == 4.0
        assert default_config("2A").class_weights["disinfo"] == 4.0

    def test_validation(self):
        with pytest.raises(ValueError):
            balanced_config(dropout_rate=1.0)
        with pytest.raises(ValueError):
            balanced_config(class_weights={"prop": 1.0})
        with pytest.raises(ValueError):
            balanced_config(class_weights={"prop": 1.0, "non-prop": 0.0})
        with pytest.raises(ValueError):
            balanced_config(epochs=0)
        with pytest.raises(ValueError):
            balanced_config(optimizer="SGD")

    def test_round_trip(self):
        config = default_config("2A", dropout_rate=0.3, seed=9)
        assert TrainConfig.from_dict(config.to_dict()) == config


class TestEncoders:
    def test_tiny_encoder_is_seeded(self):
        first, _, _ = build_encoder("tiny-16", seed=5)
        second, _, _ = build_encoder("tiny-16", seed=5)
        other, _, _ = build_encoder("tiny-16", seed=6)
        assert torch.equal(first.embedding.weight, second.embedding.weight)
        assert not torch.equal(first.embedding.weight, other.embedding.weight)

    def test_mean_pooling_ignores_padding(self):
        encoder = TinyEncoder(vocab_size=64, hidden_size=8, seed=0)
        ids = torch.tensor([[5, 9, 0, 0]])
        mask = torch.tensor([[1, 1, 0, 0]])
        padded = encoder(ids, mask)
        unpadded = encoder(torch.tensor([[5, 9]]), torch.tensor([[1, 1]]))
        assert torch.allclose(padded, unpadded)

    def test_bad_tiny_id(self):
        with pytest.raises(EncoderFailure):
            build_encoder("tiny-wide")

    def test_unknown_pretrained_id_fails_cleanly(self):
        with pytest.raises(EncoderFailure):
            build_encoder("no/such-model-anywhere")


class TestForward:
    def make_assembly(self, dropout=0.0):
        encoder, tokenizer, hidden = build_encoder("tiny-16", seed=1)
        return ModelAssembly(encoder, hidden, 2, dropout), tokenizer

    def test_shapes_and_row_sums(self):
        assembly, tok = self.make_assembly()
        samples, _ = tokenized_batch(["one", "two words", "three words here"])
        probs = forward(assembly, samples, tok.pad_id)
        assert probs.shape == (3, 2)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-6)

    def test_single_sample_shape(self):
        assembly, tok = self.make_assembly()
        samples, _ = tokenized_batch(["just one"])
        assert forward(assembly, samples, tok.pad_id).shape == (1, 2)

    def test_eval_mode_deterministic(self):
        assembly, tok = self.make_assembly(dropout=0.5)
        samples, _ = tokenized_batch(["a b c", "d e"])
        first = forward(assembly, samples, tok.pad_id, mode="eval")
        second = forward(assembly, samples, tok.pad_id, mode="eval")
        assert np.array_equal(first, second)

    def test_zero_dropout_train_equals_eval(self):
        assembly, tok = self.make_assembly(dropout=0.0)
        samples, _ = tokenized_batch(["a b c", "d e"])
        trained = forward(assembly, samples, tok.pad_id, mode="train")
        evaled = forward(assembly, samples, tok.pad_id, mode="eval")
        assert np.allclose(trained, evaled, atol=1e-6)

    def test_collate_pads_to_batch_width(self):
        samples, tok = tokenized_batch(["a", "a b c d e"])
        ids, mask = collate(samples, tok.pad_id)
        assert ids.shape == mask.shape
        assert ids.shape[1] == max(len(s.token_ids) for s in samples)
        assert mask[0].sum() == len(samples[0].token_ids)


class TestCriterion:
    def test_matches_numpy_reference(self):
        # the torch training criterion and the numpy loss math agree
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 12))
            logits = rng.normal(0, 3, size=(n, 2))
            targets = rng.integers(0, 2, size=n)
            weights = rng.random(2) * 10 + 1e-6
            terms, applied = weighted_ce_terms(
                torch.tensor(logits, dtype=torch.float64),
                torch.tensor(targets, dtype=torch.long),
                torch.tensor(weights, dtype=torch.float64),
            )
            got = float(terms.sum() / applied.sum())
            probs = np.exp(logits - logits.max(axis=1, keepdims=True))
            probs = probs / probs.sum(axis=1, keepdims=True)
            want = weighted_cross_entropy(probs, onehot_from_indices(targets, 2), weights).value
            assert got == pytest.approx(want, rel=1e-9)


class TestTrain:
    def test_loss_decreases_on_separable_data(self):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 64, 8, 8, 0.5, seed=0)
        run = train(balanced_config(encoder_id="tiny-256", epochs=3, batch_size=16), train_split)
        assert len(run.epoch_losses) == 3
        assert run.epoch_losses[-1] < run.epoch_losses[0]
        assert all(loss >= 0 for loss in run.epoch_losses)

    def test_single_epoch(self):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 16, 8, 8, 0.5, seed=0)
        run = train(balanced_config(epochs=1), train_split)
        assert len(run.epoch_losses) == 1

    def test_same_seed_reproduces_losses(self):
        train_split, dev_split, _ = fixtures.make_separable_dataset("1A", 32, 16, 8, 0.5, seed=0)
        config = balanced_config(dropout_rate=0.2, seed=11)
        first = train(config, train_split, dev_split)
        second = train(config, train_split, dev_split)
        assert first.epoch_losses == second.epoch_losses
        assert first.dev_history[-1].micro_f1 == second.dev_history[-1].micro_f1

    def test_different_seed_changes_losses(self):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 32, 8, 8, 0.5, seed=0)
        first = train(balanced_config(seed=1), train_split)
        second = train(balanced_config(seed=2), train_split)
        assert first.epoch_losses != second.epoch_losses

    def test_dev_history_recorded_per_epoch(self):
        train_split, dev_split, _ = fixtures.make_separable_dataset("1A", 32, 16, 8, 0.5, seed=0)
        run = train(balanced_config(epochs=2), train_split, dev_split)
        assert len(run.dev_history) == 2

    def test_checkpoint_persisted(self, tmp_path):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 16, 8, 8, 0.5, seed=0)
        run = train(balanced_config(epochs=1), train_split, run_dir=tmp_path)
        assert run.checkpoint.path == tmp_path / "checkpoint.pt"
        loaded = Checkpoint.load(run.checkpoint.path)
        assert loaded.config == run.config


class TestPredict:
    def test_labels_follow_argmax(self):
        train_split, _, test_split = fixtures.make_separable_dataset("1A", 64, 8, 32, 0.5, seed=0)
        run = train(balanced_config(encoder_id="tiny-256", epochs=3, batch_size=16), train_split)
        labels = predict(run.checkpoint, test_split)
        assert set(labels) <= set(("prop", "non-prop"))
        assert len(labels) == len(test_split)

    def test_smoke_accuracy(self):
        train_split, _, test_split = fixtures.make_separable_dataset("1A", 64, 8, 32, 0.5, seed=0)
        run = train(balanced_config(encoder_id="tiny-256", epochs=3, batch_size=16), train_split)
        pred = predict(run.checkpoint, test_split)
        result = metrics.evaluate(test_split.labels(), pred, ("prop", "non-prop"))
        assert result.micro_f1 >= 0.95

    def test_weighted_imbalanced_smoke(self):
        # the actual recipe: minority class upweighted 4x on skewed data
        train_split, _, test_split = fixtures.make_separable_dataset("1A", 64, 8, 32, 0.25, seed=2)
        config = default_config("1A", encoder_id="tiny-256", dropout_rate=0.0, seed=2)
        run = train(config, train_split)
        pred = predict(run.checkpoint, test_split)
        result = metrics.evaluate(test_split.labels(), pred, ("prop", "non-prop"))
        assert result.micro_f1 >= 0.95

    def test_tie_breaks_to_lower_index(self):
        probs = np.array([[0.5, 0.5], [0.1, 0.9]])
        labels = [("prop", "non-prop")[i] for i in np.argmax(probs, axis=1)]
        assert labels == ["prop", "non-prop"]

    def test_argmax_invariant_under_monotone_rescale(self):
        rng = np.random.default_rng(0)
        probs = rng.random((50, 2))
        probs /= probs.sum(axis=1, keepdims=True)
        base = np.argmax(probs, axis=1)
        rescaled = np.argmax(np.sqrt(probs) * 3.0 + 1.0, axis=1)
        assert np.array_equal(base, rescaled)

    def test_task_mismatch_rejected(self):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 16, 8, 8, 0.5, seed=0)
        other_split, _, _ = fixtures.make_separable_dataset("2A", 16, 8, 8, 0.5, seed=0)
        run = train(balanced_config(epochs=1), train_split)
        with pytest.raises(CheckpointMismatch):
            predict(run.checkpoint, other_split)


class TestSweep:
    def test_four_rate_grid(self, tmp_path):
        train_split, dev_split, test_split = fixtures.make_separable_dataset("1A", 24, 8, 8, 0.5, seed=0)
        report = dropout_sweep(
            balanced_config(epochs=3),
            [0.0, 0.1, 0.2, 0.3],
            train_split,
            dev_split,
            test_split,
            run_dir=tmp_path,
        )
        assert len(report.cells) == 4
        assert all(not cell.failed for cell in report.cells)
        assert len(report.loss_curve_rows()) == 12
        assert all(cell.dev_eval is not None and cell.test_eval is not None for cell in report.cells)

    def test_empty_rates(self):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 16, 8, 8, 0.5, seed=0)
        report = dropout_sweep(balanced_config(), [], train_split)
        assert report.cells == []
        assert report.loss_curve_rows() == []

    def test_two_rate_smoke(self):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 24, 8, 8, 0.5, seed=0)
        report = dropout_sweep(balanced_config(epochs=3), [0.0, 0.5], train_split)
        assert [cell.dropout_rate for cell in report.cells] == [0.0, 0.5]
        assert all(len(cell.run.epoch_losses) == 3 for cell in report.cells)

    def test_failed_cell_marked_and_sweep_continues(self):
        train_split, _, _ = fixtures.make_separable_dataset("1A", 16, 8, 8, 0.5, seed=0)
        report = dropout_sweep(balanced_config(epochs=1), [0.0, 2.0], train_split)
        statuses = {cell.dropout_rate: cell.failed for cell in report.cells}
        assert statuses[0.0] is False
        assert statuses[2.0] is True


class TestSearch:
    def setup_method(self):
        self.train_split, self.dev_split, _ = fixtures.make_separable_dataset("1A", 24, 16, 8, 0.5, seed=0)
        self.base = balanced_config(epochs=1)

    def test_single_config_space(self):
        result = hyperparameter_search(
            {"dropout_rate": [0.2]}, budget=1, seed=0,
            base_config=self.base, train_split=self.train_split, dev_split=self.dev_split,
        )
        assert result.best_config.dropout_rate == 0.2
        assert len(result.trials) == 1

    def test_budget_covers_grid_exhaustively(self):
        space = {"dropout_rate": [0.0, 0.1], "learning_rate": [4e-5, 1e-4]}
        result = hyperparameter_search(
            space, budget=10, seed=0,
            base_config=self.base, train_split=self.train_split, dev_split=self.dev_split,
        )
        visited = {(t.config.dropout_rate, t.config.learning_rate) for t in result.trials}
        assert len(result.trials) == 4
        assert visited == {(0.0, 4e-5), (0.0, 1e-4), (0.1, 4e-5), (0.1, 1e-4)}

    def test_seeded_visit_order_repeats(self):
        space = {"dropout_rate": [0.0, 0.1, 0.2, 0.3]}
        first = hyperparameter_search(
            space, budget=2, seed=5,
            base_config=self.base, train_split=self.train_split, dev_split=self.dev_split,
        )
        second = hyperparameter_search(
            space, budget=2, seed=5,
            base_config=self.base, train_split=self.train_split, dev_split=self.dev_split,
        )
        assert [t.overrides for t in first.trials] == [t.overrides for t in second.trials]

    def test_all_failed(self):
        with pytest.raises(AllConfigsFailed):
            hyperparameter_search(
                {"dropout_rate": [1.5, 2.0]}, budget=2, seed=0,
                base_config=self.base, train_split=self.train_split, dev_split=self.dev_split,
            )
