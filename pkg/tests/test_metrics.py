import random

import numpy as np
import pytest

from skewkit.corpus import write_predictions
from skewkit.errors import EmptyMatrix, IdMismatch, LengthMismatch, ParseFailure, UnknownLabel
from skewkit.metrics import (
    ConfusionMatrix,
    confusion,
    evaluate,
    format_report,
    macro_f1,
    micro_f1,
    score_files,
)

VOCAB = ("a", "b")


def oracle_scores(gold, pred, vocab):
    """Micro/macro F1 from per-sample TP/FP/FN, counted from first principles."""
    per_class = {}
    for label in vocab:
        tp = sum(1 for g, p in zip(gold, pred) if g == label and p == label)
        fp = sum(1 for g, p in zip(gold, pred) if g != label and p == label)
        fn = sum(1 for g, p in zip(gold, pred) if g == label and p != label)
        per_class[label] = (tp, fp, fn)
        denominator = 2 * tp + fp + fn
        per_class[label] = (tp, fp, fn, 2 * tp / denominator if denominator else 0.0)

    tp = sum(v[0] for v in per_class.values())
    fp = sum(v[1] for v in per_class.values())
    fn = sum(v[2] for v in per_class.values())
    micro_den = 2 * tp + fp + fn
    micro = 2 * tp / micro_den if micro_den else 0.0
    macro = sum(v[3] for v in per_class.values()) / len(vocab)
    return micro, macro


def random_labels(rng, n):
    return [rng.choice(VOCAB) for _ in range(n)]


class TestConfusion:
    def test_perfect_diagonal(self):
        matrix = confusion(["a", "b"], ["a", "b"], VOCAB)
        assert matrix.counts.tolist() == [[1, 0], [0, 1]]

    def test_worked_example(self):
        gold = ["a"] * 5 + ["b"] * 5
        pred = ["a", "a", "a", "b", "b", "a", "b", "b", "b", "b"]
        matrix = confusion(gold, pred, VOCAB)
        assert matrix.counts.tolist() == [[3, 2], [1, 4]]

    def test_empty_sequences(self):
        matrix = confusion([], [], VOCAB)
        assert matrix.counts.tolist() == [[0, 0], [0, 0]]
        assert matrix.total == 0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion(["a"], ["a", "b"], VOCAB)

    def test_unknown_label(self):
        with pytest.raises(UnknownLabel):
            confusion(["a"], ["z"], VOCAB)


class TestMicroMacro:
    def worked_matrix(self):
        return ConfusionMatrix(vocab=VOCAB, counts=np.array([[3, 2], [1, 4]]))

    def test_perfect_matrix(self):
        matrix = ConfusionMatrix(vocab=VOCAB, counts=np.array([[3, 0], [0, 7]]))
        assert micro_f1(matrix) == 1.0
        assert macro_f1(matrix) == 1.0

    def test_worked_micro(self):
        assert micro_f1(self.worked_matrix()) == pytest.approx(0.700000, abs=1e-12)

    def test_worked_macro(self):
        # F1_a = 2/3, F1_b = 8/11, mean = 23/33
        assert macro_f1(self.worked_matrix()) == pytest.approx(0.696970, abs=5e-7)
        assert macro_f1(self.worked_matrix()) == pytest.approx(23 / 33, abs=1e-12)

    def test_macro_is_mean_of_per_class(self):
        result = evaluate(["a", "a", "b"], ["a", "b", "b"], VOCAB)
        mean = sum(s.f1 for s in result.per_class.values()) / 2
        assert result.macro_f1 == mean

    def test_micro_equals_accuracy_single_label(self):
        rng = random.Random(0)
        for _ in range(50):
            n = rng.randint(1, 200)
            gold, pred = random_labels(rng, n), random_labels(rng, n)
            matrix = confusion(gold, pred, VOCAB)
            accuracy = sum(g == p for g, p in zip(gold, pred)) / n
            assert micro_f1(matrix) == pytest.approx(accuracy, abs=1e-12)
            assert micro_f1(matrix) == pytest.approx(
                np.trace(matrix.counts) / matrix.total, abs=1e-12
            )

    def test_oracle_equivalence(self):
        rng = random.Random(1)
        for _ in range(1000):
            n = rng.randint(1, 200)
            gold, pred = random_labels(rng, n), random_labels(rng, n)
            matrix = confusion(gold, pred, VOCAB)
            want_micro, want_macro = oracle_scores(gold, pred, VOCAB)
            assert abs(micro_f1(matrix) - want_micro) < 1e-12
            assert abs(macro_f1(matrix) - want_macro) < 1e-12

    def test_degenerate_single_class_predictions(self):
        # gold all 'a', predicted all 'b': zero-division rule gives 0 everywhere
        matrix = confusion(["a", "a"], ["b", "b"], VOCAB)
        assert micro_f1(matrix) == 0.0
        assert macro_f1(matrix) == 0.0

    def test_permutation_invariance(self):
        rng = random.Random(2)
        gold, pred = random_labels(rng, 60), random_labels(rng, 60)
        order = list(range(60))
        rng.shuffle(order)
        base = evaluate(gold, pred, VOCAB)
        permuted = evaluate([gold[i] for i in order], [pred[i] for i in order], VOCAB)
        assert base.micro_f1 == permuted.micro_f1
        assert base.macro_f1 == permuted.macro_f1

    def test_vocab_order_invariance(self):
        rng = random.Random(3)
        gold, pred = random_labels(rng, 60), random_labels(rng, 60)
        forward = evaluate(gold, pred, ("a", "b"))
        reverse = evaluate(gold, pred, ("b", "a"))
        assert forward.micro_f1 == reverse.micro_f1
        assert forward.macro_f1 == reverse.macro_f1

    def test_empty_matrix_rejected(self):
        empty = ConfusionMatrix(vocab=VOCAB, counts=np.zeros((2, 2), dtype=int))
        with pytest.raises(EmptyMatrix):
            micro_f1(empty)
        with pytest.raises(EmptyMatrix):
            macro_f1(empty)


class TestScoreFiles:
    def test_identical_files_score_one(self, tmp_path):
        gold = tmp_path / "gold.tsv"
        write_predictions(["x", "y", "z"], ["a", "b", "a"], gold)
        result = score_files(gold, gold, VOCAB)
        assert result.micro_f1 == 1.0
        assert result.macro_f1 == 1.0

    def test_missing_id(self, tmp_path):
        gold = tmp_path / "gold.tsv"
        pred = tmp_path / "pred.tsv"
        write_predictions(["x", "y"], ["a", "b"], gold)
        write_predictions(["x"], ["a"], pred)
        with pytest.raises(IdMismatch) as excinfo:
            score_files(gold, pred, VOCAB)
        assert excinfo.value.missing == {"y"}

    def test_alignment_by_id_not_order(self, tmp_path):
        gold = tmp_path / "gold.tsv"
        ordered = tmp_path / "ordered.tsv"
        shuffled = tmp_path / "shuffled.tsv"
        write_predictions(["x", "y", "z"], ["a", "b", "a"], gold)
        write_predictions(["x", "y", "z"], ["a", "b", "b"], ordered)
        write_predictions(["z", "x", "y"], ["b", "a", "b"], shuffled)
        first = score_files(gold, ordered, VOCAB)
        second = score_files(gold, shuffled, VOCAB)
        assert first.micro_f1 == second.micro_f1
        assert first.matrix.counts.tolist() == second.matrix.counts.tolist()

    def test_unparseable_file(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("one_column_only\n", encoding="utf-8")
        gold = tmp_path / "gold.tsv"
        write_predictions(["x"], ["a"], gold)
        with pytest.raises(ParseFailure):
            score_files(gold, bad, VOCAB)

    def test_report_rendering_is_stable(self, tmp_path):
        gold = tmp_path / "gold.tsv"
        write_predictions(["x", "y"], ["a", "b"], gold)
        result = score_files(gold, gold, VOCAB)
        assert format_report(result) == format_report(result)
        assert "micro_f1  1.000000" in format_report(result)
