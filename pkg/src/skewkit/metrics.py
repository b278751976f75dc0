"""Evaluation measures: confusion matrices, micro-F1, macro-F1, per-class P/R/F1.

Zero-division rule: precision, recall, or F1 with a zero denominator is 0.
Scoring of prediction files aligns by sample id, never by row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import read_predictions
from .errors import EmptyMatrix, IdMismatch, LengthMismatch, ParseFailure, UnknownLabel


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed [gold class][predicted class] over a class vocabulary."""

    vocab: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.shape != (len(self.vocab), len(self.vocab)):
            raise LengthMismatch("confusion counts must be C x C for the vocabulary")
        if np.any(counts < 0):
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def true_positives(self, index: int) -> int:
        return int(self.counts[index, index])

    def false_positives(self, index: int) -> int:
        return int(self.counts[:, index].sum() - self.counts[index, index])

    def false_negatives(self, index: int) -> int:
        return int(self.counts[index, :].sum() - self.counts[index, index])


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalResult:
    micro_f1: float
    macro_f1: float
    per_class: dict[str, ClassScores]
    matrix: ConfusionMatrix

    def to_dict(self) -> dict:
        return {
            "micro_f1": self.micro_f1,
            "macro_f1": self.macro_f1,
            "per_class": {
                label: {"precision": s.precision, "recall": s.recall, "f1": s.f1}
                for label, s in self.per_class.items()
            },
            "confusion": {
                "vocab": list(self.matrix.vocab),
                "counts": self.matrix.counts.tolist(),
            },
        }


def confusion(gold, pred, vocab) -> ConfusionMatrix:
    """Count gold/pred label pairs into a C x C matrix."""
    gold = list(gold)
    pred = list(pred)
    vocab = tuple(vocab)
    if len(gold) != len(pred):
        raise LengthMismatch(f"{len(gold)} gold labels vs {len(pred)} predictions")
    index = {label: i for i, label in enumerate(vocab)}
    counts = np.zeros((len(vocab), len(vocab)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g not in index:
            raise UnknownLabel(g, vocab)
        if p not in index:
            raise UnknownLabel(p, vocab)
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(vocab=vocab, counts=counts)


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def per_class_scores(matrix: ConfusionMatrix) -> dict[str, ClassScores]:
    scores = {}
    for i, label in enumerate(matrix.vocab):
        tp = matrix.true_positives(i)
        fp = matrix.false_positives(i)
        fn = matrix.false_negatives(i)
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        scores[label] = ClassScores(precision=precision, recall=recall, f1=f1)
    return scores


def micro_f1(matrix: ConfusionMatrix) -> float:
    """F1 from globally pooled TP/FP/FN; equals accuracy for single-label data."""
    if matrix.total == 0:
        raise EmptyMatrix("cannot score an empty confusion matrix")
    tp = sum(matrix.true_positives(i) for i in range(len(matrix.vocab)))
    fp = sum(matrix.false_positives(i) for i in range(len(matrix.vocab)))
    fn = sum(matrix.false_negatives(i) for i in range(len(matrix.vocab)))
    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    return _safe_div(2 * precision * recall, precision + recall)


def macro_f1(matrix: ConfusionMatrix) -> float:
    """Unweighted mean of per-class F1; absent classes contribute 0."""
    if matrix.total == 0:
        raise EmptyMatrix("cannot score an empty confusion matrix")
    scores = per_class_scores(matrix)
    return sum(s.f1 for s in scores.values()) / len(scores)


def evaluate(gold, pred, vocab) -> EvalResult:
    """Full evaluation of aligned gold/pred label sequences."""
    matrix = confusion(gold, pred, vocab)
    if matrix.total == 0:
        raise EmptyMatrix("no samples to score")
    return EvalResult(
        micro_f1=micro_f1(matrix),
        macro_f1=macro_f1(matrix),
        per_class=per_class_scores(matrix),
        matrix=matrix,
    )


def score_files(gold_path: str | Path, pred_path: str | Path, vocab) -> EvalResult:
    """Score a prediction file against a gold file, aligned by id."""
    try:
        gold_pairs = read_predictions(gold_path)
        pred_pairs = read_predictions(pred_path)
    except Exception as exc:
        raise ParseFailure(str(exc)) from exc

    gold_map = dict(gold_pairs)
    pred_map = dict(pred_pairs)
    if len(gold_map) != len(gold_pairs):
        raise ParseFailure(f"duplicate ids in gold file {gold_path}")
    if len(pred_map) != len(pred_pairs):
        raise ParseFailure(f"duplicate ids in prediction file {pred_path}")

    missing = set(gold_map) - set(pred_map)
    extra = set(pred_map) - set(gold_map)
    if missing or extra:
        raise IdMismatch(missing, extra)

    ordered_ids = [sample_id for sample_id, _ in gold_pairs]
    gold = [gold_map[i] for i in ordered_ids]
    pred = [pred_map[i] for i in ordered_ids]
    return evaluate(gold, pred, vocab)


def format_report(result: EvalResult) -> str:
    """Human-readable scorer report; deterministic and byte-stable."""
    lines = [
        f"micro_f1  {result.micro_f1:.6f}",
        f"macro_f1  {result.macro_f1:.6f}",
        "",
        f"{'class':<12} {'precision':>9} {'recall':>9} {'f1':>9}",
    ]
    for label in result.matrix.vocab:
        s = result.per_class[label]
        lines.append(f"{label:<12} {s.precision:>9.6f} {s.recall:>9.6f} {s.f1:>9.6f}")
    lines.append("")
    lines.append("confusion (rows gold, cols pred): " + " ".join(result.matrix.vocab))
    for i, label in enumerate(result.matrix.vocab):
        row = " ".join(f"{int(c):>7d}" for c in result.matrix.counts[i])
        lines.append(f"{label:<12} {row}")
    return "\n".join(lines) + "\n"
