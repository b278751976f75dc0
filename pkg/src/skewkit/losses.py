"""Cross-entropy losses for imbalanced binary classification.

The loss of a batch is built from per-sample terms -log(p_i,true), each
optionally scaled by the weight attached to the sample's true class.
Reductions:

- ``mean``: arithmetic mean of per-sample terms (unweighted convention)
- ``sum``: plain sum of per-sample terms (the raw double-sum form)
- ``weighted_mean``: sum of weighted terms divided by the sum of applied
  weights, so the loss scale stays comparable across batch compositions

Probabilities are clamped at CLAMP_EPS before the log so the functions
are total. Natural logarithm throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveWeight, ShapeMismatch

CLAMP_EPS = 1e-12

REDUCTIONS = ("mean", "sum", "weighted_mean")


@dataclass(frozen=True)
class LossResult:
    """Per-sample loss terms plus their reduction."""

    per_sample: np.ndarray
    value: float
    reduction: str


def _check_inputs(probs: np.ndarray, onehot: np.ndarray, weights: np.ndarray | None):
    probs = np.asarray(probs, dtype=np.float64)
    onehot = np.asarray(onehot, dtype=np.float64)
    if probs.ndim != 2:
        raise ShapeMismatch(f"probabilities must be 2-d (N, C), got shape {probs.shape}")
    if onehot.shape != probs.shape:
        raise ShapeMismatch(f"one-hot targets {onehot.shape} do not match probabilities {probs.shape}")
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (probs.shape[1],):
            raise ShapeMismatch(
                f"weights must have one entry per class ({probs.shape[1]}), got shape {weights.shape}"
            )
        if np.any(weights <= 0):
            raise NonPositiveWeight(f"class weights must be positive, got {weights.tolist()}")
    return probs, onehot, weights


def _reduce(per_sample: np.ndarray, applied_weights: np.ndarray, reduction: str) -> float:
    if reduction == "mean":
        return float(per_sample.mean()) if per_sample.size else 0.0
    if reduction == "sum":
        return float(per_sample.sum())
    if reduction == "weighted_mean":
        wsum = float(applied_weights.sum())
        return float(per_sample.sum()) / wsum if wsum else 0.0
    raise ValueError(f"unknown reduction {reduction!r}; expected one of {REDUCTIONS}")


def cross_entropy(probs, onehot, reduction: str = "mean") -> LossResult:
    """Unweighted cross-entropy of predicted probabilities against one-hot targets."""
    probs, onehot, _ = _check_inputs(probs, onehot, None)
    clamped = np.clip(probs, CLAMP_EPS, None)
    per_sample = -(onehot * np.log(clamped)).sum(axis=1)
    value = _reduce(per_sample, np.ones_like(per_sample), reduction)
    return LossResult(per_sample=per_sample, value=value, reduction=reduction)


def weighted_cross_entropy(probs, onehot, weights, reduction: str = "weighted_mean") -> LossResult:
    """Class-weighted cross-entropy.

    Each sample's term is w[true class] * (-log p_i,true); the default
    reduction divides by the sum of applied weights. With all weights 1
    and ``mean``-style reduction this is exactly :func:`cross_entropy`.
    """
    probs, onehot, weights = _check_inputs(probs, onehot, weights)
    clamped = np.clip(probs, CLAMP_EPS, None)
    applied = onehot @ weights
    per_sample = applied * -(onehot * np.log(clamped)).sum(axis=1)
    value = _reduce(per_sample, applied, reduction)
    return LossResult(per_sample=per_sample, value=value, reduction=reduction)


def softmax(logits) -> np.ndarray:
    """Row-wise softmax, shifted for numerical stability."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def weighted_cross_entropy_from_logits(
    logits, onehot, weights, reduction: str = "weighted_mean"
) -> LossResult:
    """Weighted cross-entropy evaluated on raw logits (softmax applied here)."""
    return weighted_cross_entropy(softmax(logits), onehot, weights, reduction)


def weighted_cross_entropy_grad(
    logits, onehot, weights, reduction: str = "weighted_mean"
) -> np.ndarray:
    """Analytic gradient of the weighted loss with respect to the logits.

    d/dz_ik of w_ti * (-log p_i,ti) is w_ti * (p_ik - y_ik); the reduction
    scales rows accordingly. Valid away from the clamp region (true-class
    probability above CLAMP_EPS).
    """
    logits = np.asarray(logits, dtype=np.float64)
    probs, onehot, weights = _check_inputs(softmax(logits), np.asarray(onehot), np.asarray(weights))
    applied = onehot @ weights
    grad = applied[:, None] * (probs - onehot)
    if reduction == "sum":
        return grad
    if reduction == "mean":
        return grad / len(grad)
    if reduction == "weighted_mean":
        return grad / applied.sum()
    raise ValueError(f"unknown reduction {reduction!r}; expected one of {REDUCTIONS}")


def onehot_from_indices(indices, num_classes: int) -> np.ndarray:
    """One-hot rows from integer class indices."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.zeros((len(indices), num_classes), dtype=np.float64)
    out[np.arange(len(indices)), indices] = 1.0
    return out
