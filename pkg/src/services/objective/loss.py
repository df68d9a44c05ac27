"""Class-balanced multi-label binary cross-entropy and the four-head total."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import DataError, DimensionError, NumericError
from src.services.tensor_engine import ops
from src.services.tensor_engine.tensor import Tensor

WEIGHT_MIN = 0.1
WEIGHT_MAX = 100.0


@dataclass(frozen=True, eq=False)
class ClassWeights:
    """Positive-term weights ``W_c`` of one head."""

    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DataError(f"class weights must be a finite positive vector, got {self.w!r}")
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return len(self.w)

    @classmethod
    def uniform(cls, classes: int) -> ClassWeights:
        return cls(np.ones(classes))


def class_weights(positive_counts: np.ndarray, total: int) -> ClassWeights:
    """Inverse-frequency weights ``total / (C * max(count, 1))`` clamped to [0.1, 100]."""
    counts = np.asarray(positive_counts, dtype=np.float64)
    if counts.ndim != 1 or counts.size == 0:
        raise DataError(f"positive counts must be a non-empty vector, got shape {counts.shape}")
    if np.any(counts < 0):
        raise DataError(f"positive counts must be non-negative, got min {counts.min()}")
    if total < 1:
        raise DataError(f"total sample count must be >= 1, got {total}")
    if np.any(counts > total):
        raise DataError(f"positive count {counts.max()} exceeds the {total} samples")
    raw = total / (counts.size * np.maximum(counts, 1.0))
    return ClassWeights(np.clip(raw, WEIGHT_MIN, WEIGHT_MAX))


def weighted_bce(logits: Tensor, labels: np.ndarray, weights: ClassWeights | np.ndarray) -> Tensor:
    """``sum_c -(1/N) sum_n [W_c y log s(x) + (1 - y) log(1 - s(x))]``.

    Both log-sigmoids are written as softplus, ``-log s(x) = softplus(-x)``,
    so large logits cannot overflow.
    """
    labels = np.asarray(labels)
    w = weights.w if isinstance(weights, ClassWeights) else np.asarray(weights, dtype=np.float64)
    if logits.ndim != 2 or labels.shape != logits.shape:
        raise DimensionError(f"logits {logits.shape} and labels {labels.shape} must both be [N, C]")
    if w.shape != (logits.shape[1],):
        raise DimensionError(f"{len(w)} class weights for {logits.shape[1]} classes")
    if not np.all((labels == 0) | (labels == 1)):
        raise DataError("labels must be binary 0/1")

    y = labels.astype(logits.dtype)
    positive = ops.softplus(-logits) * (y * w.astype(logits.dtype))
    negative = ops.softplus(logits) * (1.0 - y)
    return (positive + negative).sum() / logits.shape[0]


def total_loss(l_i: Tensor, l_v: Tensor, l_t: Tensor, l_ivt: Tensor) -> Tensor:
    """Unweighted sum of the four head losses."""
    for head, value in (("instrument", l_i), ("verb", l_v), ("target", l_t), ("triplet", l_ivt)):
        scalar = value.item() if isinstance(value, Tensor) else float(value)
        if not math.isfinite(scalar):
            raise NumericError(f"{head} loss is not finite ({scalar})")
    return l_i + l_v + l_t + l_ivt
