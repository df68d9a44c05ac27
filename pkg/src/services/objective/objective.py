"""Four-head training objective."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.core.exceptions import ConfigurationError
from src.services.datapipe.types import HEAD_SIZES, HEADS, TripletDataset
from src.services.model_service.triplet_decoder import DecoderOutput
from src.services.objective.loss import ClassWeights, class_weights, total_loss, weighted_bce
from src.services.tensor_engine.tensor import Tensor


@dataclass
class LossBreakdown:
    total: Tensor
    heads: dict[str, float]

    def as_floats(self) -> dict[str, float]:
        return {"total": self.total.item(), **self.heads}


class TripletObjective:
    """Weighted BCE on each head, summed without head weights.

    Labels are those of each clip's last frame; nothing else enters the loss.
    """

    def __init__(self, weights: dict[str, ClassWeights] | None = None):
        weights = weights or {head: ClassWeights.uniform(HEAD_SIZES[head]) for head in HEADS}
        missing = [h for h in HEADS if h not in weights]
        if missing:
            raise ConfigurationError(f"class weights missing for heads {missing}")
        for head in HEADS:
            if len(weights[head]) != HEAD_SIZES[head]:
                raise ConfigurationError(
                    f"{head} weights have {len(weights[head])} entries, expected {HEAD_SIZES[head]}"
                )
        self.weights = weights

    @classmethod
    def from_dataset(cls, dataset: TripletDataset, balanced: bool = True) -> TripletObjective:
        if not balanced:
            return cls()
        counts = dataset.positive_counts()
        weights = {head: class_weights(counts[head], len(dataset)) for head in HEADS}
        logger.debug(
            "class weights: "
            + ", ".join(f"{h}=[{w.w.min():.2f}, {w.w.max():.2f}]" for h, w in weights.items())
        )
        return cls(weights)

    def __call__(self, output: DecoderOutput, labels: dict[str, np.ndarray]) -> LossBreakdown:
        logits = output.logits()
        losses = {head: weighted_bce(logits[head], labels[head], self.weights[head]) for head in HEADS}
        total = total_loss(losses["instrument"], losses["verb"], losses["target"], losses["triplet"])
        return LossBreakdown(total=total, heads={head: loss.item() for head, loss in losses.items()})
