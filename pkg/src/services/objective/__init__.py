"""Training objective: class weights, weighted BCE per head, total loss."""

from src.services.objective.loss import ClassWeights, class_weights, total_loss, weighted_bce
from src.services.objective.objective import LossBreakdown, TripletObjective

__all__ = [
    "ClassWeights",
    "LossBreakdown",
    "TripletObjective",
    "class_weights",
    "total_loss",
    "weighted_bce",
]
