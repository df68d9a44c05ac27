"""Training, evaluation and ablation runs."""

from src.services.harness.ablation import ablate, variant_name
from src.services.harness.datasets import RunDatasets, build_dataset, build_datasets
from src.services.harness.evaluator import EvalResult, evaluate, load_model, predict_dataset
from src.services.harness.optim import SGD
from src.services.harness.schedule import lr_schedule
from src.services.harness.trainer import Trainer, train

__all__ = [
    "SGD",
    "EvalResult",
    "RunDatasets",
    "Trainer",
    "ablate",
    "build_dataset",
    "build_datasets",
    "evaluate",
    "load_model",
    "lr_schedule",
    "predict_dataset",
    "train",
    "variant_name",
]
