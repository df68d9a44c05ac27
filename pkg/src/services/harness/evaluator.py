"""Checkpoint evaluation: causal scoring of every frame, reports and timelines."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from loguru import logger

from src.configs.settings import RunConfig
from src.core.exceptions import ConfigurationError
from src.models.report import EvalReport
from src.services.datapipe.sampler import video_batches
from src.services.datapipe.taxonomy import TripletTaxonomy
from src.services.datapipe.types import TripletDataset
from src.services.metrics.export import (
    write_prediction_log,
    write_report,
    write_timelines,
)
from src.services.metrics.video_ap import PredictionLog, video_ap
from src.services.model_service.recognizer import TripletRecognizer
from src.services.tensor_engine.checkpoint import load_checkpoint

PREDICTIONS = "predictions.txt"
DEFAULT_EVAL_BATCH = 32


@dataclass(eq=False)
class EvalResult:
    report: EvalReport
    log: PredictionLog
    files: dict[str, Path] = field(default_factory=dict)


def load_model(
    checkpoint: str | Path, taxonomy: TripletTaxonomy | None = None
) -> tuple[TripletRecognizer, RunConfig]:
    """Rebuild the model stored in ``checkpoint``.

    Raises:
        ConfigurationError: if the checkpoint was trained on another taxonomy
    """
    manifest, state = load_checkpoint(checkpoint)
    if taxonomy is not None and manifest.get("taxonomy_fingerprint") != taxonomy.fingerprint():
        raise ConfigurationError(
            f"{checkpoint}: trained with taxonomy {manifest.get('taxonomy_fingerprint')}, "
            f"dataset uses {taxonomy.fingerprint()}"
        )
    config = RunConfig(**manifest["run_config"])
    model = TripletRecognizer(config.model, seed=config.seed)
    model.load_state_dict(state)
    model.eval()
    return model, config


def predict_dataset(
    model: TripletRecognizer, dataset: TripletDataset, batch_size: int = DEFAULT_EVAL_BATCH
) -> PredictionLog:
    """Triplet probabilities for every frame, each from its own causal clip."""
    log = PredictionLog()
    for vi, video in enumerate(dataset.videos):
        scores = [
            model.predict(batch.images)
            for batch in video_batches(dataset, vi, model.clip_size, batch_size)
        ]
        log.add(video.video_id, video.frame_ids, np.concatenate(scores), video.triplet_labels)
        logger.debug(f"Scored {video.video_id}: {len(video)} frames")
    return log


def evaluate(
    checkpoint: str | Path,
    dataset: TripletDataset,
    taxonomy: TripletTaxonomy | None = None,
    out_dir: str | Path | None = None,
    batch_size: int = DEFAULT_EVAL_BATCH,
) -> EvalResult:
    """Score ``dataset`` with ``checkpoint`` and compute video-specific AP.

    With ``out_dir`` the prediction log, the report tables and one timeline
    per video are written there.
    """
    taxonomy = taxonomy or dataset.taxonomy
    model, _ = load_model(checkpoint, taxonomy)
    log = predict_dataset(model, dataset, batch_size)
    report = video_ap(log, taxonomy)
    logger.info(
        f"Evaluated {len(log.videos)} videos ({len(log)} frames): "
        f"AP_I {_fmt(report.ap_i)} AP_V {_fmt(report.ap_v)} AP_T {_fmt(report.ap_t)} "
        f"AP_IVT {_fmt(report.ap_ivt)}"
    )

    result = EvalResult(report=report, log=log)
    if out_dir is not None:
        out = Path(out_dir)
        result.files["predictions"] = write_prediction_log(out / PREDICTIONS, log)
        result.files.update(write_report(out, report))
        for path in write_timelines(out / "timelines", log, taxonomy):
            result.files[path.stem] = path
    return result


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"
