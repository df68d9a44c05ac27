"""Pydantic models for reports and training history."""

from src.models.report import AP_COLUMNS, AblationRow, EvalReport, VideoScores
from src.models.train_log import EpochRecord, TrainLog

__all__ = [
    "AP_COLUMNS",
    "AblationRow",
    "EpochRecord",
    "EvalReport",
    "TrainLog",
    "VideoScores",
]
