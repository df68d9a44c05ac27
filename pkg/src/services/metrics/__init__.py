"""Evaluation: average precision, component projection, video AP, report files."""

from src.services.metrics.ap import AP_KEYS, average_precision, project_components
from src.services.metrics.export import (
    read_prediction_log,
    render_ablation,
    render_report,
    write_ablation_table,
    write_ground_truth,
    write_prediction_log,
    write_report,
    write_timelines,
)
from src.services.metrics.video_ap import PredictionLog, VideoPredictions, video_ap

__all__ = [
    "AP_KEYS",
    "PredictionLog",
    "VideoPredictions",
    "average_precision",
    "project_components",
    "read_prediction_log",
    "render_ablation",
    "render_report",
    "video_ap",
    "write_ablation_table",
    "write_ground_truth",
    "write_prediction_log",
    "write_report",
    "write_timelines",
]
