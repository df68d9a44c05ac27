"""Per-frame prediction logs and video-specific AP."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.core.exceptions import DataError
from src.models.report import EvalReport, VideoScores
from src.services.datapipe.taxonomy import NUM_TRIPLETS, TripletTaxonomy
from src.services.metrics.ap import AP_KEYS, average_precision, project_components


@dataclass(eq=False)
class VideoPredictions:
    """Scores and ground truth of every scored frame of one video."""

    video_id: str
    frames: np.ndarray  # [n] strictly increasing frame indices
    scores: np.ndarray  # [n, 100] triplet probabilities
    labels: np.ndarray  # [n, 100] binary triplet ground truth

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        self.labels = np.asarray(self.labels)
        n = len(self.frames)
        if self.scores.shape != (n, NUM_TRIPLETS) or self.labels.shape != (n, NUM_TRIPLETS):
            raise DataError(
                f"{self.video_id}: {n} frames, scores {self.scores.shape}, labels {self.labels.shape}"
            )
        if n > 1 and np.any(np.diff(self.frames) <= 0):
            raise DataError(f"{self.video_id}: frame indices are not strictly increasing")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass
class PredictionLog:
    videos: dict[str, VideoPredictions] = field(default_factory=dict)

    def add(self, video_id: str, frames, scores, labels) -> None:
        if video_id in self.videos:
            raise DataError(f"video {video_id} already in the prediction log")
        self.videos[video_id] = VideoPredictions(video_id, frames, scores, labels)

    def __len__(self) -> int:
        """Total number of scored frames."""
        return sum(len(v) for v in self.videos.values())


def _class_aps(scores: np.ndarray, labels: np.ndarray) -> list[float | None]:
    return [average_precision(scores[:, c], labels[:, c]) for c in range(scores.shape[1])]


def _mean_defined(values) -> float | None:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None


def video_ap(log: PredictionLog, taxonomy: TripletTaxonomy) -> EvalReport:
    """Class-mean AP per video and head, then the mean over videos.

    Component and pair scores are projected from the triplet scores; their
    ground truth is projected the same way from the triplet labels.
    """
    if not log.videos:
        raise DataError("prediction log is empty")

    per_video: list[VideoScores] = []
    class_tables: dict[str, list[list[float | None]]] = {key: [] for key in AP_KEYS}
    for video_id in sorted(log.videos):
        video = log.videos[video_id]
        if len(video) == 0:
            raise DataError(f"video {video_id} has no scored frames")
        scores = project_components(video.scores, taxonomy)
        labels = project_components(video.labels, taxonomy)
        video_means = {}
        for key in AP_KEYS:
            aps = _class_aps(scores[key], labels[key])
            class_tables[key].append(aps)
            video_means[key] = _mean_defined(aps)
        per_video.append(VideoScores(video_id=video_id, frames=len(video), ap=video_means))

    aggregates = {key: _mean_defined(v.ap[key] for v in per_video) for key in AP_KEYS}
    per_class = {
        key: [_mean_defined(column) for column in zip(*tables, strict=True)]
        for key, tables in class_tables.items()
    }
    return EvalReport(
        **{f"ap_{key}": value for key, value in aggregates.items()},
        per_class=per_class,
        class_names=class_names(taxonomy),
        per_video=per_video,
    )


def class_names(taxonomy: TripletTaxonomy) -> dict[str, list[str]]:
    pairs_iv = [f"{i},{v}" for i in taxonomy.instruments for v in taxonomy.verbs]
    pairs_it = [f"{i},{t}" for i in taxonomy.instruments for t in taxonomy.targets]
    return {
        "i": list(taxonomy.instruments),
        "v": list(taxonomy.verbs),
        "t": list(taxonomy.targets),
        "iv": pairs_iv,
        "it": pairs_it,
        "ivt": taxonomy.triplet_names,
    }
