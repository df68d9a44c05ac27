"""Frames, labels, clips and datasets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.core.exceptions import DataError
from src.services.datapipe.taxonomy import (
    NUM_INSTRUMENTS,
    NUM_TARGETS,
    NUM_TRIPLETS,
    NUM_VERBS,
    TripletTaxonomy,
)

HEADS = ("instrument", "verb", "target", "triplet")
HEAD_SIZES = {
    "instrument": NUM_INSTRUMENTS,
    "verb": NUM_VERBS,
    "target": NUM_TARGETS,
    "triplet": NUM_TRIPLETS,
}


def _check_binary(values: np.ndarray, what: str) -> None:
    if not np.all((values == 0) | (values == 1)):
        raise DataError(f"{what} must be binary 0/1")


def project_labels(triplet: np.ndarray, taxonomy: TripletTaxonomy) -> dict[str, np.ndarray]:
    """Component presence from triplet presence (``[..., 100]`` → per head).

    A component is present when any active triplet uses it.
    """
    triplet = np.asarray(triplet)
    out = {"triplet": triplet.astype(np.float32)}
    for head, mapping, size in (
        ("instrument", taxonomy.instrument_of, NUM_INSTRUMENTS),
        ("verb", taxonomy.verb_of, NUM_VERBS),
        ("target", taxonomy.target_of, NUM_TARGETS),
    ):
        onehot = np.zeros((NUM_TRIPLETS, size), dtype=np.float32)
        onehot[np.arange(NUM_TRIPLETS), mapping] = 1.0
        out[head] = np.minimum(triplet.astype(np.float32) @ onehot, 1.0)
    return out


@dataclass(frozen=True, eq=False)
class LabelVector:
    """Binary presence labels of one frame for all four heads."""

    triplet: np.ndarray
    instrument: np.ndarray
    verb: np.ndarray
    target: np.ndarray

    @classmethod
    def from_triplets(cls, triplet: np.ndarray, taxonomy: TripletTaxonomy) -> LabelVector:
        triplet = np.asarray(triplet, dtype=np.float32)
        if triplet.shape != (NUM_TRIPLETS,):
            raise DataError(f"triplet label must have {NUM_TRIPLETS} entries, got {triplet.shape}")
        _check_binary(triplet, "triplet label")
        heads = project_labels(triplet, taxonomy)
        return cls(**heads)

    def head(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def is_consistent(self, taxonomy: TripletTaxonomy) -> bool:
        """Every active triplet activates its three components."""
        for k in np.flatnonzero(self.triplet):
            i, v, t = taxonomy.components(int(k))
            if not (self.instrument[i] and self.verb[v] and self.target[t]):
                return False
        return True


@dataclass(frozen=True, eq=False)
class Frame:
    image: np.ndarray
    video_id: str
    index: int


@dataclass(frozen=True, eq=False)
class VideoClip:
    """``m`` causally ordered frames ending at ``t`` with the label of frame ``t``."""

    frames: tuple[Frame, ...]
    label: LabelVector
    t: int

    @property
    def video_id(self) -> str:
        return self.frames[-1].video_id

    @property
    def images(self) -> np.ndarray:
        """``[m, 3, h, w]``"""
        return np.stack([f.image for f in self.frames])

    @property
    def indices(self) -> list[int]:
        return [f.index for f in self.frames]


@dataclass(eq=False)
class VideoData:
    """All frames and triplet labels of one video, stored as arrays."""

    video_id: str
    images: np.ndarray
    triplet_labels: np.ndarray
    frame_ids: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.images.ndim != 4 or self.images.shape[1] != 3:
            raise DataError(f"{self.video_id}: images must be [N,3,h,w], got {self.images.shape}")
        if self.triplet_labels.shape != (len(self.images), NUM_TRIPLETS):
            raise DataError(
                f"{self.video_id}: {len(self.images)} frames but labels of shape {self.triplet_labels.shape}"
            )
        _check_binary(self.triplet_labels, f"{self.video_id} labels")
        if self.frame_ids is None:
            self.frame_ids = np.arange(len(self.images))

    def __len__(self) -> int:
        return len(self.images)

    def frames(self) -> list[Frame]:
        return [Frame(self.images[k], self.video_id, k) for k in range(len(self))]

    def labels(self, taxonomy: TripletTaxonomy) -> list[LabelVector]:
        return [LabelVector.from_triplets(row, taxonomy) for row in self.triplet_labels]


@dataclass(eq=False)
class TripletDataset:
    videos: list[VideoData]
    taxonomy: TripletTaxonomy = field(default_factory=TripletTaxonomy.default)

    def __len__(self) -> int:
        return sum(len(v) for v in self.videos)

    @property
    def video_ids(self) -> list[str]:
        return [v.video_id for v in self.videos]

    def clip_keys(self) -> list[tuple[int, int]]:
        """One ``(video position, t)`` key per frame, in video order."""
        return [(vi, t) for vi, video in enumerate(self.videos) for t in range(len(video))]

    def positive_counts(self) -> dict[str, np.ndarray]:
        """Per-head count of frames in which each class is present."""
        if not self.videos:
            return {h: np.zeros(HEAD_SIZES[h]) for h in HEADS}
        labels = project_labels(np.concatenate([v.triplet_labels for v in self.videos]), self.taxonomy)
        return {h: labels[h].sum(axis=0) for h in HEADS}

    def subset(self, video_ids: list[str]) -> TripletDataset:
        by_id = {v.video_id: v for v in self.videos}
        missing = [vid for vid in video_ids if vid not in by_id]
        if missing:
            raise DataError(f"videos not in dataset: {missing}")
        return TripletDataset([by_id[vid] for vid in video_ids], self.taxonomy)
