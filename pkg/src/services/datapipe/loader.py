"""Dataset loading from the CholecT45-style directory layout.

::

    <root>/labels/<video_id>.txt            frame_index,<100 comma-separated 0/1 flags>
    <root>/frames/<video_id>/<index:06d>.png
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml
from loguru import logger
from PIL import Image

from src.core.exceptions import DataError
from src.services.datapipe.taxonomy import NUM_TRIPLETS, TripletTaxonomy
from src.services.datapipe.types import TripletDataset, VideoData


def read_label_file(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a label file into ``(frame_ids[N], triplet_labels[N, 100])``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Label file not found: {path}")

    frame_ids: list[int] = []
    rows: list[list[int]] = []
    for lineno, line in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        if not line.strip():
            continue
        fields = line.strip().split(",")
        if len(fields) != NUM_TRIPLETS + 1:
            raise DataError(
                f"{path}:{lineno}: expected {NUM_TRIPLETS + 1} fields, got {len(fields)}"
            )
        try:
            values = [int(x) for x in fields]
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-integer field") from exc
        if values[0] < 0 or any(v not in (0, 1) for v in values[1:]):
            raise DataError(f"{path}:{lineno}: frame index must be >= 0 and flags 0/1")
        if frame_ids and values[0] <= frame_ids[-1]:
            raise DataError(f"{path}:{lineno}: frame indices must increase")
        frame_ids.append(values[0])
        rows.append(values[1:])

    if not rows:
        raise DataError(f"{path}: no labelled frames")
    return np.array(frame_ids), np.array(rows, dtype=np.float32)


def read_frame(path: str | Path, height: int, width: int) -> np.ndarray:
    """Load an image as ``[3, height, width]`` float32 in [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Frame not found: {path}")
    with Image.open(path) as img:
        rgb = img.convert("RGB").resize((width, height), Image.Resampling.BILINEAR)
        array = np.asarray(rgb, dtype=np.float32) / 255.0
    return array.transpose(2, 0, 1)


def load_video(root: str | Path, video_id: str, height: int, width: int) -> VideoData:
    root = Path(root)
    frame_ids, labels = read_label_file(root / "labels" / f"{video_id}.txt")
    frame_dir = root / "frames" / video_id
    images = np.stack(
        [read_frame(frame_dir / f"{index:06d}.png", height, width) for index in frame_ids]
    )
    return VideoData(video_id, images, labels, frame_ids=frame_ids)


def load_dataset(
    root: str | Path,
    video_ids: list[str],
    height: int,
    width: int,
    taxonomy: TripletTaxonomy | None = None,
) -> TripletDataset:
    """Load the given videos (typically ``SplitSpec.select(...)``)."""
    videos = []
    for vid in video_ids:
        video = load_video(root, vid, height, width)
        logger.debug(f"Loaded {vid}: {len(video)} frames")
        videos.append(video)
    logger.info(f"Loaded {len(videos)} videos ({sum(len(v) for v in videos)} frames) from {root}")
    return TripletDataset(videos, taxonomy or TripletTaxonomy.default())


def write_dataset(dataset: TripletDataset, root: str | Path) -> Path:
    """Store ``dataset`` in the layout ``load_dataset`` reads, plus a ``splits.yml``.

    Frames are quantized to 8-bit PNG; the split file lists every video as
    fold 1 and under the split name ``all_videos``.
    """
    root = Path(root)
    (root / "labels").mkdir(parents=True, exist_ok=True)
    for video in dataset.videos:
        frame_dir = root / "frames" / video.video_id
        frame_dir.mkdir(parents=True, exist_ok=True)
        lines = []
        for k, index in enumerate(video.frame_ids):
            pixels = np.clip(video.images[k].transpose(1, 2, 0) * 255.0, 0, 255).round()
            Image.fromarray(pixels.astype(np.uint8)).save(frame_dir / f"{int(index):06d}.png")
            lines.append(f"{int(index)}," + ",".join(str(int(v)) for v in video.triplet_labels[k]))
        (root / "labels" / f"{video.video_id}.txt").write_text("\n".join(lines) + "\n", encoding="ascii")

    splits = {"folds": {1: dataset.video_ids}, "splits": {"all_videos": dataset.video_ids}}
    with open(root / "splits.yml", "w", encoding="utf-8") as f:
        yaml.safe_dump(splits, f, sort_keys=False)
    logger.info(f"Wrote {len(dataset.videos)} videos ({len(dataset)} frames) to {root}")
    return root
