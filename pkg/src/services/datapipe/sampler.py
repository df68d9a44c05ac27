"""Shuffled clip batches with optional background prefetch."""

from __future__ import annotations

import math
import queue
import threading
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.configs.data import AugmentationConfig
from src.core.exceptions import ConfigurationError
from src.services.datapipe.augment import apply_augmentation, draw_augmentation
from src.services.datapipe.clips import clip_window
from src.services.datapipe.types import TripletDataset, project_labels

_SENTINEL = object()


@dataclass
class ClipBatch:
    """``images[b, 3, m, h, w]`` plus per-head labels of each clip's last frame."""

    images: np.ndarray
    labels: dict[str, np.ndarray]
    keys: list[tuple[str, int]]

    def __len__(self) -> int:
        return len(self.keys)


def assemble_batch(
    dataset: TripletDataset,
    keys: list[tuple[int, int]],
    m: int,
    draws: list | None = None,
) -> ClipBatch:
    """Stack the clips for ``(video position, t)`` keys."""
    clips, triplets = [], []
    for n, (vi, t) in enumerate(keys):
        video = dataset.videos[vi]
        images = video.images[clip_window(t, m)]
        if draws is not None:
            images = apply_augmentation(images, draws[n])
        clips.append(images)
        triplets.append(video.triplet_labels[t])
    images = np.stack(clips).transpose(0, 2, 1, 3, 4)
    return ClipBatch(
        images=np.ascontiguousarray(images),
        labels=project_labels(np.stack(triplets), dataset.taxonomy),
        keys=[(dataset.videos[vi].video_id, t) for vi, t in keys],
    )


def video_batches(
    dataset: TripletDataset, vi: int, m: int, batch_size: int
) -> Iterator[ClipBatch]:
    """Every clip of video ``vi`` in frame order (evaluation)."""
    video = dataset.videos[vi]
    for start in range(0, len(video), batch_size):
        stop = min(start + batch_size, len(video))
        yield assemble_batch(dataset, [(vi, t) for t in range(start, stop)], m)


class ClipBatchSampler:
    """Seeded per-epoch permutation over every ``(video, t)`` clip.

    Batches hold ``batch_size`` clips except possibly the last. With an
    augmentation config, clip ``k`` of the permutation in epoch ``e`` draws
    from ``default_rng([seed, e, k])``, so batches do not depend on prefetch.
    """

    def __init__(
        self,
        dataset: TripletDataset,
        m: int,
        batch_size: int,
        seed: int,
        augmentation: AugmentationConfig | None = None,
        prefetch: bool = False,
    ):
        if m < 1:
            raise ConfigurationError(f"clip size must be >= 1, got {m}")
        if batch_size < 1:
            raise ConfigurationError(f"batch size must be >= 1, got {batch_size}")
        self.keys = dataset.clip_keys()
        if not self.keys:
            raise ConfigurationError("cannot sample batches from an empty dataset")
        self.dataset = dataset
        self.m = m
        self.batch_size = batch_size
        self.seed = seed
        self.augmentation = augmentation if augmentation and augmentation.enabled else None
        self.prefetch = prefetch

    def __len__(self) -> int:
        return math.ceil(len(self.keys) / self.batch_size)

    def order(self, epoch: int) -> list[tuple[int, int]]:
        perm = np.random.default_rng([self.seed, epoch]).permutation(len(self.keys))
        return [self.keys[k] for k in perm]

    def _batches(self, epoch: int) -> Iterator[ClipBatch]:
        order = self.order(epoch)
        for start in range(0, len(order), self.batch_size):
            keys = order[start : start + self.batch_size]
            draws = None
            if self.augmentation is not None:
                draws = [
                    draw_augmentation(np.random.default_rng([self.seed, epoch, start + n]), self.augmentation)
                    for n in range(len(keys))
                ]
            yield assemble_batch(self.dataset, keys, self.m, draws)

    def epoch(self, epoch: int) -> Iterator[ClipBatch]:
        if not self.prefetch:
            yield from self._batches(epoch)
            return
        yield from _prefetched(self._batches(epoch))


def _prefetched(source: Iterator[ClipBatch], depth: int = 2) -> Iterator[ClipBatch]:
    """Run ``source`` on a worker thread; items arrive in their original order."""
    buffer: queue.Queue = queue.Queue(maxsize=depth)
    stop = threading.Event()

    def offer(item: object) -> bool:
        """Put ``item`` unless the consumer has gone away."""
        while not stop.is_set():
            try:
                buffer.put(item, timeout=0.1)
                return True
            except queue.Full:
                continue
        return False

    def worker() -> None:
        try:
            for item in source:
                if not offer(item):
                    return
            offer(_SENTINEL)
        except BaseException as exc:  # surfaced on the consumer side
            offer(exc)

    thread = threading.Thread(target=worker, name="clip-prefetch", daemon=True)
    thread.start()
    try:
        while True:
            item = buffer.get()
            if item is _SENTINEL:
                return
            if isinstance(item, BaseException):
                raise item
            yield item
    finally:
        stop.set()
        thread.join(timeout=1.0)
        if thread.is_alive():
            logger.warning("prefetch worker did not stop within 1s")


def batch_sampler(
    dataset: TripletDataset,
    m: int,
    batch: int,
    seed: int,
    augmentation: AugmentationConfig | None = None,
    prefetch: bool = False,
) -> ClipBatchSampler:
    return ClipBatchSampler(dataset, m, batch, seed, augmentation=augmentation, prefetch=prefetch)
