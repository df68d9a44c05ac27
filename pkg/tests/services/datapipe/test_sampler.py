"""Tests for the shuffled clip batch sampler."""

import threading

import numpy as np
import pytest

from src.configs.data import AugmentationConfig
from src.core.exceptions import ConfigurationError
from src.services.datapipe.sampler import ClipBatchSampler, _prefetched, video_batches
from src.services.datapipe.taxonomy import TripletTaxonomy
from src.services.datapipe.types import TripletDataset, VideoData


def _dataset(lengths=(7, 5)):
    videos = []
    for vi, n in enumerate(lengths):
        images = np.zeros((n, 3, 2, 3), dtype=np.float32)
        images[:, 0, 0, 0] = np.arange(n)
        labels = np.zeros((n, 100), dtype=np.float32)
        labels[np.arange(n), np.arange(n)] = 1
        videos.append(VideoData(f"V{vi}", images, labels))
    return TripletDataset(videos, TripletTaxonomy.default())


class TestClipBatchSampler:
    def test_epoch_covers_every_clip_once(self):
        sampler = ClipBatchSampler(_dataset(), m=3, batch_size=5, seed=0)
        keys = [k for batch in sampler.epoch(0) for k in batch.keys]
        assert sorted(keys) == sorted([("V0", t) for t in range(7)] + [("V1", t) for t in range(5)])

    def test_batch_sizes(self):
        sampler = ClipBatchSampler(_dataset(), m=3, batch_size=5, seed=0)
        assert [len(b) for b in sampler.epoch(0)] == [5, 5, 2]
        assert len(sampler) == 3

    def test_same_seed_same_order_different_epoch_differs(self):
        a = ClipBatchSampler(_dataset(), m=2, batch_size=4, seed=3)
        b = ClipBatchSampler(_dataset(), m=2, batch_size=4, seed=3)
        assert a.order(0) == b.order(0)
        assert a.order(0) != a.order(1)

    def test_batch_layout_and_causality(self):
        sampler = ClipBatchSampler(_dataset(), m=4, batch_size=12, seed=1)
        batch = next(iter(sampler.epoch(0)))
        assert batch.images.shape == (12, 3, 4, 2, 3)
        for n, (_, t) in enumerate(batch.keys):
            frame_ids = batch.images[n, 0, :, 0, 0]
            assert frame_ids[-1] == t
            assert frame_ids.max() == t
            assert batch.labels["triplet"][n, t] == 1

    def test_prefetch_preserves_order(self):
        aug = AugmentationConfig()
        plain = ClipBatchSampler(_dataset(), m=2, batch_size=3, seed=4, augmentation=aug)
        fetched = ClipBatchSampler(_dataset(), m=2, batch_size=3, seed=4, augmentation=aug, prefetch=True)
        for a, b in zip(plain.epoch(2), fetched.epoch(2), strict=True):
            assert a.keys == b.keys
            np.testing.assert_array_equal(a.images, b.images)

    def test_empty_dataset(self):
        with pytest.raises(ConfigurationError):
            ClipBatchSampler(TripletDataset([], TripletTaxonomy.default()), m=2, batch_size=2, seed=0)


class TestVideoBatches:
    def test_frame_order(self):
        dataset = _dataset()
        keys = [k for batch in video_batches(dataset, 1, m=3, batch_size=2) for k in batch.keys]
        assert keys == [("V1", t) for t in range(5)]


class TestPrefetch:
    @staticmethod
    def _workers_alive() -> bool:
        return any(t.name == "clip-prefetch" and t.is_alive() for t in threading.enumerate())

    def test_abandoned_stream_releases_worker(self):
        stream = _prefetched(iter(range(100)), depth=1)
        assert next(stream) == 0
        stream.close()
        assert not self._workers_alive()

    def test_worker_error_reaches_consumer(self):
        def failing():
            yield 0
            raise ValueError("bad frame")

        with pytest.raises(ValueError, match="bad frame"):
            list(_prefetched(failing()))
        assert not self._workers_alive()

    def test_error_after_abandon_does_not_block(self):
        def failing():
            yield from range(3)
            raise ValueError("late")

        stream = _prefetched(failing(), depth=1)
        assert next(stream) == 0
        stream.close()
        assert not self._workers_alive()
