"""Tests for the directory-layout dataset loader."""

import numpy as np
import pytest
from PIL import Image

from src.configs.synthetic import SyntheticSpec
from src.core.exceptions import DataError
from src.services.datapipe.loader import load_dataset, read_label_file, write_dataset
from src.services.datapipe.splits import SplitSpec
from src.services.datapipe.synthetic import synth_generate


def _label_line(index, active=()):
    flags = ["1" if k in active else "0" for k in range(100)]
    return ",".join([str(index), *flags])


def _write_video(root, video_id, n, size=(20, 10)):
    (root / "labels").mkdir(parents=True, exist_ok=True)
    frame_dir = root / "frames" / video_id
    frame_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for k in range(n):
        lines.append(_label_line(k, active=(k,)))
        Image.new("RGB", size, color=(255, 0, 0) if k % 2 == 0 else (0, 0, 255)).save(
            frame_dir / f"{k:06d}.png"
        )
    (root / "labels" / f"{video_id}.txt").write_text("\n".join(lines) + "\n", encoding="ascii")


class TestReadLabelFile:
    def test_parses_frames_and_flags(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text(_label_line(0, (3,)) + "\n" + _label_line(1, (4, 5)) + "\n")
        ids, labels = read_label_file(path)
        np.testing.assert_array_equal(ids, [0, 1])
        assert labels.shape == (2, 100)
        assert labels[1, 4] == 1 and labels[1, 5] == 1 and labels.sum() == 3

    def test_wrong_field_count_names_line(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text(_label_line(0) + "\n" + "1,0,1\n")
        with pytest.raises(DataError, match=r"v\.txt:2"):
            read_label_file(path)

    def test_non_binary_flag(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text(_label_line(0).replace(",0", ",2", 1) + "\n")
        with pytest.raises(DataError, match=r"v\.txt:1"):
            read_label_file(path)

    def test_missing_file_names_path(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="nope.txt"):
            read_label_file(tmp_path / "nope.txt")


class TestLoadDataset:
    def test_loads_only_requested_videos(self, tmp_path):
        _write_video(tmp_path, "VID01", 3)
        _write_video(tmp_path, "VID02", 2)
        dataset = load_dataset(tmp_path, ["VID02"], height=16, width=32)
        assert dataset.video_ids == ["VID02"]
        video = dataset.videos[0]
        assert video.images.shape == (2, 3, 16, 32)
        assert video.images.min() >= 0.0 and video.images.max() <= 1.0
        np.testing.assert_allclose(video.images[0, 0], 1.0)
        np.testing.assert_allclose(video.images[1, 2], 1.0)

    def test_missing_frame_names_path(self, tmp_path):
        _write_video(tmp_path, "VID01", 2)
        (tmp_path / "frames" / "VID01" / "000001.png").unlink()
        with pytest.raises(FileNotFoundError, match="000001.png"):
            load_dataset(tmp_path, ["VID01"], height=16, width=16)


class TestWriteDataset:
    def test_round_trip_through_directory_layout(self, tmp_path):
        dataset = synth_generate(SyntheticSpec(videos=2, frames_per_video=6, noise=0.0), 0, 16, 32)
        write_dataset(dataset, tmp_path)

        ids = SplitSpec.load(tmp_path / "splits.yml").select("all")
        assert ids == dataset.video_ids
        again = load_dataset(tmp_path, ids, height=16, width=32)
        for a, b in zip(dataset.videos, again.videos, strict=True):
            np.testing.assert_array_equal(a.triplet_labels, b.triplet_labels)
            np.testing.assert_allclose(a.images, b.images, atol=1 / 255)
