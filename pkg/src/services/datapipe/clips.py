"""Causal clip construction.

The clip ending at frame ``t`` holds frames ``t-m+1 .. t`` with indices
clamped at 0, so early clips repeat the first frame on the left. A video of
N frames yields exactly N clips.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.core.exceptions import ConfigurationError, DataError
from src.services.datapipe.types import Frame, LabelVector, VideoClip


def clip_window(t: int, m: int) -> np.ndarray:
    """Frame indices of the clip ending at ``t``: ``max(0, t - m + 1 + j)``."""
    if m < 1:
        raise ConfigurationError(f"clip size must be >= 1, got {m}")
    return np.maximum(0, t - m + 1 + np.arange(m))


def make_clips(frames: Sequence[Frame], labels: Sequence[LabelVector], m: int) -> list[VideoClip]:
    if m < 1:
        raise ConfigurationError(f"clip size must be >= 1, got {m}")
    if len(frames) != len(labels):
        raise DataError(f"{len(frames)} frames but {len(labels)} labels")
    return [
        VideoClip(
            frames=tuple(frames[j] for j in clip_window(t, m)),
            label=labels[t],
            t=t,
        )
        for t in range(len(frames))
    ]


def clip_images(images: np.ndarray, t: int, m: int) -> np.ndarray:
    """``[m, 3, h, w]`` images of the clip ending at ``t`` from a video array."""
    return images[clip_window(t, m)]
