"""Clip-level photometric and flip augmentation.

One draw per clip, applied identically to every frame: optional horizontal
flip, then contrast around 0.5, then brightness scaling, then clamping to
[0, 1]. Labels are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import overload

import numpy as np

from src.configs.data import AugmentationConfig
from src.services.datapipe.types import Frame, VideoClip


@dataclass(frozen=True)
class AugmentDraw:
    flip: bool
    brightness: float
    contrast: float

    @classmethod
    def identity(cls) -> AugmentDraw:
        return cls(flip=False, brightness=1.0, contrast=1.0)


def draw_augmentation(rng: np.random.Generator, config: AugmentationConfig) -> AugmentDraw:
    return AugmentDraw(
        flip=bool(rng.random() < config.flip_probability),
        brightness=float(rng.uniform(*config.brightness)),
        contrast=float(rng.uniform(*config.contrast)),
    )


def apply_augmentation(images: np.ndarray, draw: AugmentDraw) -> np.ndarray:
    """Apply ``draw`` to images whose last two axes are (h, w)."""
    out = images[..., ::-1] if draw.flip else images
    out = (out - 0.5) * draw.contrast + 0.5
    out = out * draw.brightness
    return np.clip(out, 0.0, 1.0).astype(images.dtype, copy=False)


@overload
def augment(clip: VideoClip, seed, config: AugmentationConfig | None = None) -> VideoClip: ...
@overload
def augment(clip: np.ndarray, seed, config: AugmentationConfig | None = None) -> np.ndarray: ...


def augment(clip, seed, config=None):
    """Augment a clip (a ``VideoClip`` or an ``[m, 3, h, w]`` array) with one seeded draw."""
    draw = draw_augmentation(np.random.default_rng(seed), config or AugmentationConfig())
    if isinstance(clip, VideoClip):
        images = apply_augmentation(clip.images, draw)
        frames = tuple(
            Frame(image, frame.video_id, frame.index)
            for image, frame in zip(images, clip.frames, strict=True)
        )
        return replace(clip, frames=frames)
    return apply_augmentation(np.asarray(clip), draw)
