"""Per-frame feature extractor, instrument class-activation head, scene bottleneck.

Frames are processed independently with shared weights. In train mode the
batch-norm statistics are shared across every frame of the batch; in eval
mode batch norm is a fixed per-channel affine map, so a frame's features
depend on that frame alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.configs.model import ModelConfig
from src.core.exceptions import DimensionError
from src.services.datapipe.taxonomy import NUM_INSTRUMENTS
from src.services.tensor_engine import functional as F
from src.services.tensor_engine.nn import BatchNorm, Conv2d, Module, ReLU, Sequential
from src.services.tensor_engine.tensor import Tensor


def _frames_first(x: Tensor) -> tuple[Tensor, tuple[int, int]]:
    """``[b, m, c, h, w]`` → ``[b*m, c, h, w]``."""
    b, m = x.shape[:2]
    return x.reshape(b * m, *x.shape[2:]), (b, m)


def _split_frames(x: Tensor, bm: tuple[int, int]) -> Tensor:
    return x.reshape(*bm, *x.shape[1:])


class FeatureExtractor(Module):
    """Four stride-2 stages of conv3x3 + batch norm + ReLU (h, w reduced by 16)."""

    def __init__(self, channels: list[int], rng: np.random.Generator):
        super().__init__()
        stages = []
        c_in = 3
        for c_out in channels:
            stages.append(
                Sequential(Conv2d(c_in, c_out, 3, rng, stride=2, padding=1), BatchNorm(c_out), ReLU())
            )
            c_in = c_out
        self.stages = stages
        self.out_channels = c_in

    def forward(self, images: Tensor) -> Tensor:
        """``images[b, 3, m, h, w]`` → ``features[b, m, d, h/16, w/16]``."""
        if images.ndim != 5 or images.shape[1] != 3:
            raise DimensionError(f"clip images must be [b,3,m,h,w], got {images.shape}")
        frames, bm = _frames_first(images.transpose(0, 2, 1, 3, 4))
        for stage in self.stages:
            frames = stage(frames)
        return _split_frames(frames, bm)


@dataclass
class InstrumentCAM:
    cam: Tensor  # [b, m, 6, h', w']
    logits: Tensor  # [b, 6], GAP of the last-frame cam


class InstrumentWSL(Module):
    """Weakly supervised instrument localization: two conv3x3 + ReLU, then 1x1 to classes."""

    def __init__(self, in_channels: int, hidden: int, rng: np.random.Generator):
        super().__init__()
        self.body = Sequential(
            Conv2d(in_channels, hidden, 3, rng, padding=1),
            ReLU(),
            Conv2d(hidden, hidden, 3, rng, padding=1),
            ReLU(),
        )
        self.classifier = Conv2d(hidden, NUM_INSTRUMENTS, 1, rng)

    def forward(self, features: Tensor) -> InstrumentCAM:
        frames, bm = _frames_first(features)
        cam = _split_frames(self.classifier(self.body(frames)), bm)
        return InstrumentCAM(cam=cam, logits=F.global_avg_pool(cam[:, -1]))


class SceneBottleneck(Module):
    """1x1 convolution of the current (last) frame's features."""

    def __init__(self, in_channels: int, out_channels: int, rng: np.random.Generator):
        super().__init__()
        self.proj = Conv2d(in_channels, out_channels, 1, rng)

    def forward(self, features: Tensor) -> Tensor:
        return self.proj(features[:, -1])


class BackboneWSL(Module):
    """Feature extractor with the CAM head and the scene bottleneck attached."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        super().__init__()
        self.extractor = FeatureExtractor(config.backbone_channels, rng)
        self.wsl = InstrumentWSL(self.extractor.out_channels, config.wsl_channels, rng)
        self.bottleneck = SceneBottleneck(self.extractor.out_channels, config.scene_channels, rng)

    def extract_features(self, images: Tensor) -> Tensor:
        return self.extractor(images)

    def wsl_instrument(self, features: Tensor) -> InstrumentCAM:
        return self.wsl(features)

    def bottleneck_scene(self, features: Tensor) -> Tensor:
        return self.bottleneck(features)

    def forward(self, images: Tensor) -> tuple[Tensor, InstrumentCAM, Tensor]:
        features = self.extract_features(images)
        return features, self.wsl_instrument(features), self.bottleneck_scene(features)
