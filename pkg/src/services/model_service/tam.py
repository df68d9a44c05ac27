"""Temporal attention: gate every frame of a clip per class, then fuse.

Gates come from spatial pooling, a same-padded 1-D convolution along the
clip axis with classes as channels, batch norm over the class channel and a
sigmoid. Fusion sums the gated frame maps over the clip::

    h = sum_i w_i * F_i        (w_i broadcast over space)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.exceptions import ConfigurationError, DimensionError
from src.services.tensor_engine import functional as F
from src.services.tensor_engine.nn import BatchNorm, Conv1d, Module
from src.services.tensor_engine.tensor import Tensor


@dataclass
class FusedVerb:
    """Refined current-step class map and its pooled logits."""

    h: Tensor  # [b, C, h', w']
    y: Tensor  # [b, C]


def _check_clip_maps(f: Tensor) -> None:
    if f.ndim != 5:
        raise DimensionError(f"expected clip maps [b,m,C,h,w], got {f.shape}")


def tam_gate(f: Tensor, conv: Conv1d, norm: BatchNorm) -> Tensor:
    """``f[b, m, C, h, w]`` → gates ``[b, m, C]`` strictly inside (0, 1)."""
    _check_clip_maps(f)
    kernel = conv.weight.shape[2]
    if kernel % 2 == 0:
        raise ConfigurationError(f"temporal kernel must be odd, got {kernel}")
    pooled = F.global_avg_pool(f).transpose(0, 2, 1)  # [b, C, m]
    pre = norm(conv(pooled))
    return F.sigmoid(pre).transpose(0, 2, 1)


def tam_scale(f: Tensor, w: Tensor) -> Tensor:
    """Per-frame gating without collapsing the clip axis."""
    _check_clip_maps(f)
    if w.shape != f.shape[:3]:
        raise DimensionError(f"gates {w.shape} do not match clip maps {f.shape}")
    return f * w.reshape(*w.shape, 1, 1)


def tam_fuse(f: Tensor, w: Tensor) -> Tensor:
    """``sum_i w[:, i] * f[:, i]`` → ``[b, C, h, w]``."""
    return tam_scale(f, w).sum(axis=1)


class TemporalAttention(Module):
    """One gate (1-D conv + batch norm + sigmoid) over ``classes`` channels."""

    def __init__(self, classes: int, kernel: int, rng: np.random.Generator):
        super().__init__()
        if kernel % 2 == 0:
            raise ConfigurationError(f"temporal kernel must be odd, got {kernel}")
        self.conv = Conv1d(classes, classes, kernel, rng, padding=kernel // 2)
        self.norm = BatchNorm(classes)

    def gate(self, f: Tensor) -> Tensor:
        return tam_gate(f, self.conv, self.norm)

    def forward(self, f: Tensor, collapse: bool = True) -> Tensor:
        w = self.gate(f)
        return tam_fuse(f, w) if collapse else tam_scale(f, w)


class TemporalAttentionStack(Module):
    """One or two temporal attention layers.

    With two layers the first gates each frame without summing over the
    clip, the result goes through batch norm (class channel) and ReLU, and
    the second layer gates and fuses.
    """

    def __init__(self, classes: int, kernel: int, layers: int, rng: np.random.Generator):
        super().__init__()
        if layers not in (1, 2):
            raise ConfigurationError(f"temporal attention supports 1 or 2 layers, got {layers}")
        self.layers = [TemporalAttention(classes, kernel, rng) for _ in range(layers)]
        self.norms = [BatchNorm(classes) for _ in range(layers - 1)]

    def forward(self, f: Tensor) -> Tensor:
        for layer, norm in zip(self.layers[:-1], self.norms, strict=True):
            scaled = layer(f, collapse=False)
            f = F.relu(norm(scaled.transpose(0, 2, 1, 3, 4)).transpose(0, 2, 1, 3, 4))
        return self.layers[-1](f, collapse=True)


def tam_apply(f: Tensor, stack: TemporalAttentionStack) -> FusedVerb:
    """Run the stack over ``f`` and pool the fused map."""
    h = stack(f)
    return FusedVerb(h=h, y=F.global_avg_pool(h))
