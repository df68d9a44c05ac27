"""Class-activation guided attention with temporal fusion.

The instrument CAM is the context signal for the verb and target branches:
attention scores over spatial positions compare projected backbone features
(queries) with the projected CAM (keys). Each branch then collapses its clip
of class maps to the current step with a temporal head.

Fusion positions for the verb branch:

* ``late``: guidance on every frame, then the temporal head.
* ``early``: 1x1 projection to verb channels, temporal head, then guidance
  on the fused map with the current frame's CAM.
* ``both``: projection, a non-collapsing temporal gate, guidance per frame,
  then the temporal head.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from src.configs.model import Branch, FusionPosition, ModelConfig, TemporalHeadKind
from src.core.exceptions import DimensionError
from src.services.datapipe.taxonomy import NUM_INSTRUMENTS, NUM_TARGETS, NUM_VERBS
from src.services.model_service.backbone_wsl import InstrumentCAM
from src.services.model_service.tam import FusedVerb, TemporalAttention
from src.services.model_service.temporal_head import (
    LastFrameHead,
    TemporalHead,
    TemporalHeadFactory,
)
from src.services.tensor_engine import functional as F
from src.services.tensor_engine.nn import Conv2d, Module, Parameter
from src.services.tensor_engine.tensor import Tensor, get_default_dtype


class GuidedAttention(Module):
    """Spatial attention whose keys come from the instrument CAM.

    ``out = V + gamma * softmax(Q K^T / sqrt(e)) V`` over the ``h*w``
    positions of one frame, with ``gamma`` starting at 0.
    """

    def __init__(self, in_channels: int, classes: int, key_dim: int, rng: np.random.Generator):
        super().__init__()
        self.query = Conv2d(in_channels, key_dim, 1, rng)
        self.key = Conv2d(NUM_INSTRUMENTS, key_dim, 1, rng)
        self.value = Conv2d(in_channels, classes, 1, rng)
        self.gamma = Parameter(np.zeros(1), dtype=get_default_dtype())

    def forward(self, features: Tensor, cam: Tensor) -> Tensor:
        if features.ndim != 4 or cam.ndim != 4:
            raise DimensionError(
                f"guided attention expects [n,c,h,w] inputs, got {features.shape} and {cam.shape}"
            )
        if features.shape[0] != cam.shape[0] or features.shape[2:] != cam.shape[2:]:
            raise DimensionError(
                f"features {features.shape} and cam {cam.shape} disagree on batch or spatial extent"
            )
        n, _, h, w = features.shape
        values = self.value(features)
        classes = values.shape[1]

        def tokens(x: Tensor) -> Tensor:
            return x.reshape(n, x.shape[1], h * w).transpose(0, 2, 1)

        attended, _ = F.scaled_dot_product_attention(
            tokens(self.query(features)), tokens(self.key(cam)), tokens(values)
        )
        attended = attended.transpose(0, 2, 1).reshape(n, classes, h, w)
        return values + self.gamma * attended


def per_frame(fn: Callable[..., Tensor], *clips: Tensor) -> Tensor:
    """Apply a frame-level module to ``[b, m, ...]`` clips with shared weights."""
    b, m = clips[0].shape[:2]
    out = fn(*(x.reshape(b * m, *x.shape[2:]) for x in clips))
    return out.reshape(b, m, *out.shape[1:])


def guided_attention(
    features: Tensor,
    cam: Tensor,
    verb_attention: GuidedAttention,
    target_attention: GuidedAttention,
) -> tuple[Tensor, Tensor]:
    """Per-frame verb ``[b, m, 10, h, w]`` and target ``[b, m, 15, h, w]`` maps."""
    _check_aligned(features, cam)
    return (
        per_frame(verb_attention, features, cam),
        per_frame(target_attention, features, cam),
    )


def _check_aligned(features: Tensor, cam: Tensor) -> None:
    if features.ndim != 5 or cam.ndim != 5:
        raise DimensionError(f"expected clip tensors, got {features.shape} and {cam.shape}")
    if features.shape[:2] != cam.shape[:2] or features.shape[3:] != cam.shape[3:]:
        raise DimensionError(
            f"features {features.shape} and cam {cam.shape} disagree on batch, clip or spatial extent"
        )


@dataclass
class CagtamOutput:
    verb: FusedVerb
    h_t: Tensor  # [b, 15, h', w']
    y_t: Tensor
    h_i: Tensor  # [b, 6, h', w']
    y_i: Tensor


class Cagtam(Module):
    def __init__(self, config: ModelConfig, in_channels: int, rng: np.random.Generator):
        super().__init__()
        tam = config.tam
        self.position = tam.position

        projected = self.position in (FusionPosition.EARLY, FusionPosition.BOTH)
        self.verb_projection = Conv2d(in_channels, NUM_VERBS, 1, rng) if projected else None
        self.verb_attention = GuidedAttention(
            NUM_VERBS if projected else in_channels, NUM_VERBS, config.guidance_dim, rng
        )
        self.target_attention = GuidedAttention(in_channels, NUM_TARGETS, config.guidance_dim, rng)

        def head(branch: Branch, classes: int) -> TemporalHead:
            if branch in tam.tam_targets:
                return TemporalHeadFactory.create(tam.temporal_head, classes, tam, rng)
            return LastFrameHead()

        self.verb_head = head("verb", NUM_VERBS)
        self.instrument_head = head("instrument", NUM_INSTRUMENTS)
        self.target_head = head("target", NUM_TARGETS)

        self.early_gate = None
        if (
            self.position == FusionPosition.BOTH
            and tam.temporal_head == TemporalHeadKind.TAM
            and "verb" in tam.tam_targets
        ):
            self.early_gate = TemporalAttention(NUM_VERBS, tam.kernel, rng)

    def forward(self, features: Tensor, cam: InstrumentCAM) -> CagtamOutput:
        maps = cam.cam
        _check_aligned(features, maps)

        h_i = self.instrument_head(_window(maps, self.instrument_head))
        h_t = self.target_head(
            per_frame(
                self.target_attention,
                _window(features, self.target_head),
                _window(maps, self.target_head),
            )
        )
        h_v = self._verb(features, maps)
        return CagtamOutput(
            verb=FusedVerb(h=h_v, y=F.global_avg_pool(h_v)),
            h_t=h_t,
            y_t=F.global_avg_pool(h_t),
            h_i=h_i,
            y_i=F.global_avg_pool(h_i),
        )

    def _verb(self, features: Tensor, maps: Tensor) -> Tensor:
        features = _window(features, self.verb_head)
        maps = _window(maps, self.verb_head)
        if self.position == FusionPosition.LATE:
            return self.verb_head(per_frame(self.verb_attention, features, maps))

        projected = per_frame(self.verb_projection, features)
        if self.position == FusionPosition.EARLY:
            return self.verb_attention(self.verb_head(projected), maps[:, -1])

        if self.early_gate is not None:
            projected = self.early_gate(projected, collapse=False)
        return self.verb_head(per_frame(self.verb_attention, projected, maps))


def _window(x: Tensor, head: TemporalHead) -> Tensor:
    """The whole clip for heads that use history, else the current frame only."""
    return x if head.uses_history else x[:, -1:]


def cagtam_forward(features: Tensor, cam: InstrumentCAM, module: Cagtam) -> CagtamOutput:
    return module(features, cam)
