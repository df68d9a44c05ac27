"""Triplet decoder: self-attention over one scene token and three component tokens."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.configs.model import ModelConfig
from src.core.exceptions import DimensionError
from src.services.datapipe.taxonomy import NUM_INSTRUMENTS, NUM_TARGETS, NUM_TRIPLETS, NUM_VERBS
from src.services.tensor_engine import functional as F
from src.services.tensor_engine import ops
from src.services.tensor_engine.nn import Linear, Module, MultiHeadAttention, ReLU, Sequential
from src.services.tensor_engine.tensor import Tensor


@dataclass
class DecoderOutput:
    y_ivt: Tensor  # [b, 100]
    y_i: Tensor  # [b, 6]
    y_v: Tensor  # [b, 10]
    y_t: Tensor  # [b, 15]

    def logits(self) -> dict[str, Tensor]:
        return {"instrument": self.y_i, "verb": self.y_v, "target": self.y_t, "triplet": self.y_ivt}


class DecoderLayer(Module):
    """Residual self-attention followed by a residual ReLU feed-forward block."""

    def __init__(self, width: int, heads: int, rng: np.random.Generator):
        super().__init__()
        self.attention = MultiHeadAttention(width, heads, rng)
        self.feed_forward = Sequential(Linear(width, 2 * width, rng), ReLU(), Linear(2 * width, width, rng))

    def forward(self, tokens: Tensor) -> Tensor:
        tokens = tokens + self.attention(tokens, tokens, tokens)
        return tokens + self.feed_forward(tokens)


class TripletDecoder(Module):
    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        super().__init__()
        width = config.decoder_width
        self.embed_scene = Linear(config.scene_channels, width, rng)
        self.embed_instrument = Linear(NUM_INSTRUMENTS, width, rng)
        self.embed_verb = Linear(NUM_VERBS, width, rng)
        self.embed_target = Linear(NUM_TARGETS, width, rng)
        self.layers = [DecoderLayer(width, config.decoder_heads, rng) for _ in range(config.decoder_layers)]
        self.classifier = Linear(width, NUM_TRIPLETS, rng)

    def forward(self, scene: Tensor, h_i: Tensor, h_v: Tensor, h_t: Tensor) -> DecoderOutput:
        maps = {"scene": scene, "h_i": h_i, "h_v": h_v, "h_t": h_t}
        for name, x in maps.items():
            if x.ndim != 4:
                raise DimensionError(f"decoder input {name} must be [b,c,h,w], got {x.shape}")
        reference = (scene.shape[0], *scene.shape[2:])
        for name, x in maps.items():
            if (x.shape[0], *x.shape[2:]) != reference:
                raise DimensionError(
                    f"decoder input {name} {x.shape} disagrees with scene {scene.shape}"
                )

        y_i, y_v, y_t = F.global_avg_pool(h_i), F.global_avg_pool(h_v), F.global_avg_pool(h_t)
        tokens = ops.stack(
            [
                self.embed_scene(F.global_avg_pool(scene)),
                self.embed_instrument(y_i),
                self.embed_verb(y_v),
                self.embed_target(y_t),
            ],
            axis=1,
        )
        for layer in self.layers:
            tokens = layer(tokens)
        return DecoderOutput(y_ivt=self.classifier(tokens.mean(axis=1)), y_i=y_i, y_v=y_v, y_t=y_t)


def decode(scene: Tensor, h_i: Tensor, h_v: Tensor, h_t: Tensor, decoder: TripletDecoder) -> DecoderOutput:
    return decoder(scene, h_i, h_v, h_t)
