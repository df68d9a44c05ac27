"""Full recognizer: backbone + CAM head → guided temporal attention → triplet decoder."""

from __future__ import annotations

import numpy as np

from src.configs.model import ModelConfig
from src.core.exceptions import DimensionError
from src.services.model_service.backbone_wsl import BackboneWSL
from src.services.model_service.cagtam import Cagtam, CagtamOutput
from src.services.model_service.triplet_decoder import DecoderOutput, TripletDecoder
from src.services.tensor_engine.nn import Module
from src.services.tensor_engine.tensor import Tensor, as_tensor, no_grad


class TripletRecognizer(Module):
    """Maps a batch of causal clips ``[b, 3, m, h, w]`` to logits for all four heads.

    Parameters are drawn from ``default_rng(seed)`` in construction order, so
    the same config and seed always give the same initialization.
    """

    def __init__(self, config: ModelConfig, seed: int = 0):
        super().__init__()
        rng = np.random.default_rng(seed)
        self.config = config
        self.backbone = BackboneWSL(config, rng)
        self.cagtam = Cagtam(config, self.backbone.extractor.out_channels, rng)
        self.decoder = TripletDecoder(config, rng)

    @property
    def clip_size(self) -> int:
        return self.config.effective_clip_size

    def components(self, images: Tensor) -> tuple[Tensor, CagtamOutput]:
        """Scene features and fused component maps."""
        features, cam, scene = self.backbone(images)
        return scene, self.cagtam(features, cam)

    def forward(self, images: Tensor | np.ndarray) -> DecoderOutput:
        images = as_tensor(images)
        if images.ndim != 5 or images.shape[3:] != (self.config.height, self.config.width):
            raise DimensionError(
                f"expected clips [b,3,m,{self.config.height},{self.config.width}], got {images.shape}"
            )
        scene, parts = self.components(images)
        return self.decoder(scene, parts.h_i, parts.verb.h, parts.h_t)

    def predict(self, images: np.ndarray) -> np.ndarray:
        """Triplet probabilities ``[b, 100]`` in eval mode, without a tape."""
        was_training = self.training
        self.eval()
        try:
            with no_grad():
                out = self.forward(images)
        finally:
            self.train(was_training)
        logits = out.y_ivt.data.astype(np.float64)
        return 0.5 * (1.0 + np.tanh(0.5 * logits))
