"""
Temporal heads - collapse per-frame class maps of a clip to the current step.

This module provides a unified interface for the fusion strategies a branch
can use (temporal attention, current frame only).
"""

from abc import ABC, abstractmethod

import numpy as np

from src.configs.model import TamConfig, TemporalHeadKind
from src.core.exceptions import ConfigurationError, DimensionError
from src.services.model_service.tam import TemporalAttentionStack
from src.services.tensor_engine.nn import Module
from src.services.tensor_engine.tensor import Tensor


class TemporalHead(Module, ABC):
    """Abstract base class for temporal fusion heads."""

    @abstractmethod
    def forward(self, f: Tensor) -> Tensor:
        """
        Fuse a clip of class maps.

        Args:
            f: Clip maps ``[b, m, C, h, w]``, the last frame being the current one

        Returns:
            Current-step map ``[b, C, h, w]``
        """
        pass

    @property
    @abstractmethod
    def uses_history(self) -> bool:
        """Whether frames before the current one influence the output."""
        pass


class TamHead(TemporalHead):
    def __init__(self, classes: int, config: TamConfig, rng: np.random.Generator):
        super().__init__()
        self.stack = TemporalAttentionStack(classes, config.kernel, config.layers, rng)

    def forward(self, f: Tensor) -> Tensor:
        return self.stack(f)

    @property
    def uses_history(self) -> bool:
        return True


class LastFrameHead(TemporalHead):
    """Single-frame baseline: the current frame's slice, whatever ``m`` is."""

    def forward(self, f: Tensor) -> Tensor:
        if f.ndim != 5:
            raise DimensionError(f"expected clip maps [b,m,C,h,w], got {f.shape}")
        return f[:, -1]

    @property
    def uses_history(self) -> bool:
        return False


class TemporalHeadFactory:
    @staticmethod
    def create(
        kind: TemporalHeadKind | str,
        classes: int,
        config: TamConfig,
        rng: np.random.Generator,
    ) -> TemporalHead:
        """
        Factory method to create temporal heads.

        Args:
            kind: ``tam`` or ``last_frame``
            classes: Channel count of the maps the head fuses
            config: Temporal attention settings (kernel, layers)
            rng: Generator used for weight initialization

        Returns:
            TemporalHead: Instance of the requested head

        Raises:
            ConfigurationError: If kind is unknown
        """
        if kind == TemporalHeadKind.TAM:
            return TamHead(classes, config, rng)
        elif kind == TemporalHeadKind.LAST_FRAME:
            return LastFrameHead()
        else:
            raise ConfigurationError(f"Unknown temporal head kind: {kind}")
