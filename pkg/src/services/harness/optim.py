"""Plain SGD with decoupled weight decay."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from src.core.exceptions import ConfigurationError, NumericError
from src.services.tensor_engine.nn import Parameter


class SGD:
    """``theta <- theta - lr * (grad + weight_decay * theta)``, no momentum.

    Parameters without a gradient (not reached by the loss) still decay.
    """

    def __init__(self, parameters: Iterable[Parameter], weight_decay: float = 0.0):
        self.parameters = list(parameters)
        if not self.parameters:
            raise ConfigurationError("optimizer got no parameters")
        if weight_decay < 0:
            raise ConfigurationError(f"weight_decay must be >= 0, got {weight_decay}")
        self.weight_decay = weight_decay

    def zero_grad(self) -> None:
        for p in self.parameters:
            p.zero_grad()

    def step(self, lr: float) -> None:
        if not np.isfinite(lr) or lr < 0:
            raise NumericError(f"learning rate must be finite and >= 0, got {lr}")
        for p in self.parameters:
            update = self.weight_decay * p.data
            if p.grad is not None:
                update = p.grad + update
            p.data -= lr * update
