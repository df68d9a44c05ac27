"""Learning-rate schedule: linear warmup, then per-epoch exponential decay."""

from __future__ import annotations

import math

from src.configs.settings import RunConfig
from src.core.exceptions import ConfigurationError


def lr_schedule(step: int, total_steps: int, config: RunConfig) -> float:
    """Learning rate for global ``step`` of a run with ``total_steps`` steps.

    The first ``warmup_fraction`` of the run ramps linearly from 0 to
    ``base_lr``. After that the rate is ``base_lr * decay_gamma**k`` where
    ``k`` counts whole epochs completed since warmup ended, so it equals
    ``base_lr`` at the boundary and drops once per epoch.
    """
    if total_steps < 1:
        raise ConfigurationError(f"total_steps must be >= 1, got {total_steps}")
    if not 0 <= step < total_steps:
        raise ConfigurationError(f"step {step} outside [0, {total_steps})")
    if not 0.0 <= config.warmup_fraction < 1.0:
        raise ConfigurationError(f"warmup_fraction must be in [0, 1), got {config.warmup_fraction}")
    if not 0.0 < config.decay_gamma <= 1.0:
        raise ConfigurationError(f"decay_gamma must be in (0, 1], got {config.decay_gamma}")
    if config.epochs < 1:
        raise ConfigurationError("a schedule needs at least one epoch")

    progress = step / total_steps
    if progress < config.warmup_fraction:
        return config.base_lr * progress / config.warmup_fraction

    steps_per_epoch = total_steps / config.epochs
    warmup_steps = config.warmup_fraction * total_steps
    epochs_after = math.floor((step - warmup_steps) / steps_per_epoch + 1e-9)
    return config.base_lr * config.decay_gamma**epochs_after
