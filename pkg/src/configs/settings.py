"""Run configuration: training hyper-parameters plus nested model/data configs."""

import copy
import itertools
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, Field, field_validator

from src.configs.data import DataConfig
from src.configs.model import ModelConfig
from src.core.exceptions import ConfigurationError

LOG_LEVELS = frozenset({"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"})


class RunConfig(BaseModel):
    """Everything needed to reproduce a training or evaluation run.

    Values are validated when loaded from YAML; the dumped form is stored in
    every checkpoint manifest.
    """

    seed: int = Field(default=0, ge=0, description="Master seed for init, sampling, augmentation")
    deterministic: bool = Field(
        default=False, description="Disable background prefetch and other nondeterminism"
    )
    batch_size: int = Field(default=16, ge=1)
    epochs: int = Field(default=50, ge=0)
    base_lr: float = Field(default=0.01, gt=0)
    weight_decay: float = Field(default=1e-6, ge=0)
    warmup_fraction: float = Field(
        default=0.1, ge=0.0, lt=1.0, description="Share of all steps spent in linear warmup"
    )
    decay_gamma: float = Field(
        default=0.95, gt=0.0, le=1.0, description="Per-epoch exponential decay after warmup"
    )
    checkpoint_every: int = Field(default=10, ge=1, description="Checkpoint period in epochs")
    class_weighting: bool = Field(
        default=True, description="Weight positives by inverse class frequency"
    )
    log_level: str | None = Field(
        default=None,
        description="Console/file log level; --log-level wins, LOG_LEVEL applies when unset",
    )
    model: ModelConfig = Field(default_factory=ModelConfig)
    data: DataConfig = Field(default_factory=DataConfig)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, v: str | None) -> str | None:
        if v is None:
            return v
        level = v.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {sorted(LOG_LEVELS)}, got {v}")
        return level


def load_run_config(yaml_file: str | Path) -> RunConfig:
    """Load and validate a run configuration.

    The file holds the config under a top-level ``run`` key (a bare mapping
    is accepted too).

    Raises:
        FileNotFoundError: If the file doesn't exist
        pydantic.ValidationError: If a value is invalid
    """
    yaml_path = Path(yaml_file)
    if not yaml_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {yaml_path}")

    with open(yaml_path, encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{yaml_path}: expected a mapping at top level")

    return RunConfig(**raw.get("run", raw))


def apply_overrides(config: RunConfig, overrides: dict[str, Any]) -> RunConfig:
    """Return a re-validated copy with dotted-path overrides applied.

    ``{"model.tam.position": "early", "model.clip_size": 4}`` edits nested
    fields; a path that does not name an existing field raises
    ConfigurationError.
    """
    data = copy.deepcopy(config.model_dump(mode="json"))
    for dotted, value in overrides.items():
        node = data
        keys = dotted.split(".")
        for key in keys[:-1]:
            if not isinstance(node.get(key), dict):
                raise ConfigurationError(f"unknown config path: {dotted}")
            node = node[key]
        if keys[-1] not in node:
            raise ConfigurationError(f"unknown config path: {dotted}")
        node[keys[-1]] = value
    return RunConfig(**data)


def expand_grid(
    deltas: list[dict[str, Any]] | None = None,
    axes: dict[str, list[Any]] | None = None,
) -> list[dict[str, Any]]:
    """Combine explicit deltas with the cartesian product of ``axes``.

    Each explicit delta is crossed with every axis combination. With neither
    given, the result is a single empty delta (the base configuration).
    """
    combos: list[dict[str, Any]] = [{}]
    if axes:
        keys = list(axes)
        combos = [dict(zip(keys, values, strict=True)) for values in itertools.product(*axes.values())]
    bases = deltas or [{}]
    return [{**base, **combo} for base in bases for combo in combos]


def load_grid(yaml_file: str | Path) -> list[dict[str, Any]]:
    """Load an ablation grid: ``deltas`` (list of dotted-path mappings) and/or ``axes``.

    Example::

        grid:
          deltas:
            - {model.tam.position: early}
            - {model.tam.position: late}
          axes:
            model.clip_size: [4, 6, 8]
    """
    yaml_path = Path(yaml_file)
    if not yaml_path.exists():
        raise FileNotFoundError(f"Grid file not found: {yaml_path}")

    with open(yaml_path, encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{yaml_path}: expected a mapping at top level")
    raw = raw.get("grid", raw)

    deltas = raw.get("deltas") or []
    axes = raw.get("axes") or {}
    if not isinstance(deltas, list) or not all(isinstance(d, dict) for d in deltas):
        raise ConfigurationError(f"{yaml_path}: 'deltas' must be a list of mappings")
    if not isinstance(axes, dict) or not all(isinstance(v, list) and v for v in axes.values()):
        raise ConfigurationError(f"{yaml_path}: 'axes' must map paths to non-empty lists")
    return expand_grid(deltas, axes)
