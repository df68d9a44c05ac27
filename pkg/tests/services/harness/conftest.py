"""Tiny run configurations and datasets for the harness tests."""

import pytest

from src.configs.settings import RunConfig
from src.services.harness.datasets import build_datasets


def _tiny_run(**overrides) -> RunConfig:
    raw = {
        "seed": 3,
        "deterministic": True,
        "batch_size": 8,
        "epochs": 2,
        "base_lr": 0.01,
        "checkpoint_every": 1,
        "model": {
            "clip_size": 3,
            "height": 32,
            "width": 48,
            "backbone_channels": [4, 4, 6, 8],
            "wsl_channels": 4,
            "scene_channels": 5,
            "guidance_dim": 3,
            "decoder_width": 8,
            "decoder_heads": 2,
            "decoder_layers": 1,
        },
        "data": {
            "source": "synthetic",
            "heldout_videos": 1,
            "synthetic": {"videos": 2, "frames_per_video": 10},
        },
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(raw.get(key), dict):
            raw[key] = {**raw[key], **value}
        else:
            raw[key] = value
    return RunConfig(**raw)


@pytest.fixture
def make_run():
    """Factory for tiny run configs; dict overrides merge one level deep."""
    return _tiny_run


@pytest.fixture
def run_config() -> RunConfig:
    return _tiny_run()


@pytest.fixture
def datasets(run_config):
    return build_datasets(run_config)
