"""Small model configurations shared by the model tests."""

import pytest

from src.configs.model import ModelConfig, TamConfig


def _tiny_config(**tam) -> ModelConfig:
    return ModelConfig(
        clip_size=3,
        height=32,
        width=48,
        backbone_channels=[4, 4, 6, 8],
        wsl_channels=4,
        scene_channels=5,
        guidance_dim=3,
        decoder_width=8,
        decoder_heads=2,
        decoder_layers=2,
        tam=TamConfig(**tam),
    )


@pytest.fixture
def make_config():
    """Factory for tiny configs; keyword arguments go to ``TamConfig``."""
    return _tiny_config


@pytest.fixture
def config() -> ModelConfig:
    return _tiny_config()
