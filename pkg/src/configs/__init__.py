"""Configuration management."""

from . import data, model, settings, synthetic

__all__ = ["data", "model", "settings", "synthetic"]
