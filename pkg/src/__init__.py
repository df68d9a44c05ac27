"""Temporal triplet recognition - causal clip models for surgical action triplets."""

__version__ = "0.1.0"
