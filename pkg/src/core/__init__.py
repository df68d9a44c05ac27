"""Core utilities: logging, exceptions, error classification."""
