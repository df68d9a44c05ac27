"""Test environment setup."""

import sys


def test_python_version():
    """StrEnum and the typing syntax in src/ need Python 3.11+."""
    assert sys.version_info >= (3, 11), f"Python version {sys.version} is too old"


def test_package_importable():
    import src
    from src.main import build_parser

    assert src.__version__
    assert build_parser().prog == "triplets"
