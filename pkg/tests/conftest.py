"""Test configuration and fixtures."""

import os
import sys

import pytest
from loguru import logger

from src.services.datapipe.taxonomy import TripletTaxonomy

ACCEPTANCE_ENV = "TRIPLET_ACCEPTANCE"


def pytest_collection_modifyitems(config, items):
    """Skip ``slow`` training runs unless TRIPLET_ACCEPTANCE=1 or ``-m slow``."""
    if os.getenv(ACCEPTANCE_ENV) == "1" or "slow" in (config.getoption("-m") or ""):
        return
    skip = pytest.mark.skip(reason=f"desk-scale training run; set {ACCEPTANCE_ENV}=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def default_taxonomy() -> TripletTaxonomy:
    return TripletTaxonomy.default()


@pytest.fixture(autouse=True)
def _quiet_logs():
    """Keep loguru at WARNING during tests; the CLI installs its own sinks."""
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
    logger.configure(extra={"run_id": "test"})
    yield
    logger.remove()
