"""
Shared fixtures and the ``slow`` marker for full-size reproductions.
"""
import tempfile
from pathlib import Path

import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="Run full-size reproductions")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow", default=False):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def temp_workspace():
    """Create temporary workspace directory for testing."""
    with tempfile.TemporaryDirectory() as temp_dir:
        workspace = Path(temp_dir) / "test_workspace"
        workspace.mkdir()
        yield workspace


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
