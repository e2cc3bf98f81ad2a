"""
Shared fixtures for the test suite
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

# every forward pass in the suite verifies gate and band-weight ranges
os.environ.setdefault("NUC_CHECK_RANGES", "1")

from src.data import GenerationConfig, generate_dataset  # noqa: E402
from src.model import ArchConfig, init_model  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow reproduction tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_arch():
    return ArchConfig.full(n=1, C=4, r=1)


@pytest.fixture
def tiny_model(tiny_arch):
    return init_model(tiny_arch, seed=3)


@pytest.fixture(scope="session")
def small_config():
    return GenerationConfig(size=(32, 32), r_min=4.0, perlin_cell=16)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory, small_config):
    """Four 32x32 samples, generated once per session"""
    out = tmp_path_factory.mktemp("data") / "small"
    return generate_dataset(out, small_config, count=4, seed=11)
