# tests/conftest.py

import numpy as np
import pytest

from tools.hedgehog_ode import solve_profile
from tools.material import ReducedParams


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow lattice experiments")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def rp100():
    return ReducedParams.from_temperature(100.0, 50.0)


@pytest.fixture(scope="session")
def profile100():
    return solve_profile(100.0, 50.0, 2000)


@pytest.fixture(scope="session")
def rp_small():
    return ReducedParams.from_temperature(100.0, 12.0)


@pytest.fixture(scope="session")
def profile_small():
    """Smaller droplet for lattice tests."""
    return solve_profile(100.0, 12.0, 800)
