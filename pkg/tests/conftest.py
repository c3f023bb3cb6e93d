import numpy as np
import pytest

from ddehopf import expansion, models


@pytest.fixture(scope="session")
def ndde():
    return models.make_ndde()


@pytest.fixture(scope="session")
def sir():
    return models.make_sir()


@pytest.fixture(scope="session")
def ndde_msq8(ndde):
    """Order-8 car-following expansion, mean-square normalization."""
    return expansion.expand(ndde, 8, z0_scale="msq")


@pytest.fixture(scope="session")
def ndde_2pi5(ndde):
    """Order-5 car-following expansion, 2*pi normalization."""
    return expansion.expand(ndde, 5, z0_scale="paper")


@pytest.fixture(scope="session")
def sir_2pi8(sir):
    """Order-8 epidemic expansion, 2*pi normalization."""
    return expansion.expand(sir, 8, z0_scale="paper")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
