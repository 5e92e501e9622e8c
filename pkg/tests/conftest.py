import numpy as np
import pytest

from spectrosens.params import from_config


@pytest.fixture(scope="session")
def default_params():
    """Reference working point: 1 mW, 500 nm probe; single absorbing state
    with 40 MHz detuning and symmetric slow rates."""
    return from_config({})


@pytest.fixture(scope="session")
def resonant_params():
    return from_config({"detuning_a_mhz": 0.0})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
