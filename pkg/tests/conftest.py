"""Shared fixtures for the simulator test suite"""
import numpy as np
import pytest

from modules.pointer_space import build_grid, make_gaussian
from modules.system_algebra import make_state, named_observable
from modules.verification import qubit_scenario


@pytest.fixture
def grid():
    """The 1024-point grid of length 80 used by the reference scenarios"""
    return build_grid(1024, 80.0)


@pytest.fixture
def small_grid():
    return build_grid(256, 40.0)


@pytest.fixture
def real_gaussian(grid):
    return make_gaussian(grid, sigma=1.0)


@pytest.fixture
def chirped_gaussian(grid):
    """sigma=1, c=0.5: Var_p = 1.25, dVar_q/dt = 2"""
    return make_gaussian(grid, sigma=1.0, chirp=0.5)


@pytest.fixture
def pauli_z():
    return named_observable("pauli-z")


@pytest.fixture
def plus_state():
    return make_state([1, 1])


@pytest.fixture
def plus_i_state():
    return make_state([1, 1j])


@pytest.fixture
def imaginary_scenario():
    """Pauli-Z, weak value i, chirped pointer, g = 1e-3"""
    return qubit_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
