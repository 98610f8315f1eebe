import numpy as np
import pytest

from latgauge.lattice import GridSpec
from latgauge.spectral import build_kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def grid101():
    return GridSpec(101)


@pytest.fixture(scope="session")
def kernels101(grid101):
    return build_kernels(grid101)


@pytest.fixture(scope="session")
def grid31():
    return GridSpec(31)


@pytest.fixture(scope="session")
def kernels31(grid31):
    return build_kernels(grid31)
