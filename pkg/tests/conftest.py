import numpy as np
import pytest

from couettelab.grid import make_grid, random_real_field


@pytest.fixture
def small_grid():
    # 5 x 9 lattice, d_eta = 1
    return make_grid(2, 4.0, np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_field(small_grid, rng):
    return random_real_field(small_grid, rng)
