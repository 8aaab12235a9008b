import numpy as np
import pytest

from qruler import _accel
from qruler.phase_space import Grid2D


@pytest.fixture(scope="session")
def grid():
    return Grid2D(6.0, 128)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    if request.param == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(None)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
