import pytest

from qpoly import set_backend
from qpoly.roof import OptimizerConfig

# small budget for unit tests; acceptance tests use the defaults
FAST = OptimizerConfig(restarts=4, max_evals_per_restart=5000)


@pytest.fixture
def fast_cfg():
    return FAST


@pytest.fixture
def numpy_backend():
    previous = set_backend("numpy")
    yield
    set_backend(previous)
