import numpy as np
import pytest

from gfm.models import SmoothingParams, derive_stream
from gfm.services.problems import make_linear, make_norm
from gfm.utils.logging import configure_logging


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    configure_logging("WARNING", json_output=False)


@pytest.fixture
def stream():
    return derive_stream(1234, "tests", 0)


@pytest.fixture
def generator(stream):
    return stream.generator()


@pytest.fixture
def smoothing():
    return SmoothingParams(0.1)


@pytest.fixture
def norm5():
    return make_norm(5, start_radius=0.1)


@pytest.fixture
def linear2():
    return make_linear(np.array([0.6, -0.8]))
