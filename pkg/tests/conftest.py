import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "lamekit", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lamekit")


def central_diff(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
