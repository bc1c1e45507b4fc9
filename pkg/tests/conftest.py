import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "digitink",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("digitink")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
