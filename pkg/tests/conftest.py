import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from strataudit.geometry import general_position_check, make_rng

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def gp_points(rng: np.random.Generator, n: int, box: float = 10.0) -> np.ndarray:
    while True:
        P = rng.uniform(0.0, box, size=(n, 2))
        if general_position_check(P).ok:
            return P


@pytest.fixture
def rng():
    return make_rng(12345)
