import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FACTOR_SHORTHANDS = ["rect:2,3", "rect:1,2", "sym:3", "asym:4", "asym:5", "spin:5", "sum:3*rect:1,2",
                     "sum:rect:2,2,spin:3"]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
