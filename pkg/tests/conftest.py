import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jbstar.models import parse_model

settings.register_profile(
    "jbstar", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("jbstar")

SMALL_MODELS = ["matrix:1", "matrix:2", "matrix:3", "spin:3", "spin:4", "albert", "matrix:2+spin:3"]


@pytest.fixture(params=SMALL_MODELS)
def model(request):
    return parse_model(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
