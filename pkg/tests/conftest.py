import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bitension import kernels
from bitension.funckit import GridSpec

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


SPHERE_GRID = GridSpec(0.0, math.pi, 2001, 1e-3)
# grids kept away from the poles for properties whose tolerance is
# absolute; near r = 0 the residual summands reach 1e10 and rounding alone
# exceeds 1e-12
INTERIOR_GRID = GridSpec(0.0, math.pi, 401, 0.05)


@pytest.fixture(params=kernels.BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
