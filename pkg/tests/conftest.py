import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ccrcurves import sphere

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

C2, C3 = 0.5, math.sqrt(3.0) / 2.0


@pytest.fixture(scope="session")
def worked_curve():
    """The spherical ccr-curve with k1 = 2/sqrt(1-4s^2), 10^4 steps."""
    return sphere.example_522(10_000, (-0.45, 0.45))


@pytest.fixture(scope="session")
def worked_frenet(worked_curve):
    from ccrcurves import frenet

    return frenet.curvature_profile(worked_curve)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
