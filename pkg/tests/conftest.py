import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from biphoton import SlitGeometry, SourceParams, default_source

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def source():
    """702 nm pairs from a 7 mm crystal, Omega = 10 sigma."""
    return default_source()


@pytest.fixture
def table_source():
    return SourceParams(lam=702e-9, sigma=11.4e-6, omega_cap=114e-6)


@pytest.fixture
def table_geometry():
    return SlitGeometry(z=2e-3, z_tau=0.07, d=200e-6, beta1=36e-6, beta2=5e-6)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(LINES.items()):
            terminalreporter.write_line(line)
