import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ewg import EwgParams

settings.register_profile("ewg", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ewg")

# acceptance lines collected during the session and echoed in the summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def base_params():
    return EwgParams(2.0, 1.0, 1.5, 0.5)
