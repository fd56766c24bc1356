import warnings

import pytest
from hypothesis import HealthCheck, settings

from semiwf.grid import AliasingWarning
from semiwf.wavefront import HLadder

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ladder():
    return HLadder.dyadic(4, 14)


@pytest.fixture
def short_ladder():
    return HLadder.dyadic(4, 10)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasingWarning)
        yield


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
