import pytest
from hypothesis import HealthCheck, settings

from lefsum import manifold as mf

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def E1():
    return mf.build_preset("E1")


@pytest.fixture(scope="session")
def quintic():
    return mf.build_preset("quintic")


@pytest.fixture(scope="session")
def quintic_M(quintic):
    return mf.blow_up(quintic, quintic.degree)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
