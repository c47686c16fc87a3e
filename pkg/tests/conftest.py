import pytest

from shearfront import ConeSpec, FrequencyWindow, standard_basis

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def spec2d():
    return standard_basis([0.5])


@pytest.fixture(scope="session")
def window():
    return FrequencyWindow(tau1=0.9, tau2=1.1, eps0=0.1)


@pytest.fixture(scope="session")
def cone():
    return ConeSpec(eps=0.1, R=10.0)
