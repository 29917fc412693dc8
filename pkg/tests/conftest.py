import pytest

from cnmdesign import Objective, SolverConfig, nsfnet_emp, solve


@pytest.fixture(scope="session")
def nsfnet():
    return nsfnet_emp()


@pytest.fixture(scope="session")
def nsfnet_designs(nsfnet):
    """Optimal 3..6-controller designs for both objectives on the fixture."""
    return {
        (obj, n): solve(nsfnet, SolverConfig(obj, n))
        for obj in Objective
        for n in (3, 4, 5, 6)
    }


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
