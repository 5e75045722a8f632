import pytest

from quantal_defense import SecurityGame
from quantal_defense.experiments import builtin_space

ACCEPTANCE_LINES = []


@pytest.fixture
def game10():
    return SecurityGame(10.0, 1.0)


@pytest.fixture
def space_c():
    return builtin_space("C", 1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
