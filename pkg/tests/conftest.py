import numpy as np
import pytest

from jensengap import build_discrete, characterize, parse_phi

# One line per acceptance criterion, printed in the terminal summary.
acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def d1():
    """The shared 2x2 worked instance: degrees (5, 7), c = 4, s = 3."""
    return build_discrete((1, 1), (1, 1), [[3, 1], [1, 3]], (1, 2),
                          meta={"id": "D1"})


@pytest.fixture
def t1():
    """Constant kernel and weights: every check is an identity."""
    return build_discrete((1, 1), (1, 1), [[1, 1], [1, 1]], (1, 1),
                          meta={"id": "T1"})


@pytest.fixture
def d1_profile(d1):
    return characterize(d1)


@pytest.fixture
def t1_profile(t1):
    return characterize(t1)


@pytest.fixture
def phi_id():
    return parse_phi("id")


@pytest.fixture
def phi_log():
    return parse_phi("log")
