import numpy as np
import pytest

from borelcalc.expfun import ExpPoly


def exppoly_exp():
    return ExpPoly.from_atoms([(1.0, [1.0])])


def exppoly_cos():
    return ExpPoly.from_atoms([(1j, [0.5]), (-1j, [0.5])])


def exppoly_xe2x():
    return ExpPoly.from_atoms([(2.0, [0.0, 1.0])])


def exppoly_one_plus_x():
    return ExpPoly.from_atoms([(0.0, [1.0, 1.0])])


@pytest.fixture
def fixtures4():
    """The four standard test functions with their closed forms."""
    return [
        (exppoly_exp(), np.exp),
        (exppoly_cos(), np.cos),
        (exppoly_xe2x(), lambda x: x * np.exp(2 * x)),
        (exppoly_one_plus_x(), lambda x: 1 + x),
    ]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
