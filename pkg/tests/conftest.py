import numpy as np
import pytest

from wpc.grids import LineGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fine_grid():
    return LineGrid(8.0, 8192)


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for text in _ACCEPTANCE:
            terminalreporter.write_line(text)
