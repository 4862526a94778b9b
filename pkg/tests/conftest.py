import numpy as np
import pytest

from spinmat import ParameterPoint, generate

REFERENCE_ANGLES = (1.1, 0.7, 0.4, 2.0)
REFERENCE_SPECTRUM = (5, 3, 1, -2, -4)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def reference_point():
    return ParameterPoint.from_angles(*REFERENCE_ANGLES)


@pytest.fixture
def reference_matrix(reference_point):
    return generate(reference_point, REFERENCE_SPECTRUM).entries


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
