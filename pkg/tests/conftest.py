import math

import pytest

from tangleroof.roof import compute_profile
from tangleroof.spin_model import ModelParams, model_mixture

# reference points: four-real-root polytope, and the 3-vertex N pair
POINT_D = ModelParams(1.0, 0.9, 0.1 * math.pi)
POINT_E = ModelParams(0.1, 0.5, 0.15708)
POINT_E_COMPANION = ModelParams(0.1, 0.5, 0.03 * math.pi)

_CRITERIA = []


@pytest.fixture(scope="session")
def criterion_log():
    return _CRITERIA


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in _CRITERIA:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mix_d():
    return model_mixture(POINT_D)[0]


@pytest.fixture(scope="session")
def mix_e():
    return model_mixture(POINT_E)[0]


@pytest.fixture(scope="session")
def prof_d(mix_d):
    return compute_profile(mix_d)


@pytest.fixture(scope="session")
def prof_e(mix_e):
    return compute_profile(mix_e)
