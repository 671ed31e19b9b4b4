import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from algebroid_obstructions.geometry import TetraCover, area_form
from algebroid_obstructions.obstructions import PrequantizationSpec

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FOUR_PI = 4.0 * np.pi


@pytest.fixture(scope="session")
def cover():
    return TetraCover()


@pytest.fixture(scope="session")
def wide_cover():
    # margins beyond pi/2 make the quadruple overlap nonempty
    return TetraCover(margin=1.7, n_samples=4000)


@pytest.fixture(scope="session")
def area_spec():
    return PrequantizationSpec(area_form())


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
