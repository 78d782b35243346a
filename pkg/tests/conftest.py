import numpy as np
import pytest

from odtcrystal.core import khz_to_rad, preset_beam
from odtcrystal.potential import ElectrostaticConfig

OMEGA_25 = float(khz_to_rad(25.0))
OMEGA_2496 = float(khz_to_rad(24.96))


@pytest.fixture
def vis():
    return preset_beam("vis")


@pytest.fixture
def nir():
    return preset_beam("nir")


@pytest.fixture
def axial25():
    return ElectrostaticConfig.from_axial(OMEGA_25)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
