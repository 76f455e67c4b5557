"""Pytest configuration and fixtures for milling-ga tests."""

import math

import pytest

from milling_ga.constants import DEPTH_GRID_PRESETS
from milling_ga.cutting_model import CuttingModel
from milling_ga.models import GaConfig, Plan, ProblemData
from milling_ga.oracle import Oracle


@pytest.fixture
def problem() -> ProblemData:
    """Return the published example dataset on its fine depth grid."""
    return ProblemData()


@pytest.fixture
def coarse_problem() -> ProblemData:
    """Return the example dataset on the 0.5 mm grid of the published lookup table."""
    return ProblemData(**DEPTH_GRID_PRESETS["coarse"])


@pytest.fixture
def model(problem: ProblemData) -> CuttingModel:
    return CuttingModel(problem, log_findings=False)


@pytest.fixture
def oracle(problem: ProblemData) -> Oracle:
    return Oracle(problem)


@pytest.fixture
def reported_plan() -> Plan:
    """Return the published GA optimum at d_t = 6 mm.

    The finish feed sits exactly on the surface-finish cap; the printed
    0.2791 rounds just past it.
    """
    return Plan(
        V_s=122.23,
        f_s=math.sqrt(0.0025 / 0.0321),
        d_s=2.0,
        V_r=60.12,
        f_r=0.3187,
        d_r=4.0,
        n=1,
    )


@pytest.fixture
def small_ga_config() -> GaConfig:
    """Return a GA configuration small enough for fast unit tests."""
    return GaConfig(population=40, generations=10, seed=7)


@pytest.fixture
def published_optima() -> dict[float, float]:
    """Return the published optimum unit cost per total depth, d_t = 6..16 mm."""
    return {
        6.0: 1.4108,
        7.0: 1.6914,
        8.0: 1.7615,
        9.0: 1.8276,
        10.0: 1.8830,
        11.0: 2.1606,
        12.0: 2.2328,
        13.0: 2.2940,
        14.0: 2.3553,
        15.0: 2.6396,
        16.0: 2.6956,
    }
