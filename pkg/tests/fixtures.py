"""Test fixtures for incidence laboratory tests."""

from fractions import Fraction

import pytest
import sympy

from incidence_lab.algebra.polynomial import SparsePoly, gens
from incidence_lab.experiments.generators import (
    complex_cartesian,
    example_ex1,
    grid_rich_lines,
    plane_grid,
)
from incidence_lab.geometry.kernel import PlaneLine, PlanePoint
from incidence_lab.models.schemas import ExperimentConfig
from incidence_lab.services.laboratory import Laboratory

# Small configurations with known counts

SMALL_GRID_POINTS = [PlanePoint(Fraction(x), Fraction(y)) for x in range(1, 4) for y in range(1, 4)]

SMALL_GRID_LINES = [
    PlaneLine.slope_intercept(0, 1),   # y = 1
    PlaneLine.slope_intercept(1, 0),   # y = x
    PlaneLine.of(1, 0, -2),            # x = 2
    PlaneLine.slope_intercept(-1, 4),  # x + y = 4
]

# y = 1 and x = 2 hold three points each, y = x three, x + y = 4 three
SMALL_GRID_INCIDENCES = 12

GRID_CONFIG = {"generator": "plane_grid", "params": {"k": 6, "s": 3, "t": 3}, "seed": 0}

CARTESIAN_CONFIG = {"generator": "complex_cartesian", "params": {"size": 4, "slopes": 4},
                    "seed": 0}


@pytest.fixture
def small_grid():
    """3 x 3 grid points with four rich lines."""
    return SMALL_GRID_POINTS, SMALL_GRID_LINES


@pytest.fixture
def grid_fixture():
    """plane_grid(6, 3, 3)."""
    return plane_grid(6, 3, 3)


@pytest.fixture
def rich_fixture():
    """grid_rich_lines(3)."""
    return grid_rich_lines(3)


@pytest.fixture
def cartesian_fixture():
    """Gaussian-integer Cartesian product with 16 complex lines."""
    return complex_cartesian(size=4, slopes=4)


@pytest.fixture
def ex1_fixture():
    """The 72-point configuration with four 2-flats."""
    return example_ex1()


@pytest.fixture
def grid_config():
    """Experiment config for a small plane grid."""
    return ExperimentConfig.model_validate(GRID_CONFIG)


@pytest.fixture
def cartesian_config():
    """Experiment config for the complex Cartesian fixture."""
    return ExperimentConfig.model_validate(CARTESIAN_CONFIG)


@pytest.fixture
def lab(tmp_path):
    """Laboratory writing into a temporary directory."""
    return Laboratory(output_dir=str(tmp_path / "results"))


def poly_of(expression: str, nvars: int) -> SparsePoly:
    """Polynomial in x1..x{nvars} from a sympy expression string."""
    return SparsePoly.from_sympy(sympy.sympify(expression, locals=dict(zip(
        (str(g) for g in gens(nvars)), gens(nvars)))), nvars)
