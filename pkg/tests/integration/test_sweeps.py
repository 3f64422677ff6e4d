"""Desk-scale sweeps; run with: pytest -m slow"""

import pytest

from incidence_lab.experiments.campaign import (
    campaign,
    cartesian_sweep,
    crossing_sweep,
    elekes_sweep,
    grid_sweep,
    unit_distance_sweep,
)

pytestmark = pytest.mark.slow


class TestScalingSweeps:
    """Ratios stay under their ceilings as fixtures grow."""

    def test_grid(self):
        summary = campaign(grid_sweep((8, 16, 32)))
        assert all(row.passed for row in summary.rows)

    def test_elekes(self):
        summary = campaign(elekes_sweep((2, 3, 4)))
        assert all(row.passed for row in summary.rows)

    def test_cartesian(self):
        summary = campaign(cartesian_sweep((8, 16)))
        assert all(row.passed for row in summary.rows)

    def test_unit_distance(self):
        summary = campaign(unit_distance_sweep((4, 8)))
        assert {row.audit for row in summary.rows} == {"unit_distance", "good_family"}


class TestCrossingSweep:
    """The crossing inequality holds on every drawing of the sweep."""

    def test_crossing(self):
        summary = campaign(crossing_sweep(count=60))
        assert len(summary.rows) == 60
        assert all(row.passed for row in summary.rows)
