"""Unit tests for the two-level decomposition pipeline."""

import logging
from fractions import Fraction

import pytest

from incidence_lab.experiments.generators import (
    UnsupportedFixture,
    example_ex2,
    plane_grid,
    plane_unit_circles,
)
from incidence_lab.experiments.pipeline import (
    first_level_degree,
    run_experiment,
    run_pipeline,
    second_level_degree,
    supports_pipeline,
)
from incidence_lab.incidence.engine import count_bruteforce
from incidence_lab.models.schemas import ExperimentConfig


class TestDegreeFormulas:
    """Test the first- and second-level degree choices."""

    def test_first_level_in_range(self):
        """m = 10^4, n = 100, k = 2 gives 10^(4/3) / 10, about 2.15."""
        choice = first_level_degree(10_000, 100, 2)
        assert choice.value == 2
        assert choice.clamped is False
        assert "m^(2/6)" in choice.formula

    def test_first_level_empty_input_is_clamped(self):
        """No points or no surfaces gives degree 1."""
        assert first_level_degree(0, 5, 2).value == 1
        assert first_level_degree(0, 5, 2).clamped is True
        assert first_level_degree(5, 0, 2).clamped is True

    def test_first_level_clamped_to_cap(self, caplog):
        """A formula value above the cap is clamped with a warning."""
        with caplog.at_level(logging.WARNING, logger="incidence_lab.experiments.pipeline"):
            choice = first_level_degree(10**9, 1, 2)
        assert choice.value == 32
        assert choice.clamped is True
        assert "clamped to 32" in caplog.text

    def test_second_level_in_range(self):
        """m_j = 1600, n = 16, D_j = 4 gives 40 / 2 / 2 = 10."""
        choice = second_level_degree(1600, 16, 4, 2, Fraction(1, 4))
        assert choice.value == 10
        assert choice.clamped is False

    def test_second_level_lower_bound(self):
        """E_j never drops below rho * D_j."""
        choice = second_level_degree(16, 16, 20, 2, Fraction(1))
        assert choice.value == 20
        assert choice.clamped is True

    def test_second_level_empty_class(self):
        """An empty class takes the lower bound."""
        choice = second_level_degree(0, 16, 8, 2, Fraction(1, 4))
        assert choice.value == 2
        assert choice.clamped is True


class TestRunPipeline:
    """Test stage accounting of the decomposition."""

    def test_stages_add_up(self):
        """Interior, boundary, second level and residual sum to the brute-force count."""
        fixture = plane_grid(10, 3, 3)
        report = run_pipeline(fixture, degree=4, seed=1)
        expected = count_bruteforce(fixture.points, fixture.surfaces).size
        assert report.incidences == expected
        assert report.stages.total == expected
        assert report.first_degree.value == 4
        assert sum(report.cell_incidences) == report.stages.interior

    def test_partition_recorded(self):
        """The report carries the serialized partition."""
        report = run_pipeline(plane_grid(6, 3, 3), degree=2, seed=0)
        assert report.partition["version"] == 1
        assert report.partition["dimension"] == 2
        assert report.partition["degree"] <= 2

    def test_reports_reproducible(self):
        """Same fixture and seed give byte-identical reports."""
        first = run_pipeline(plane_grid(6, 3, 3), degree=3, seed=5)
        second = run_pipeline(plane_grid(6, 3, 3), degree=3, seed=5)
        assert first.model_dump_json() == second.model_dump_json()

    def test_points_on_a_hyperplane(self):
        """Points with z1 = 0 leave no cells; everything goes through the boundary stages."""
        fixture = example_ex2(count=8, seed=0)
        report = run_pipeline(fixture, degree=1, seed=0)
        assert report.partition["cells"] == []
        assert report.stages.interior == 0
        assert report.stages.total == report.incidences
        assert report.second_level

    def test_circles_rejected(self):
        """Plane circle fixtures have no pipeline."""
        fixture = plane_unit_circles(3)
        assert supports_pipeline(fixture) is False
        with pytest.raises(UnsupportedFixture):
            run_pipeline(fixture)


class TestRunExperiment:
    """Test how experiments choose between decomposition and brute force."""

    def test_counting_audit_skips_decomposition(self, grid_config):
        """An 'st' audit alone counts by brute force."""
        report = run_experiment(grid_config.model_copy(update={"audits": ["st"]}))
        assert report.partition is None
        assert report.stages.residual == report.incidences
        assert [a.name for a in report.audits] == ["st"]

    def test_no_audits_decomposes(self):
        """Without audits the decomposition runs."""
        config = ExperimentConfig(generator="plane_grid", params={"k": 6, "s": 3, "t": 3},
                                  degree=2)
        report = run_experiment(config)
        assert report.partition is not None
        assert report.audits == []

    def test_missing_partition_is_non_conclusive(self):
        """A partition audit with decomposition switched off fails and is recorded."""
        config = ExperimentConfig(generator="plane_grid", params={"k": 4, "s": 2, "t": 2},
                                  decompose=False, audits=["partition"])
        report = run_experiment(config)
        assert report.non_conclusive is True
        assert report.passed is False
        assert report.errors[0].startswith("partition:")

    def test_circle_fixture_counts_by_brute_force(self):
        """Circle fixtures skip the decomposition even when asked."""
        config = ExperimentConfig(generator="plane_unit_circles", params={"count": 3},
                                  decompose=True, audits=["crossing"])
        report = run_experiment(config)
        assert report.partition is None
        assert report.stages.residual == report.incidences
        assert report.audits[0].name == "crossing"
