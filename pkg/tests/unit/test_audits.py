"""Unit tests for the bound audits run inside experiments."""

from dataclasses import dataclass
from fractions import Fraction

from incidence_lab.experiments.audits import AUDITS, NEEDS_PARTITION, jsonable
from incidence_lab.experiments.pipeline import run_experiment
from incidence_lab.models.schemas import ExperimentConfig


@dataclass
class _Sample:
    value: Fraction
    pair: tuple[int, int]
    nested: dict[int, list[Fraction]]


def _outcomes(config: ExperimentConfig) -> dict:
    report = run_experiment(config)
    return {a.name: a for a in report.audits}


class TestJsonable:
    """Test conversion of audit reports to JSON-safe values."""

    def test_dataclass_with_rationals(self):
        """Fractions become exact strings; tuples become lists; keys become strings."""
        sample = _Sample(Fraction(2, 3), (1, 2), {4: [Fraction(1, 5)]})
        assert jsonable(sample) == {"value": "2/3", "pair": [1, 2], "nested": {"4": ["1/5"]}}

    def test_plain_values_untouched(self):
        """Numbers, strings and None pass through."""
        assert jsonable(3) == 3
        assert jsonable("x") == "x"
        assert jsonable(None) is None


class TestRegistry:
    """Test the audit registry."""

    def test_every_partition_audit_registered(self):
        """Audits that need a partition are all known names."""
        assert NEEDS_PARTITION <= set(AUDITS)
        assert len(AUDITS) == 12


class TestComplexLineAudits:
    """Test the audits on the complex Cartesian fixture."""

    def test_all_pass(self, cartesian_config):
        """Counting, forbidden-subgraph, family and duality audits pass on A x B."""
        config = cartesian_config.model_copy(
            update={"audits": ["st", "kst", "good_family", "duality", "admissible"]})
        outcomes = _outcomes(config)
        assert set(outcomes) == {"st", "kst", "good_family", "duality", "admissible"}
        assert all(o.passed for o in outcomes.values())
        assert outcomes["duality"].details["dual"] == outcomes["duality"].details["incidences"]
        assert outcomes["admissible"].details["dropped"] == 0

    def test_st_ratio_recorded(self, cartesian_config):
        """The counting ratio is kept as exact text in the report."""
        report = run_experiment(cartesian_config.model_copy(update={"audits": ["st"]}))
        assert "st" in report.ratios
        assert report.ratios["st"].startswith("0.") or report.ratios["st"].startswith("1.")


class TestPlaneAudits:
    """Test the partition and curve audits on a plane grid."""

    def test_partition_audits(self):
        """Partition, Harnack and Bezout audits run against a degree-4 partition."""
        config = ExperimentConfig(generator="plane_grid", params={"k": 6, "s": 3, "t": 3},
                                  degree=4, audits=["partition", "harnack", "bezout"])
        outcomes = _outcomes(config)
        assert outcomes["harnack"].passed
        assert outcomes["bezout"].passed
        assert "constant" in outcomes["partition"].details
        assert outcomes["partition"].details["ceiling"] == 4

    def test_domain_and_drawing_audits(self):
        """Domain, crossing and dyadic audits report their counts."""
        config = ExperimentConfig(generator="plane_grid", params={"k": 6, "s": 3, "t": 3},
                                  degree=2, audits=["domain", "crossing", "pach_sharir"])
        outcomes = _outcomes(config)
        assert set(outcomes) == {"domain", "crossing", "pach_sharir"}
        assert "component" in outcomes["domain"].details
        assert outcomes["crossing"].passed
        assert outcomes["crossing"].details["vertices"] == 36

    def test_wrong_fixture_kind_is_non_conclusive(self, grid_config):
        """Duality on plane lines cannot run; the report records why."""
        config = grid_config.model_copy(update={"audits": ["duality"]})
        report = run_experiment(config)
        assert report.non_conclusive is True
        assert report.audits[0].passed is False
        assert "error" in report.audits[0].details

    def test_repeated_audit_runs_once(self, grid_config):
        """Duplicate audit names collapse to one outcome."""
        config = grid_config.model_copy(update={"audits": ["st", "st"]})
        assert len(run_experiment(config).audits) == 1


class TestCircleAudits:
    """Test the audits on circle fixtures."""

    def test_plane_circles_crossing(self):
        """Unit circles through sums of unit vectors satisfy the crossing inequality."""
        config = ExperimentConfig(generator="plane_unit_circles", params={"count": 3},
                                  audits=["crossing"])
        assert _outcomes(config)["crossing"].passed

    def test_unit_distances(self):
        """Unit distances are counted over C^2 points."""
        config = ExperimentConfig(generator="unit_circles",
                                  params={"count": 4, "per_circle": 2},
                                  audits=["unit_distance"])
        details = _outcomes(config)["unit_distance"].details
        assert details["points"] > 0
        assert details["incidences"] == 2 * details["distances"]
