"""Unit tests for settings and experiment config validation."""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from incidence_lab.config import Settings
from incidence_lab.models.schemas import ExperimentConfig, Report, StageCounts
from incidence_lab.services.laboratory import InvalidConfig, load_configs, parse_config


class TestSettings:
    """Test environment-driven settings."""

    def test_defaults(self):
        settings = Settings(_env_file=None)
        assert settings.seed == 0
        assert settings.degree_cap == 32
        assert settings.rho_fraction == Fraction(1, 4)
        assert settings.crossing_constants == [1, 2, 4]

    def test_environment_override(self, monkeypatch):
        """INCLAB_-prefixed variables override defaults."""
        monkeypatch.setenv("INCLAB_DEGREE_CAP", "12")
        monkeypatch.setenv("INCLAB_RHO", "1/2")
        settings = Settings(_env_file=None)
        assert settings.degree_cap == 12
        assert settings.rho_fraction == Fraction(1, 2)


class TestExperimentConfig:
    """Test experiment config parsing."""

    def test_minimal(self):
        config = ExperimentConfig(generator="plane_grid")
        assert config.params == {}
        assert config.audits == []
        assert config.decompose is None
        assert config.rho == "1/4"

    def test_unknown_field_rejected(self):
        """Configs are closed documents."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"generator": "plane_grid", "size": 4})

    def test_unknown_generator_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(generator="hexagon")

    def test_unknown_audit_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(generator="plane_grid", audits=["szemeredi"])

    def test_seed_range(self):
        """Seeds are 64-bit unsigned."""
        assert ExperimentConfig(generator="plane_grid", seed=2**64 - 1).seed == 2**64 - 1
        with pytest.raises(ValidationError):
            ExperimentConfig(generator="plane_grid", seed=-1)

    def test_parse_config_wraps_errors(self):
        with pytest.raises(InvalidConfig, match="Invalid experiment config"):
            parse_config({"generator": "plane_grid", "degree": 0})


class TestLoadConfigs:
    """Test reading config files."""

    def test_single_object(self, tmp_path):
        path = tmp_path / "one.json"
        path.write_text('{"generator": "elekes_grid", "params": {"k": 2}}')
        configs = load_configs(path)
        assert len(configs) == 1
        assert configs[0].params == {"k": 2}

    def test_list(self, tmp_path):
        path = tmp_path / "many.json"
        path.write_text('[{"generator": "plane_grid"}, {"generator": "example_ex1"}]')
        assert [c.generator for c in load_configs(path)] == ["plane_grid", "example_ex1"]

    def test_unreadable(self, tmp_path):
        with pytest.raises(InvalidConfig, match="Cannot read"):
            load_configs(tmp_path / "missing.json")


class TestReport:
    """Test report models."""

    def test_stage_total(self):
        assert StageCounts(interior=3, boundary=1, second_level=2, residual=4).total == 10

    def test_passed_requires_conclusive(self, grid_config):
        """A report with no audits passes unless marked non-conclusive."""
        report = Report(config=grid_config,
                        fixture={"name": "plane_grid", "dimension": 2, "m": 36, "n": 9,
                                 "k": 2, "c0": 2},
                        incidences=0, stages=StageCounts())
        assert report.passed is True
        report.non_conclusive = True
        assert report.passed is False
