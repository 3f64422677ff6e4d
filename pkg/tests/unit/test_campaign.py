"""Unit tests for campaigns, sweeps and their output tables."""

import json

from incidence_lab.experiments.campaign import (
    SWEEPS,
    campaign,
    cartesian_sweep,
    crossing_sweep,
    grid_sweep,
    rows_csv,
    write_report,
)
from incidence_lab.experiments.pipeline import run_experiment
from incidence_lab.models.schemas import CampaignRow, ExperimentConfig, Report


def _small_configs() -> list[ExperimentConfig]:
    return [
        ExperimentConfig(generator="plane_grid", params={"k": 4, "s": 2, "t": 2},
                         audits=["st", "crossing"]),
        ExperimentConfig(generator="grid_rich_lines", params={"k": 3}, audits=["st"]),
    ]


class TestCampaign:
    """Test running several configs into one table."""

    def test_empty(self):
        """No configs gives an empty summary."""
        summary = campaign([])
        assert summary.rows == []
        assert summary.pass_rate is None

    def test_rows_per_audit(self):
        """One row per audit, in config order."""
        summary = campaign(_small_configs())
        assert [(r.generator, r.audit) for r in summary.rows] == [
            ("plane_grid", "st"), ("plane_grid", "crossing"), ("grid_rich_lines", "st"),
        ]
        assert summary.rows[0].size == 4
        assert summary.rows[0].ratio is not None
        assert summary.rows[0].ratio_text is not None
        assert summary.pass_rate == 1.0

    def test_config_without_audits(self):
        """A run with no audits still contributes one row."""
        config = ExperimentConfig(generator="plane_grid", params={"k": 4, "s": 2, "t": 2},
                                  degree=1)
        summary = campaign([config])
        assert len(summary.rows) == 1
        assert summary.rows[0].audit == "none"

    def test_writes_outputs(self, tmp_path):
        """JSON and CSV summaries land in the output directory."""
        summary = campaign(_small_configs(), tmp_path)
        assert sorted(summary.outputs) == sorted(
            [str(tmp_path / "campaign.json"), str(tmp_path / "campaign.csv")])
        data = json.loads((tmp_path / "campaign.json").read_text())
        assert len(data["rows"]) == 3
        assert "outputs" not in data
        lines = (tmp_path / "campaign.csv").read_text().splitlines()
        assert lines[0].startswith("generator,size,m,n,incidences,audit")
        assert len(lines) == 4

    def test_csv_only(self, tmp_path):
        """Formats restrict what is written."""
        summary = campaign(_small_configs()[:1], tmp_path, formats=("csv",))
        assert summary.outputs == [str(tmp_path / "campaign.csv")]
        assert not (tmp_path / "campaign.json").exists()

    def test_per_config_report(self, tmp_path):
        """A config's output path receives its report."""
        target = tmp_path / "nested" / "grid.json"
        config = _small_configs()[0].model_copy(update={"output": str(target)})
        summary = campaign([config])
        assert str(target) in summary.outputs
        report = Report.model_validate_json(target.read_text())
        assert report.config.generator == "plane_grid"

    def test_deterministic(self, tmp_path):
        """Two runs write identical summaries."""
        campaign(_small_configs(), tmp_path / "a")
        campaign(_small_configs(), tmp_path / "b")
        assert ((tmp_path / "a" / "campaign.json").read_text()
                == (tmp_path / "b" / "campaign.json").read_text())


class TestOutputs:
    """Test table and report serialization."""

    def test_rows_csv_header_only(self):
        """An empty table is just the header."""
        assert rows_csv([]) == ",".join(CampaignRow.model_fields) + "\n"

    def test_rows_csv_values(self):
        row = CampaignRow(generator="plane_grid", size=4, m=16, n=4, incidences=12,
                          audit="st", ratio=0.5, ratio_text="0.5", passed=True)
        assert rows_csv([row]).splitlines()[1] == "plane_grid,4,16,4,12,st,0.5,0.5,True"

    def test_write_report(self, tmp_path, grid_config):
        """Reports are written as indented JSON ending in a newline."""
        report = run_experiment(grid_config.model_copy(update={"audits": ["st"]}))
        path = tmp_path / "out" / "report.json"
        write_report(report, path)
        text = path.read_text()
        assert text.endswith("}\n")
        assert Report.model_validate_json(text).incidences == report.incidences


class TestSweeps:
    """Test the named sweep builders."""

    def test_registered(self):
        assert set(SWEEPS) == {"grid", "elekes", "cartesian", "unit_distance", "crossing"}

    def test_grid_sweep(self):
        """plane_grid(k, k, k) for each size."""
        configs = grid_sweep((2, 3), seed=7)
        assert [c.params for c in configs] == [{"k": 2, "s": 2, "t": 2}, {"k": 3, "s": 3, "t": 3}]
        assert all(c.seed == 7 and c.audits == ["st"] for c in configs)

    def test_cartesian_sweep(self):
        """As many slopes as the size of A."""
        config = cartesian_sweep((5,))[0]
        assert config.params == {"size": 5, "slopes": 5}
        assert config.audits == ["st", "kst"]

    def test_crossing_sweep_cycles_generators(self):
        """Drawings rotate through three generators with distinct seeds."""
        configs = crossing_sweep(count=6, seed=10)
        assert [c.generator for c in configs] == [
            "random_uniform", "grid_rich_lines", "plane_unit_circles",
        ] * 2
        assert [c.seed for c in configs] == list(range(10, 16))
