"""Integration tests for the incidence-lab command line."""

import json

import pytest

from incidence_lab.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, build_parser, main

GRID = ["plane_grid", "-p", "k=3", "-p", "s=2", "-p", "t=2"]


def _json_out(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


class TestParser:
    """Test argument parsing."""

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_repeated_audits(self):
        args = build_parser().parse_args(["audit", "plane_grid", "-a", "st", "-a", "kst"])
        assert args.audits == ["st", "kst"]


class TestCommands:
    """Test each command end to end."""

    def test_gen(self, capsys):
        assert main(["gen", *GRID]) == EXIT_OK
        data = _json_out(capsys)
        assert data["name"] == "plane_grid"
        assert len(data["points"]) == 9
        assert data["surfaces"][0]["kind"] == "PlaneLine"

    def test_count_json(self, capsys):
        assert main(["count", *GRID]) == EXIT_OK
        data = _json_out(capsys)
        assert (data["m"], data["n"]) == (9, 4)
        assert data["incidences"] > 0

    def test_count_csv(self, capsys):
        assert main(["count", *GRID, "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "point,surface,smooth,transversal"

    def test_partition(self, capsys):
        assert main(["partition", "plane_grid", "-p", "k=6", "-p", "s=3", "-p", "t=3",
                     "--degree", "2"]) == EXIT_OK
        data = _json_out(capsys)
        assert data["version"] == 1
        assert data["degree"] <= 2

    def test_pipeline(self, capsys):
        assert main(["pipeline", *GRID, "--degree", "2", "--seed", "3"]) == EXIT_OK
        data = _json_out(capsys)
        stages = data["stages"]
        assert sum(stages.values()) == data["incidences"]
        assert data["config"]["seed"] == 3

    def test_audit_pass(self, capsys):
        assert main(["audit", *GRID, "-a", "st", "-a", "crossing"]) == EXIT_OK
        data = _json_out(capsys)
        assert [a["name"] for a in data["audits"]] == ["st", "crossing"]

    def test_audit_that_cannot_run_fails(self, capsys):
        """Duality on a plane fixture is non-conclusive, which is exit status 1."""
        assert main(["audit", *GRID, "-a", "duality"]) == EXIT_FAILED
        assert _json_out(capsys)["non_conclusive"] is True

    def test_report_file(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        assert main(["audit", *GRID, "-a", "st", "--output", str(target)]) == EXIT_OK
        assert json.loads(target.read_text())["config"]["output"] == str(target)

    def test_box_option(self, capsys):
        """--box is passed to generators that take a box."""
        assert main(["gen", "random_uniform", "-p", "m=5", "-p", "n=3", "--box", "2"]) == EXIT_OK
        points = _json_out(capsys)["points"]
        assert all(abs(int(v)) <= 2 for p in points for v in p)

    def test_plot(self, tmp_path):
        target = tmp_path / "grid.svg"
        assert main(["plot", *GRID, "--svg", str(target)]) == EXIT_OK
        assert "<svg" in target.read_text()

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"generator": "elekes_grid", "params": {"k": 2},
                                    "audits": ["st"]}))
        assert main(["audit", "--config", str(path)]) == EXIT_OK
        assert _json_out(capsys)["fixture"]["m"] == 16


class TestErrors:
    """Test exit status 2 on laboratory errors."""

    def test_missing_generator(self):
        assert main(["count"]) == EXIT_ERROR

    def test_bad_param(self):
        assert main(["count", "plane_grid", "-p", "k"]) == EXIT_ERROR

    def test_unknown_generator(self):
        assert main(["count", "hexagon"]) == EXIT_ERROR

    def test_bad_generator_params(self):
        assert main(["count", "plane_grid", "-p", "size=3"]) == EXIT_ERROR

    def test_plot_without_path(self):
        assert main(["plot", *GRID]) == EXIT_ERROR

    def test_campaign_without_input(self):
        assert main(["campaign"]) == EXIT_ERROR


class TestCampaignCommand:
    """Test campaigns from the command line."""

    def test_configs_file(self, tmp_path, capsys):
        configs = [{"generator": "plane_grid", "params": {"k": 4, "s": 2, "t": 2},
                    "audits": ["st"]},
                   {"generator": "elekes_grid", "params": {"k": 2}, "audits": ["st"]}]
        path = tmp_path / "configs.json"
        path.write_text(json.dumps(configs))
        out = tmp_path / "out"
        assert main(["campaign", str(path), "--output-dir", str(out)]) == EXIT_OK
        data = _json_out(capsys)
        assert len(data["rows"]) == 2
        assert "reports" not in data
        assert (out / "campaign.json").exists()
        assert (out / "campaign.csv").exists()

    def test_csv_format(self, tmp_path, capsys):
        path = tmp_path / "configs.json"
        path.write_text(json.dumps([{"generator": "grid_rich_lines", "params": {"k": 3},
                                     "audits": ["crossing"]}]))
        out = tmp_path / "out"
        assert main(["campaign", str(path), "--output-dir", str(out),
                     "--format", "csv"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("generator,size,m,n")
        assert not (out / "campaign.json").exists()
