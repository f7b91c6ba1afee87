"""Tests for the CLI module."""

import csv
import json

import pytest

from spps.cli import EXIT_CONFIG, EXIT_OK, EXIT_TOLERANCE, create_parser, main
from spps.evaluation.reproduce import ReproductionResult


def read_rows(path):
    with open(path) as f:
        return list(csv.reader(f))


class TestCLIArguments:
    """Test CLI argument parsing."""

    def test_command_is_required(self):
        with pytest.raises(SystemExit):
            create_parser().parse_args([])

    def test_common_options(self):
        args = create_parser().parse_args(
            ["hill", "--config", "c.yaml", "--out", "o", "--m", "500", "--N", "40", "--json"]
        )
        assert args.command == "hill"
        assert (args.m, args.N) == (500, 40)
        assert args.json is True
        assert args.verbose is False

    def test_run_takes_config_file(self):
        args = create_parser().parse_args(["run", "config/mathieu.yaml"])
        assert args.config_file == "config/mathieu.yaml"

    def test_reproduce_takes_table_id(self):
        assert create_parser().parse_args(["reproduce", "all"]).table_id == "all"

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            create_parser().parse_args(["solve"])


class TestCommands:
    """Small end-to-end runs through main()."""

    def test_zs_writes_eigenvalues(self, temp_dir, capsys):
        code = main(["zs", "--out", str(temp_dir), "--m", "2000", "--N", "120", "--json"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "success"
        assert payload["command"] == "zs"
        assert payload["result"]["eigenvalues"] == pytest.approx([0.31902252414261895], abs=1e-8)

        rows = read_rows(temp_dir / "eigenvalues.csv")
        assert rows[0] == ["n", "re_lambda", "im_lambda", "residual", "kind"]
        assert rows[1][4] == "real"
        report = json.loads((temp_dir / "run_report.json").read_text())
        assert report["stages"]["zs"]["metrics"]["eigenvalues"] == 1

    def test_run_with_layer_config(self, temp_dir):
        config = temp_dir / "layer.yaml"
        config.write_text(
            "command: layer\nprofile: linear\nthetas: [0, 30, 60]\nm: 400\nN: 40\n"
        )
        code = main(["run", str(config), "--out", str(temp_dir / "out")])
        assert code == EXIT_OK
        rows = read_rows(temp_dir / "out" / "rt_sweep.csv")
        assert [row[0] for row in rows[1:]] == ["0", "30", "60"]

    def test_hill_with_discriminant_curve(self, temp_dir):
        config = temp_dir / "hill.yaml"
        config.write_text("command: hill\npotential: mathieu\ncount: 3\ncurve: [-1, 5, 7]\n")
        code = main(["run", str(config), "--out", str(temp_dir), "--m", "1000", "--N", "80"])
        assert code == EXIT_OK
        assert len(read_rows(temp_dir / "band_edges.csv")) == 4
        curve = read_rows(temp_dir / "discriminant.csv")
        assert curve[0] == ["lambda", "D"]
        assert len(curve) == 8

    def test_text_summary(self, temp_dir, capsys):
        main(["zs", "--out", str(temp_dir), "--m", "2000", "--N", "120"])
        assert capsys.readouterr().out.startswith("zs: success")


class TestExitCodes:
    def test_missing_config_is_config_error(self, temp_dir, capsys):
        code = main(["hill", "--config", str(temp_dir / "nope.yaml"), "--json"])
        assert code == EXIT_CONFIG
        assert json.loads(capsys.readouterr().out)["status"] == "config_error"

    def test_run_without_command(self, temp_dir):
        config = temp_dir / "bare.yaml"
        config.write_text("m: 200\n")
        assert main(["run", str(config), "--out", str(temp_dir)]) == EXIT_CONFIG

    def test_invalid_override(self, temp_dir, capsys):
        code = main(["zs", "--out", str(temp_dir), "--N", "0", "--json"])
        assert code == EXIT_CONFIG
        assert "--N" in json.loads(capsys.readouterr().out)["error"]

    def test_unknown_table(self, temp_dir):
        assert main(["reproduce", "9.9", "--out", str(temp_dir)]) == EXIT_CONFIG

    def test_reproduce_failure(self, temp_dir, mocker, capsys):
        failing = ReproductionResult(table_id="4.1", title="Mathieu")
        mocker.patch("spps.cli.reproduce", return_value=failing)
        code = main(["reproduce", "4.1", "--out", str(temp_dir), "--json"])
        assert code == EXIT_TOLERANCE
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "tolerance_failure"
        report = json.loads((temp_dir / "run_report.json").read_text())
        assert report["failures"][0]["code"] == "tolerance_failure"
