"""Tests for scenario parsing, settings and the akmeter subcommands."""

import csv
import io
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from rich.console import Console

sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import get_settings
from src.algebra.generators import STANDARD_TABLE
from src.cli import commands
from src.cli.commands import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, build_parser, cmd_check, cmd_derive, main
from src.cli.scenario import load_scenario, parse_lines, scenario_from_text
from src.report.inequalities import MeasurementReport
from src.utils.errors import ScenarioError

SCENARIOS = Path(__file__).parent.parent / "scenarios"
MATCHED = SCENARIOS / "matched.txt"
TWO_PACKETS = SCENARIOS / "two_packets.txt"


def quiet_console() -> tuple[Console, io.StringIO]:
    buffer = io.StringIO()
    return Console(file=buffer, width=200), buffer


def read_rows(path: Path) -> list[list[str]]:
    with open(path, newline="") as f:
        return list(csv.reader(f))


# ===== Tests: Scenario Parsing =====

class TestScenarioParsing:
    def test_matched_file(self):
        scenario = load_scenario(MATCHED)
        assert scenario.lam == 1.0
        assert scenario.system.kind == "gaussian"
        assert scenario.system.width == pytest.approx(0.7071067811865476)
        assert scenario.lambdas == [0.5, 1.0, 2.0]
        assert scenario.backends() == ["gaussian"]

    def test_two_packet_file(self):
        scenario = load_scenario(TWO_PACKETS)
        packets = scenario.packets()
        assert [p.coefficient for p in packets] == [0.6, 0.8]
        assert [p.mean_x for p in packets] == [-8.0, 8.0]
        axes = scenario.grid.axes()
        assert [a.n for a in axes] == [128, 64, 64]
        assert all(a.length == 32.0 for a in axes)
        assert scenario.region_fraction == 0.25

    def test_comments_and_blank_lines(self):
        entries = parse_lines("# header\n\nlambda = 2  # trailing\n")
        assert entries == {"lambda": ("2", 3)}

    def test_missing_equals(self):
        with pytest.raises(ScenarioError, match="line 2: expected 'key = value'"):
            scenario_from_text("lambda = 1\nsystem.width 1\n")

    def test_duplicate_key(self):
        with pytest.raises(ScenarioError, match=r"field 'lambda' \(line 2\): duplicate key"):
            scenario_from_text("lambda = 1\nlambda = 2\n")

    def test_out_of_domain_field_names_line(self):
        with pytest.raises(ScenarioError) as info:
            scenario_from_text("system.width = 1\nlambda = -1\n")
        assert info.value.field == "lambda"
        assert info.value.line == 2
        assert "greater than 0" in str(info.value)

    def test_unknown_key(self):
        with pytest.raises(ScenarioError) as info:
            scenario_from_text("lambda = 1\nsystem.width = 1\ncolour = blue\n")
        assert info.value.field == "colour"
        assert info.value.line == 3

    def test_grid_points_must_be_power_of_two(self):
        with pytest.raises(ScenarioError, match="power of two") as info:
            scenario_from_text("lambda = 1\nsystem.width = 1\ngrid.n = 48\n")
        assert info.value.field == "grid.n"

    def test_nested_packet_field(self):
        text = "lambda = 1\nsystem.kind = superposition\nsystem.packets.0.width = -2\n"
        with pytest.raises(ScenarioError) as info:
            scenario_from_text(text)
        assert info.value.field == "system.packets.0.width"
        assert info.value.line == 3

    def test_packet_indices_without_gaps(self):
        text = "lambda = 1\nsystem.kind = superposition\nsystem.packets.0.width = 1\nsystem.packets.2.width = 1\n"
        with pytest.raises(ScenarioError, match="without gaps"):
            scenario_from_text(text)

    def test_gaussian_needs_width(self):
        with pytest.raises(ScenarioError) as info:
            scenario_from_text("lambda = 1\nsystem.mean_x = 2\n")
        assert info.value.field == "system.width"
        assert info.value.line == 2

    def test_superposition_needs_packets(self):
        with pytest.raises(ScenarioError, match="at least one packet"):
            scenario_from_text("lambda = 1\nsystem.kind = superposition\n")

    def test_defaults_fill_unset_keys(self):
        scenario = scenario_from_text(
            "lambda = 2\nsystem.width = 1\ngrid.length = 30\n",
            {"hbar": 0.5, "grid": {"n": 32, "length": 10.0}},
        )
        assert scenario.hbar == 0.5
        assert scenario.grid.n == 32
        assert scenario.grid.length == 30.0

    def test_gaussian_backend_rejects_superposition(self):
        scenario = load_scenario(TWO_PACKETS)
        with pytest.raises(ScenarioError, match="gaussian system"):
            scenario.system_block()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            load_scenario(tmp_path / "nope.txt")


class TestSettings:
    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("AKMETER_HBAR", "0.5")
        monkeypatch.setenv("AKMETER_THREADS", "3")
        settings = get_settings()
        assert settings.hbar == 0.5
        assert settings.threads == 3

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("AKMETER_GRID_POINTS", raising=False)
        settings = get_settings()
        assert settings.grid_points == 64
        assert settings.edge_margin == 6.0
        assert settings.region_fraction == 0.25


# ===== Tests: derive =====

class TestDerive:
    def test_finals_and_commutators(self):
        text = cmd_derive()
        lines = text.splitlines()
        assert "muXf = muX + x + (1/2) piP" in lines
        assert "muPf = muP + p - (1/2) piX" in lines
        assert "xf = x + piP" in lines
        assert "[eXi, ePi] = -i*hbar" in lines
        assert "[eXf, ePf] = i*hbar" in lines
        assert "[eXi, eXf] = 0" in lines
        assert "dX = eXi - eXf: holds" in lines

    def test_unbiased_annotations(self):
        lines = cmd_derive().splitlines()
        assert "eXi = muX + (1/2) piP    # unbiased" in lines
        assert "dP = -piX    # unbiased" in lines

    def test_coupling(self):
        assert "muXf = muX + 2 x + 2 piP" in cmd_derive(coupling=2.0).splitlines()

    def test_main_prints(self, capsys):
        assert main(["derive"]) == EXIT_OK
        assert "[ePf, dX] = i*hbar" in capsys.readouterr().out


# ===== Tests: check =====

class TestCheck:
    def test_passes(self):
        console, buffer = quiet_console()
        assert cmd_check(console) == EXIT_OK
        output = buffer.getvalue()
        assert "ok: polarization identity" in output
        assert "ok: backend agreement" in output
        assert "FAILED" not in output

    def test_perturbed_table_fails(self):
        console, buffer = quiet_console()
        table = STANDARD_TABLE.perturbed(2, 3, Fraction(2))
        assert cmd_check(console, table) == EXIT_ERROR
        assert "FAILED: commutation table" in buffer.getvalue()

    def test_unexpected_exception_names_the_check(self, monkeypatch):
        def broken(*args, **kwargs):
            raise np.linalg.LinAlgError("SVD did not converge")

        monkeypatch.setattr(commands, "polarization_check", broken)
        console, buffer = quiet_console()
        assert cmd_check(console) == EXIT_ERROR
        assert "FAILED: polarization identity" in buffer.getvalue()


# ===== Tests: report, sweep, superposition, sample =====

class TestCommands:
    def test_report_gaussian(self, tmp_path):
        assert main(["--out", str(tmp_path), "report", str(MATCHED)]) == EXIT_OK
        rows = read_rows(tmp_path / "inequalities_gaussian.csv")
        assert len(rows) == 12
        assert all(row[-1] == "true" for row in rows[1:])
        assert read_rows(tmp_path / "report.csv")[0] == ["quantity", "gaussian"]

    def test_report_both_backends(self, tmp_path):
        assert main(["--out", str(tmp_path), "--backend", "both", "report", str(MATCHED)]) == EXIT_OK
        header, *rows = read_rows(tmp_path / "report.csv")
        assert header == ["quantity", "gaussian", "grid", "relative_difference"]
        assert max(float(row[3]) for row in rows) < 1e-4
        assert (tmp_path / "inequalities_grid.csv").exists()

    def test_report_artifacts_byte_identical(self, tmp_path):
        for name in ("a", "b"):
            assert main(["--out", str(tmp_path / name), "report", str(MATCHED)]) == EXIT_OK
        for name in ("inequalities_gaussian.csv", "report.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_violation_exit_code(self, tmp_path, monkeypatch):
        bad = MeasurementReport(*([0.1] * 12))
        monkeypatch.setattr(commands, "_measure", lambda scenario, backend, lam=None: bad)
        assert main(["--out", str(tmp_path), "report", str(MATCHED)]) == EXIT_VIOLATION

    def test_bad_scenario_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("lambda = -1\nsystem.width = 1\n")
        assert main(["--out", str(tmp_path), "report", str(path)]) == EXIT_ERROR
        out = capsys.readouterr().out
        assert "error: field 'lambda' (line 1)" in out

    def test_sweep(self, tmp_path):
        assert main(["--out", str(tmp_path), "sweep", str(MATCHED)]) == EXIT_OK
        header, *rows = read_rows(tmp_path / "sweep.csv")
        assert header[:3] == ["lambda", "status", "dx_i"]
        assert [float(row[0]) for row in rows] == [0.5, 1.0, 2.0]
        assert all(row[1] == "ok" for row in rows)

    def test_sweep_lambda_override(self, tmp_path):
        assert main(["--out", str(tmp_path), "sweep", str(MATCHED), "--lambdas", "3,0.1"]) == EXIT_OK
        rows = read_rows(tmp_path / "sweep.csv")[1:]
        assert [float(row[0]) for row in rows] == [3.0, 0.1]

    def test_sweep_bad_lambdas(self, tmp_path, capsys):
        assert main(["--out", str(tmp_path), "sweep", str(MATCHED), "--lambdas", "1,abc"]) == EXIT_ERROR
        assert "--lambdas" in capsys.readouterr().out

    def test_superposition(self, tmp_path):
        assert main(["--out", str(tmp_path), "superposition", str(TWO_PACKETS)]) == EXIT_OK
        header, *rows = read_rows(tmp_path / "superposition.csv")
        assert header == ["packet", "weight", "region_mass"]
        masses = [float(row[2]) for row in rows]
        assert masses[0] == pytest.approx(0.36, abs=0.01)
        assert masses[1] == pytest.approx(0.64, abs=0.01)

    def test_sample_is_reproducible(self, tmp_path):
        for name in ("a", "b"):
            args = ["--out", str(tmp_path / name), "--seed", "5", "sample", str(MATCHED), "--count", "200"]
            assert main(args) == EXIT_OK
        for name in ("distribution.csv", "samples.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        assert len(read_rows(tmp_path / "a" / "samples.csv")) == 201


# ===== Tests: argument parsing =====

class TestArguments:
    def test_flags_after_subcommand(self):
        args = build_parser().parse_args(["sample", str(MATCHED), "--count", "10", "--seed", "7"])
        assert (args.command, args.count, args.seed) == ("sample", 10, 7)

    def test_flags_before_subcommand(self):
        args = build_parser().parse_args(["--seed", "7", "--backend", "both", "report", str(MATCHED)])
        assert args.seed == 7
        assert args.backend == "both"

    def test_flag_before_survives_subcommand_defaults(self):
        args = build_parser().parse_args(["--out", "x", "--verbose", "report", str(MATCHED)])
        assert args.out == Path("x")
        assert args.verbose is True
        assert args.backend is None

    def test_report_flags_after_config(self):
        args = build_parser().parse_args(["report", str(MATCHED), "--backend", "both", "--out", "x"])
        assert args.backend == "both"
        assert args.out == Path("x")

    def test_unset_flags_default_to_none(self):
        args = build_parser().parse_args(["check"])
        assert (args.out, args.backend, args.seed, args.verbose) == (None, None, None, False)

    def test_both_positions_give_identical_samples(self, tmp_path):
        before = ["--out", str(tmp_path / "a"), "--seed", "5", "sample", str(MATCHED), "--count", "50"]
        after = ["sample", str(MATCHED), "--count", "50", "--seed", "5", "--out", str(tmp_path / "b")]
        assert main(before) == EXIT_OK
        assert main(after) == EXIT_OK
        assert (tmp_path / "a" / "samples.csv").read_bytes() == (tmp_path / "b" / "samples.csv").read_bytes()

    @pytest.mark.parametrize("argv", [["report"], ["frobnicate"], ["sample", "x.txt", "--count", "many"]])
    def test_usage_errors_exit_with_input_error(self, argv):
        assert main(argv) == EXIT_ERROR

    def test_help_exits_cleanly(self):
        assert main(["--help"]) == EXIT_OK
