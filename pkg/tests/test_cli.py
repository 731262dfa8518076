"""Tests for the command-line interface."""

import json
from pathlib import Path

from click.testing import CliRunner

from speedscale import __version__
from speedscale.cli import main
from speedscale.io import REPORT_HEADER, write_schedule
from speedscale.model import ExecutionPiece, Instance, Job, Mode, Schedule


def _fields(output: str) -> dict[str, str]:
    """'key: value' lines of a command's output."""
    return dict(line.split(": ", 1) for line in output.splitlines() if ": " in line)


class TestMain:
    """Tests for the top-level group."""

    def test_version(self):
        """Test the --version flag."""
        result = CliRunner().invoke(main, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_no_command_shows_help(self):
        """Test that running without a command prints help."""
        result = CliRunner().invoke(main, [])
        assert result.exit_code == 0
        assert "solve" in result.output


class TestGenAndClassify:
    """Tests for gen and classify."""

    def test_generate_then_classify(self, tmp_path: Path):
        """Test gen output read back by classify."""
        runner = CliRunner()
        path = tmp_path / "inst.json"
        result = runner.invoke(
            main, ["gen", "--family", "clique", "--n", "5", "--seed", "3", "-o", str(path)]
        )
        assert result.exit_code == 0, result.output
        document = json.loads(path.read_text())
        assert len(document["jobs"]) == 5
        assert document["metadata"]["family"] == "Clique"

        result = runner.invoke(main, ["classify", str(path)])
        assert result.exit_code == 0
        assert _fields(result.output)["clique"] == "true"

    def test_gen_to_stdout_uses_configured_alpha(self, monkeypatch):
        """Test that gen takes alpha from the environment."""
        monkeypatch.setenv("SPEEDSCALE_SOLVER_ALPHA", "2.5")
        result = CliRunner().invoke(main, ["gen", "--family", "Agreeable", "--n", "3"])
        assert result.exit_code == 0
        assert json.loads(result.output)["alpha"] == 2.5

    def test_unknown_family(self):
        """Test an unknown family name."""
        result = CliRunner().invoke(main, ["gen", "--family", "Bogus"])
        assert result.exit_code == 2

    def test_gen_rejects_bad_sizes(self):
        """Test gen with zero jobs."""
        result = CliRunner().invoke(main, ["gen", "--family", "Clique", "--n", "0"])
        assert result.exit_code == 2

    def test_classify_malformed_file(self, tmp_path: Path):
        """Test classify on a file that is not JSON."""
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        result = CliRunner().invoke(main, ["classify", str(path)])
        assert result.exit_code == 2
        assert "ParseError" in result.output


class TestSolve:
    """Tests for solve."""

    def test_auto_picks_crd(
        self, common_release_instance: Instance, write_instance_file, tmp_path: Path
    ):
        """Test that auto selection picks crd for a common release date."""
        path = write_instance_file(common_release_instance)
        out = tmp_path / "sched.json"
        result = CliRunner().invoke(main, ["solve", str(path), "-o", str(out)])
        assert result.exit_code == 0, result.output
        fields = _fields(result.output)
        assert fields["algorithm"] == "crd"
        assert float(fields["energy"]) == 6.75
        assert abs(float(fields["ratio"]) - 1.5) < 1e-8
        assert fields["within_bound"] == "true"
        assert json.loads(out.read_text())["mode"] == "nonpreemptive"

    def test_wrong_family(self, clique_instance: Instance, write_instance_file):
        """Test exit code 2 when the algorithm does not accept the instance."""
        path = write_instance_file(clique_instance)
        result = CliRunner().invoke(main, ["solve", "--alg", "crd", str(path)])
        assert result.exit_code == 2
        assert "WrongFamily" in result.output

    def test_no_algorithm_applies(self, write_instance_file):
        """Test auto selection on an instance no algorithm accepts."""
        from speedscale.oracle import gap_instance

        path = write_instance_file(gap_instance(4))
        result = CliRunner().invoke(main, ["solve", str(path)])
        assert result.exit_code == 2

    def test_oracle(self, clique_instance: Instance, write_instance_file):
        """Test solve with the oracle, which has no bound."""
        path = write_instance_file(clique_instance)
        result = CliRunner().invoke(main, ["solve", "--alg", "oracle", str(path)])
        assert result.exit_code == 0, result.output
        assert _fields(result.output)["bound"] == "n/a"

    def test_oracle_fractional_alpha(self, write_instance_file):
        """Test the oracle on an order whose equal-speed cuts leave the windows."""
        instance = Instance(
            (Job("a", 1, 0, 10), Job("b", 1, 0, 1), Job("c", 10, 0, 12)), machines=1, alpha=1.5
        )
        path = write_instance_file(instance)
        result = CliRunner().invoke(main, ["solve", "--alg", "oracle", str(path)])
        assert result.exit_code == 0, result.output
        assert _fields(result.output)["algorithm"] == "oracle"

    def test_oracle_too_large(self, write_instance_file):
        """Test the oracle size limit."""
        from speedscale.generators import Family, GenSpec, generate

        path = write_instance_file(generate(GenSpec(Family.CLIQUE, 9)))
        result = CliRunner().invoke(main, ["solve", "--alg", "oracle", str(path)])
        assert result.exit_code == 2
        assert "TooLarge" in result.output

    def test_missing_file(self, tmp_path: Path):
        """Test solve on a path that does not exist."""
        result = CliRunner().invoke(main, ["solve", str(tmp_path / "missing.json")])
        assert result.exit_code == 2


class TestCheck:
    """Tests for check."""

    def test_feasible_schedule(
        self, clique_instance: Instance, write_instance_file, tmp_path: Path
    ):
        """Test check on a feasible schedule."""
        instance_path = write_instance_file(clique_instance)
        schedule = Schedule(
            (
                ExecutionPiece("J1", 0, 0, 2, "1/2"),
                ExecutionPiece("J2", 0, 2, 3, 1),
            )
        )
        schedule_path = tmp_path / "sched.json"
        schedule_path.write_text(write_schedule(clique_instance, schedule))
        result = CliRunner().invoke(main, ["check", str(instance_path), str(schedule_path)])
        assert result.exit_code == 0
        assert "feasible" in result.output

    def test_preempted_job_depends_on_mode(
        self, clique_instance: Instance, write_instance_file, tmp_path: Path
    ):
        """Test that --mode npr rejects a preempted job."""
        instance_path = write_instance_file(clique_instance)
        schedule = Schedule(
            (
                ExecutionPiece("J1", 0, 0, 1, "1/2"),
                ExecutionPiece("J1", 0, "3/2", 2, 1),
                ExecutionPiece("J2", 0, 2, 3, 1),
            )
        )
        schedule_path = tmp_path / "sched.json"
        schedule_path.write_text(write_schedule(clique_instance, schedule, Mode.PREEMPTIVE))
        runner = CliRunner()

        result = runner.invoke(main, ["check", str(instance_path), str(schedule_path)])
        assert result.exit_code == 0

        result = runner.invoke(
            main, ["check", "--mode", "npr", str(instance_path), str(schedule_path)]
        )
        assert result.exit_code == 1
        assert "PreemptedJob" in result.output


class TestBench:
    """Tests for bench."""

    def test_writes_report(self, tmp_path: Path):
        """Test that bench writes the CSV report."""
        out = tmp_path / "ratios.csv"
        result = CliRunner().invoke(
            main,
            [
                "bench",
                "--families",
                "CommonRelease,Clique",
                "--trials",
                "2",
                "--n",
                "4",
                "--machines",
                "1,2",
                "--alphas",
                "2",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(REPORT_HEADER)
        assert all(line.endswith(",true") for line in lines[1:])
        assert "Report written" in result.output

    def test_rejects_gap(self):
        """Test bench with the Gap family."""
        result = CliRunner().invoke(main, ["bench", "--families", "Gap"])
        assert result.exit_code == 2

    def test_rejects_bad_list(self):
        """Test bench with a malformed machine list."""
        result = CliRunner().invoke(main, ["bench", "--families", "Clique", "--machines", "one"])
        assert result.exit_code == 2


class TestGap:
    """Tests for gap."""

    def test_closed_form(self):
        """Test the closed-form gap energies."""
        result = CliRunner().invoke(main, ["gap", "--n", "5", "--alpha", "2"])
        assert result.exit_code == 0
        assert "E_pr = 9\n" in result.output
        assert "E_npr = 18.33333333 (55/3)" in result.output

    def test_verify_oracle(self):
        """Test gap --verify-oracle."""
        result = CliRunner().invoke(main, ["gap", "--n", "3", "--alpha", "2", "--verify-oracle"])
        assert result.exit_code == 0, result.output
        assert "construction feasible: true" in result.output
        assert "oracle optimum = 8.33333" in result.output

    def test_rejects_small_n(self):
        """Test gap with n below 3."""
        result = CliRunner().invoke(main, ["gap", "--n", "2"])
        assert result.exit_code == 2


class TestConfigCommands:
    """Tests for the config group."""

    def test_init_set_show(self, isolated_settings: Path):
        """Test config init, set and show together."""
        runner = CliRunner()
        result = runner.invoke(main, ["config", "init"])
        assert result.exit_code == 0
        assert (isolated_settings / "settings.toml").exists()

        result = runner.invoke(main, ["config", "set", "oracle.max_jobs", "6"])
        assert result.exit_code == 0, result.output

        result = runner.invoke(main, ["config", "show"])
        assert "max_jobs = 6" in result.output

    def test_set_unknown_key(self):
        """Test config set with an unknown key."""
        result = CliRunner().invoke(main, ["config", "set", "solver.speed", "1"])
        assert result.exit_code == 2
