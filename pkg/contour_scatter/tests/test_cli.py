"""
End-to-end runs of the contour-scatter command line.
"""
import csv
import json

import pytest

from ..cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, build_parser, main


def run(workspace, *args):
    return main(["--workspace", str(workspace), *args])


def only_run_dir(workspace, command):
    dirs = [p for p in (workspace / "runs").iterdir() if p.name.startswith(f"{command}-")]
    assert len(dirs) == 1
    return dirs[0]


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


def summary(run_dir):
    return json.loads((run_dir / "summary.json").read_text(encoding="utf-8"))


class TestParser:

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["transmogrify"])
        assert exc_info.value.code == 2

    def test_no_command_prints_help(self, temp_workspace, capsys):
        assert run(temp_workspace) == EXIT_USAGE
        assert "contour-scatter" in capsys.readouterr().out


class TestCommands:
    """Test sub-commands against a temporary workspace."""

    def test_angle_table(self, temp_workspace):
        """Test that the angle table is written and reproducible."""
        assert run(temp_workspace, "angle-table") == EXIT_OK
        run_dir = only_run_dir(temp_workspace, "angle-table")
        first = (run_dir / "angle_table.csv").read_bytes()
        rows = read_rows(run_dir / "angle_table.csv")
        assert rows[0] == ["theta", "theta_rad", "theta_deg", "gamma_rad", "gamma_deg"]
        assert len(rows) == 7
        assert rows[3][0] == "pi/6"
        assert summary(run_dir)["status"] == "ok"

        assert run(temp_workspace, "angle-table") == EXIT_OK
        assert (run_dir / "angle_table.csv").read_bytes() == first
        assert only_run_dir(temp_workspace, "angle-table") == run_dir

    def test_helmholtz_solve(self, temp_workspace):
        assert run(temp_workspace, "helmholtz", "solve", "--method", "direct", "--n", "16") == EXIT_OK
        run_dir = only_run_dir(temp_workspace, "helmholtz-solve")
        rows = read_rows(run_dir / "residuals.csv")
        assert rows[0] == ["iteration", "residual_norm"]
        assert rows[1][0] == "0"
        meta = json.loads((run_dir / "residuals.meta.json").read_text(encoding="utf-8"))
        assert meta["config"]["grid"]["n"] == 16
        assert meta["version"] == "v0.1.0"
        assert summary(run_dir)["status"] == "ok"

    def test_unconverged_solve_fails(self, temp_workspace, capsys):
        code = run(temp_workspace, "helmholtz", "solve", "--n", "16", "--tol", "1e-12", "--max-iters", "1")
        assert code == EXIT_NUMERICAL
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["error"] == "ConvergenceFailure"
        assert report["command"] == "helmholtz-solve"
        run_dir = only_run_dir(temp_workspace, "helmholtz-solve")
        assert (run_dir / "residuals.csv").exists()
        assert summary(run_dir)["status"] == "not-converged"

    def test_unconverged_farfield_fails(self, temp_workspace, capsys):
        code = run(temp_workspace, "farfield", "--n", "32", "--tol", "1e-12", "--max-iters", "1")
        assert code == EXIT_NUMERICAL
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["error"] == "ConvergenceFailure"
        assert summary(only_run_dir(temp_workspace, "farfield"))["status"] == "not-converged"

    def test_unconverged_bench_fails(self, temp_workspace, capsys):
        config = temp_workspace / "experiment.json"
        config.write_text(json.dumps({"solver": {"tol": 1e-12, "max_iters": 1}}), encoding="utf-8")
        code = run(temp_workspace, "--config", str(config), "mg-bench", "--dim", "2", "--pairs", "0.25:16")
        assert code == EXIT_NUMERICAL
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["command"] == "mg-bench"
        rows = read_rows(only_run_dir(temp_workspace, "mg-bench") / "mg_bench.csv")
        assert rows[1][-1] == "false"

    def test_ionization_scan_columns(self, temp_workspace):
        args = ["ionization-scan", "--emin", "0.5", "--emax", "0.5", "--estep", "1",
                "--paths", "complex", "--n-complex", "32", "--n-alpha", "8"]
        assert run(temp_workspace, *args) == EXIT_OK
        run_dir = only_run_dir(temp_workspace, "ionization-scan")
        rows = read_rows(run_dir / "cross_sections.csv")
        assert rows[0] == ["energy", "path", "open_channels", "single_s_abs2", "sigma_tot", "sigma_tot_reduced",
                           "converged", "avg_factor", "iterations", "status"]
        assert len(rows) == 2
        assert rows[1][6] == "true"
        assert rows[1][8] == "1"
        assert rows[1][9] == "ok"
        meta = json.loads((run_dir / "cross_sections.meta.json").read_text(encoding="utf-8"))
        assert meta["conventions"]["sigma_tot_reduced"] == "sigma_tot / (4 pi^2)"

    def test_direct_solve_too_large(self, temp_workspace, capsys):
        code = run(temp_workspace, "helmholtz", "solve", "--method", "direct", "--n", "600")
        assert code == EXIT_NUMERICAL
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["error"] == "ProblemTooLargeError"
        assert report["command"] == "helmholtz-solve"
        run_dir = only_run_dir(temp_workspace, "helmholtz-solve")
        assert summary(run_dir)["status"] == "failed"

    def test_rate_scan_from_config(self, temp_workspace):
        """Test a per-command config section driving mg-rate-scan."""
        config = temp_workspace / "experiment.json"
        config.write_text(json.dumps({
            "commands": {"mg-rate-scan": {"n": 16, "emin": -10, "emax": -10, "estep": 1}},
        }), encoding="utf-8")
        assert run(temp_workspace, "--config", str(config), "mg-rate-scan") == EXIT_OK
        run_dir = only_run_dir(temp_workspace, "mg-rate-scan")
        rows = read_rows(run_dir / "mg_rate_scan.csv")
        assert rows[0] == ["energy", "avg_factor", "cycles", "converged", "status"]
        assert len(rows) == 2
        assert rows[1][0] == "-10"
        assert rows[1][3] == "true"
        assert rows[1][4] == "convergent"

    def test_missing_config_file(self, temp_workspace, capsys):
        code = run(temp_workspace, "--config", str(temp_workspace / "missing.json"), "angle-table")
        assert code == EXIT_USAGE
        report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert report["error"] == "ConfigurationError"

    def test_spectrum(self, temp_workspace):
        assert run(temp_workspace, "spectrum", "--radius", "5", "--n", "50") == EXIT_OK
        run_dir = only_run_dir(temp_workspace, "spectrum")
        rows = read_rows(run_dir / "spectrum.csv")
        assert rows[0] == ["re_lambda", "im_lambda", "tag"]
        tags = {row[2] for row in rows[1:]}
        assert tags == {"real", "rotated", "kron2d"}
        assert sum(row[2] == "real" for row in rows[1:]) == 49
        meta = json.loads((run_dir / "spectrum.meta.json").read_text(encoding="utf-8"))
        assert meta["radius"] == 5.0
        assert meta["landmarks"]["bound_count"] >= 1

    def test_spectrum_rerun_is_identical(self, temp_workspace):
        args = ["spectrum", "--radius", "5", "--n", "50"]
        assert run(temp_workspace, *args) == EXIT_OK
        run_dir = only_run_dir(temp_workspace, "spectrum")
        first = {name: (run_dir / name).read_bytes() for name in ("spectrum.csv", "spectrum.meta.json")}
        assert run(temp_workspace, *args) == EXIT_OK
        assert only_run_dir(temp_workspace, "spectrum") == run_dir
        assert {name: (run_dir / name).read_bytes() for name in first} == first

    def test_status(self, temp_workspace):
        assert run(temp_workspace, "angle-table") == EXIT_OK
        assert run(temp_workspace, "status") == EXIT_OK
        assert not any(p.name.startswith("status-") for p in (temp_workspace / "runs").iterdir())
        events = (temp_workspace / "logs").glob("events_*.jsonl")
        actions = [json.loads(line)["action"] for f in events for line in f.read_text(encoding="utf-8").splitlines()]
        assert "finished" in actions
