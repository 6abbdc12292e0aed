"""
Run workspace: run directories, artifacts, history, events and logging.
"""
import json
import logging

import pytest

from .. import __version__
from ..workspace.manager import RunWorkspace, format_value


class TestFormatting:

    def test_floats_keep_full_precision(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert float(format_value(1.0 / 3.0)) == 1.0 / 3.0
        assert format_value(-10.0) == "-10"

    def test_other_values(self):
        assert format_value(True) == "true"
        assert format_value(False) == "false"
        assert format_value(3) == "3"
        assert format_value("pi/6") == "pi/6"


class TestRunWorkspace:
    """Test artifact writing in a temporary workspace."""

    def test_layout(self, temp_workspace):
        """Test that the workspace creates its directories."""
        workspace = RunWorkspace(temp_workspace)
        for name in ("runs", "logs", "history"):
            assert (temp_workspace / name).is_dir()
        assert workspace.lock_dir.is_dir()

    def test_run_dir_is_deterministic(self, temp_workspace):
        workspace = RunWorkspace(temp_workspace)
        first = workspace.run_dir("spectrum", {"n": 50, "radius": 5.0})
        second = workspace.run_dir("spectrum", {"radius": 5.0, "n": 50})
        other = workspace.run_dir("spectrum", {"n": 51, "radius": 5.0})
        assert first == second
        assert first != other
        assert first.name.startswith("spectrum-")
        assert first.is_dir()

    def test_artifact_and_sidecar(self, temp_workspace):
        """Test CSV content and the metadata sidecar."""
        workspace = RunWorkspace(temp_workspace)
        run_dir = workspace.run_dir("angle-table", {})
        path = workspace.write_artifact(run_dir, "angles", ["label", "value", "ok"],
                                        [["pi/6", 0.5, True]], {"gamma": 0.25})
        assert path.name == "angles.csv"
        assert path.read_text(encoding="utf-8") == "label,value,ok\npi/6,0.5,true\n"

        meta = json.loads((run_dir / "angles.meta.json").read_text(encoding="utf-8"))
        assert meta["version"] == f"v{__version__}" == "v0.1.0"
        assert meta["columns"] == ["label", "value", "ok"]
        assert meta["gamma"] == 0.25

    def test_row_length_checked(self, temp_workspace):
        workspace = RunWorkspace(temp_workspace)
        run_dir = workspace.run_dir("solve", {})
        with pytest.raises(ValueError):
            workspace.write_csv(run_dir, "residuals", ["iteration", "residual_norm"], [[0]])

    def test_overwrite_keeps_history(self, temp_workspace):
        workspace = RunWorkspace(temp_workspace)
        run_dir = workspace.run_dir("solve", {})
        workspace.write_csv(run_dir, "residuals", ["iteration"], [[0]])
        workspace.write_csv(run_dir, "residuals", ["iteration"], [[1]])
        backups = list(workspace.dirs["history"].iterdir())
        assert len(backups) == 1
        assert backups[0].read_text(encoding="utf-8") == "iteration\n0\n"
        assert (run_dir / "residuals.csv").read_text(encoding="utf-8") == "iteration\n1\n"

    def test_events(self, temp_workspace):
        workspace = RunWorkspace(temp_workspace)
        workspace.record_event("started", {"command": "spectrum"})
        workspace.record_event("finished", {"command": "spectrum", "status": "ok"})
        logs = list(workspace.dirs["logs"].glob("events_*.jsonl"))
        assert len(logs) == 1
        lines = logs[0].read_text(encoding="utf-8").splitlines()
        assert [json.loads(line)["action"] for line in lines] == ["started", "finished"]

        recent = workspace.recent_events(1)
        assert len(recent) == 1
        assert recent[0]["action"] == "finished"
        assert recent[0]["details"]["status"] == "ok"

    def test_list_runs(self, temp_workspace):
        """Test run summaries, including a corrupted one."""
        workspace = RunWorkspace(temp_workspace)
        good = workspace.run_dir("mg-bench", {"n": 16})
        workspace.write_csv(good, "mg_bench", ["k0"], [[1.0]])
        workspace.write_summary(good, "ok", {"metric": "6 solves"})
        broken = workspace.run_dir("spectrum", {})
        (broken / "summary.json").write_text("{not json", encoding="utf-8")
        workspace.run_dir("status", {"x": 1})

        runs = {run.command: run for run in workspace.list_runs()}
        assert runs["mg-bench"].status == "ok"
        assert runs["mg-bench"].metric == "6 solves"
        assert runs["mg-bench"].artifacts == ["mg_bench.csv"]
        assert runs["spectrum"].status == "corrupted"
        assert runs["status"].status == "unknown"

    def test_setup_logging(self, temp_workspace):
        workspace = RunWorkspace(temp_workspace)
        package_logger = workspace.setup_logging("debug")
        try:
            assert package_logger.level == logging.DEBUG
            logging.getLogger("contour_scatter.core.multigrid").info("written to the log file")
            for handler in package_logger.handlers:
                handler.flush()
            log_file = temp_workspace / "logs" / "contour_scatter.log"
            assert "written to the log file" in log_file.read_text(encoding="utf-8")
        finally:
            for handler in list(package_logger.handlers):
                package_logger.removeHandler(handler)
                handler.close()
