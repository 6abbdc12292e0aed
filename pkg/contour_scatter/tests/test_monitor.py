"""
Workspace status tables.
"""
from rich.console import Console

from ..monitor import RunMonitor, main
from ..workspace.manager import RunWorkspace


class TestRunMonitor:

    def test_runs_table(self, temp_workspace):
        workspace = RunWorkspace(temp_workspace)
        run_dir = workspace.run_dir("spectrum", {})
        workspace.write_summary(run_dir, "ok", {"metric": "lambda0 -1.0215"})
        monitor = RunMonitor(workspace, Console(record=True, width=200))
        table = monitor.runs_table()
        assert table.row_count == 1
        monitor.show(table)
        text = monitor.console.export_text()
        assert "spectrum" in text
        assert "lambda0 -1.0215" in text

    def test_report_table_formats_floats(self, temp_workspace):
        monitor = RunMonitor(RunWorkspace(temp_workspace), Console(record=True, width=200))
        monitor.show(monitor.report_table(["k0", "ok"], [[0.123456789, True]], "bench"))
        text = monitor.console.export_text()
        assert "0.123457" in text
        assert "true" in text


class TestMain:

    def test_missing_workspace(self, temp_workspace):
        assert main(["--workspace", str(temp_workspace / "missing")]) == 1

    def test_existing_workspace_with_events(self, temp_workspace):
        workspace = RunWorkspace(temp_workspace)
        workspace.record_event("started", {"command": "angle-table"})
        assert main(["--workspace", str(temp_workspace), "--events", "5"]) == 0
