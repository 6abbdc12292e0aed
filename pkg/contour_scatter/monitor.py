"""
Console reporting over a run workspace.
"""
import argparse
from pathlib import Path
from typing import Any, List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from .workspace.manager import RunWorkspace, format_value

STATUS_STYLE = {"ok": "green", "not-converged": "yellow", "failed": "red"}


class RunMonitor:
    """Rich tables for runs and command results."""

    def __init__(self, workspace: RunWorkspace, console: Optional[Console] = None):
        self.workspace = workspace
        self.console = console or Console()

    def runs_table(self) -> Table:
        """One row per run directory."""
        table = Table(title=f"Runs in {self.workspace.root}", show_header=True, header_style="bold magenta")
        table.add_column("Command", style="cyan")
        table.add_column("Run", style="yellow")
        table.add_column("Artifacts", style="white")
        table.add_column("Status")
        table.add_column("Metric", style="green")

        for run in self.workspace.list_runs():
            style = STATUS_STYLE.get(run.status, "white")
            table.add_row(
                run.command,
                run.run_id,
                ", ".join(run.artifacts) or "-",
                f"[{style}]{run.status}[/{style}]",
                run.metric or "-",
            )
        return table

    def report_table(self, header: Sequence[str], rows: Sequence[Sequence[Any]], title: str) -> Table:
        table = Table(title=title, show_header=True, header_style="bold magenta")
        for name in header:
            table.add_column(name)
        for row in rows:
            table.add_row(*[_short(v) for v in row])
        return table

    def show(self, table: Table):
        self.console.print(table)


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return format_value(value)


def main(argv: Optional[List[str]] = None):
    """Entry point of contour-scatter-status."""
    parser = argparse.ArgumentParser(description="Show the runs of a contour-scatter workspace")
    parser.add_argument(
        "--workspace",
        default="./scatter_workspace",
        help="Path to the run workspace directory"
    )
    parser.add_argument(
        "--events",
        type=int,
        default=0,
        help="Also list the N most recent workspace events"
    )
    args = parser.parse_args(argv)

    workspace_path = Path(args.workspace)
    console = Console()
    if not workspace_path.exists():
        console.print(f"[red]Workspace not found: {workspace_path}[/red]")
        return 1

    monitor = RunMonitor(RunWorkspace(workspace_path), console)
    monitor.show(monitor.runs_table())
    if args.events:
        events = monitor.workspace.recent_events(args.events)
        rows = [[e['timestamp'], e['action'], e['details'].get('file', '')] for e in events]
        monitor.show(monitor.report_table(["Time", "Action", "File"], rows, "Recent events"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
