"""
Run workspace for experiment artifacts.

Every command writes into a deterministic run directory. Writes are
serialized with file locks, overwritten files are kept in history/, and
workspace events go to a daily JSONL log.
"""
import csv
import hashlib
import io
import json
import logging
import shutil
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import filelock
from rich.console import Console
from rich.logging import RichHandler

from .. import __version__

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
SUMMARY_FILE = "summary.json"


def format_value(value: Any) -> str:
    """CSV cell text; floats keep all 17 significant digits."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


@dataclass
class RunSummary:
    """What list_runs reports about one run directory."""
    command: str
    run_id: str
    path: Path
    artifacts: List[str] = field(default_factory=list)
    status: str = "unknown"
    metric: Optional[str] = None


class RunWorkspace:
    """
    Artifact store rooted at one directory.

    Layout:
    - runs/: one directory per command and config
    - logs/: event log and solver log file
    - history/: previous versions of overwritten artifacts
    - .locks/: lock files guarding writes
    """

    def __init__(self, root: Path):
        """
        Initialize the workspace.

        Args:
            root: Workspace directory, created when missing
        """
        self.root = Path(root)
        self.root.mkdir(exist_ok=True, parents=True)

        self.dirs = {
            'runs': self.root / 'runs',
            'logs': self.root / 'logs',
            'history': self.root / 'history',
        }
        for dir_path in self.dirs.values():
            dir_path.mkdir(exist_ok=True)

        self.lock_dir = self.root / '.locks'
        self.lock_dir.mkdir(exist_ok=True)

    def run_dir(self, command: str, config_echo: Dict[str, Any]) -> Path:
        """Directory runs/<command>-<hash of the config echo>, created on demand."""
        digest = hashlib.sha1(json.dumps(config_echo, sort_keys=True).encode()).hexdigest()[:10]
        path = self.dirs['runs'] / f"{command}-{digest}"
        path.mkdir(exist_ok=True, parents=True)
        return path

    def _write_text(self, path: Path, content: str) -> Path:
        lock = filelock.FileLock(self.lock_dir / f"{path.parent.name}.{path.name}.lock", timeout=5)
        with lock:
            if path.exists():
                stamp = datetime.now().strftime('%Y%m%dT%H%M%S%f')
                backup_path = self.dirs['history'] / f"{path.parent.name}.{path.name}.{stamp}"
                shutil.copy2(path, backup_path)
            path.parent.mkdir(exist_ok=True, parents=True)
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write(content)

        self.record_event("wrote", {"file": str(path.relative_to(self.root)), "size": len(content)})
        return path

    def write_csv(self, run_dir: Path, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
        """
        Write a CSV artifact.

        Args:
            run_dir: Directory from run_dir()
            name: File name; ".csv" is appended when missing
            header: Column names
            rows: Row values

        Returns:
            Path of the written file
        """
        if not name.endswith('.csv'):
            name = f"{name}.csv"
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"Row has {len(row)} values, header has {len(header)}")
            writer.writerow([format_value(v) for v in row])
        return self._write_text(Path(run_dir) / name, buffer.getvalue())

    def write_json(self, run_dir: Path, name: str, payload: Dict[str, Any]) -> Path:
        if not name.endswith('.json'):
            name = f"{name}.json"
        content = json.dumps(payload, indent=2, sort_keys=True, default=str) + '\n'
        return self._write_text(Path(run_dir) / name, content)

    def write_artifact(
        self,
        run_dir: Path,
        name: str,
        header: Sequence[str],
        rows: Sequence[Sequence[Any]],
        metadata: Dict[str, Any],
    ) -> Path:
        """CSV artifact plus a <name>.meta.json sidecar carrying config echo and version."""
        path = self.write_csv(run_dir, name, header, rows)
        sidecar = {"version": f"v{__version__}", "columns": list(header), **metadata}
        self.write_json(run_dir, f"{path.stem}.meta.json", sidecar)
        return path

    def write_summary(self, run_dir: Path, status: str, details: Dict[str, Any]) -> Path:
        return self.write_json(run_dir, SUMMARY_FILE, {"status": status, **details})

    def record_event(self, action: str, details: Dict[str, Any]):
        """Append one event to logs/events_<date>.jsonl."""
        event = {
            'timestamp': datetime.now().isoformat(),
            'action': action,
            'details': details,
        }
        log_file = self.dirs['logs'] / f"events_{datetime.now().strftime('%Y%m%d')}.jsonl"
        with open(log_file, 'a', encoding='utf-8') as f:
            f.write(json.dumps(event, default=str) + '\n')

    def recent_events(self, limit: int = 10) -> List[Dict[str, Any]]:
        events: List[Dict[str, Any]] = []
        for log_file in sorted(self.dirs['logs'].glob("events_*.jsonl"), reverse=True):
            with open(log_file, 'r', encoding='utf-8') as f:
                lines = f.readlines()
            for line in reversed(lines):
                events.append(json.loads(line))
                if len(events) >= limit:
                    return events
        return events

    def list_runs(self) -> List[RunSummary]:
        """Summaries of all run directories, sorted by name."""
        runs = []
        for path in sorted(p for p in self.dirs['runs'].iterdir() if p.is_dir()):
            command, _, run_id = path.name.rpartition('-')
            summary = RunSummary(command=command or path.name, run_id=run_id, path=path)
            summary.artifacts = sorted(p.name for p in path.glob('*.csv'))
            summary_file = path / SUMMARY_FILE
            if summary_file.exists():
                try:
                    data = json.loads(summary_file.read_text(encoding='utf-8'))
                    summary.status = data.get('status', 'unknown')
                    summary.metric = data.get('metric')
                except json.JSONDecodeError as e:
                    logger.error(f"Corrupted run summary {summary_file}: {e}")
                    summary.status = 'corrupted'
            runs.append(summary)
        return runs

    def setup_logging(self, level: str = "INFO") -> logging.Logger:
        """Route package logs to logs/contour_scatter.log and to a rich console handler."""
        package_logger = logging.getLogger("contour_scatter")
        package_logger.setLevel(level.upper())
        for handler in list(package_logger.handlers):
            package_logger.removeHandler(handler)
            handler.close()

        file_handler = logging.FileHandler(self.dirs['logs'] / 'contour_scatter.log')
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        package_logger.addHandler(file_handler)
        package_logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False, markup=False))
        return package_logger
