"""
Command-line interface for contour-scatter experiments.

Every sub-command resolves its configuration (defaults, then the config
file, then its per-command section, then flags), runs, and writes CSV
artifacts with metadata sidecars into a deterministic run directory.
"""
import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core.config import ExperimentConfig, ProblemConfig, load_config, parse_angle
from .core.contour_grid import ContourKind, build_contour, theta_to_gamma
from .core.errors import ConfigurationError, ContourScatterError, NumericalError
from .core.model_problems import SchrodingerProblem, problem_from_config
from .core.multigrid import fmg, solve_vcycles, specs_from_config
from .core.reference_solver import solve_direct, solve_ecs_krylov
from .monitor import RunMonitor
from .scattering import farfield, quantum, spectra
from .workspace.manager import RunWorkspace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_THETA = math.pi / 6
ANGLE_TABLE = [("pi/8", math.pi / 8), ("pi/7", math.pi / 7), ("pi/6", math.pi / 6),
               ("pi/5", math.pi / 5), ("pi/4", math.pi / 4), ("pi/3", math.pi / 3)]
BENCH_PAIRS = "0.25:16,0.25:32,0.5:32,1:32,1:64,2:64"
RATE_SCAN_GAMMA = {2: theta_to_gamma(math.pi / 7), 3: math.pi / 12}
RATE_SCAN_INTERVALS = {2: 256, 3: 64}
RATE_SCAN_CYCLES = {2: 4, 3: 3}
# Commands whose result is unusable without convergence; scans report it per row
SOLVE_COMMANDS = ("helmholtz-solve", "farfield", "mg-bench")


class CommandContext:
    """Resolved configuration plus the workspace a command writes into."""

    def __init__(self, args: argparse.Namespace, config: ExperimentConfig, workspace: RunWorkspace):
        self.args = args
        self.config = config
        self.workspace = workspace
        self.section = {k: v for k, v in config.command_section(args.command_name).items() if "." not in k}
        self.monitor = RunMonitor(workspace)
        self._run_dir: Optional[Path] = None

    def option(self, name: str, default: Any = None) -> Any:
        """Flag value, else the per-command config entry, else the default."""
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        return self.section.get(name, default)

    @property
    def run_dir(self) -> Path:
        if self._run_dir is None:
            echo = {"command": self.args.command_name, "config": self.config.echo(), "options": self.options()}
            self._run_dir = self.workspace.run_dir(self.args.command_name, echo)
        return self._run_dir

    def options(self) -> Dict[str, Any]:
        ignored = {"func", "command", "command_name", "workspace", "config", "log_level", "threads", "helmholtz_command"}
        return {k: v for k, v in sorted(vars(self.args).items()) if k not in ignored and v is not None}

    def metadata(self, **extra) -> Dict[str, Any]:
        return {"command": self.args.command_name, "config": self.config.echo(), "options": self.options(), **extra}

    def artifact(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]], **extra) -> Path:
        return self.workspace.write_artifact(self.run_dir, name, header, rows, self.metadata(**extra))

    def show(self, header: Sequence[str], rows: Sequence[Sequence[Any]], title: str):
        self.monitor.show(self.monitor.report_table(header, rows, title))


def _energies(emin: float, emax: float, estep: float) -> List[float]:
    if estep <= 0.0 or emax < emin:
        raise ConfigurationError(f"Need emin <= emax and estep > 0, got {emin}, {emax}, {estep}")
    count = int(math.floor((emax - emin) / estep + 1e-9)) + 1
    return [round(emin + i * estep, 12) for i in range(count)]


def _rotation(ctx: CommandContext, default_theta: float = DEFAULT_THETA) -> float:
    grid = ctx.config.grid
    if grid.gamma is None and grid.theta is None:
        return theta_to_gamma(default_theta)
    return grid.rotation_angle()


# ----------------------------------------------------------------- commands

def solve_command(ctx: CommandContext) -> Dict[str, Any]:
    """Solve one configured problem and write its residual history."""
    config = ctx.config
    problem = problem_from_config(config.problem)
    solver = config.solver
    n = config.grid.n
    cycle, smoother = specs_from_config(solver)

    if solver.method == "krylov":
        theta = config.grid.theta if config.grid.theta is not None else math.pi / 4
        grid = problem.ecs_grid(n, theta, config.grid.n_ecs)
        u, report = solve_ecs_krylov(problem, grid, solver.tol, max_iters=solver.max_iters, cycle=cycle, smoother=smoother)
    else:
        gamma = _rotation(ctx)
        grid = problem.rotated_grid(n, gamma, multigrid=solver.method == "multigrid")
        if solver.method == "direct":
            u, report = solve_direct(problem, grid)
        elif isinstance(problem, SchrodingerProblem):
            u, report = quantum.solve_schrodinger(problem, grid, solver.tol, solver.max_iters, cycle, smoother)
        elif solver.cycles_per_level is not None:
            u, report = fmg(problem, grid, solver.tol, solver.max_iters, cycle, smoother)
        else:
            u, report = solve_vcycles(problem, grid, solver.tol, solver.max_iters, cycle, smoother)

    stats = {
        "max_abs_u": float(np.max(np.abs(u))) if u.size else 0.0,
        "l2_u": float(np.linalg.norm(u)),
        "interior_shape": list(grid.interior_shape),
    }
    ctx.artifact("residuals", ["iteration", "residual_norm"], report.residual_rows(),
                 report=report.to_dict(), grid=grid.describe(), solution=stats)
    ctx.show(["method", "iterations", "avg_factor", "WU", "rel. residual", "converged"],
             [[report.method, report.iterations, report.avg_factor, report.work_units,
               report.relative_residual, report.converged]], f"{problem.name} on {grid.interior_shape}")
    return {"converged": report.converged, "metric": f"{report.iterations} it, factor {report.avg_factor:.3f}"}


def _bench_pairs(text: str) -> List[Tuple[float, int]]:
    pairs = []
    for item in text.split(","):
        try:
            k0, n = item.split(":")
            pairs.append((float(k0), int(n)))
        except ValueError:
            raise ConfigurationError(f"Benchmark pairs look like '1:64', got {item!r}") from None
    return pairs


def mg_bench_command(ctx: CommandContext) -> Dict[str, Any]:
    """V-cycle (and optionally FMG) iterations, work units and factors over (k0, n) pairs."""
    dim = int(ctx.option("dim", 3))
    pairs = _bench_pairs(ctx.option("pairs", BENCH_PAIRS))
    theta = parse_angle(ctx.option("theta", DEFAULT_THETA))
    gamma = theta_to_gamma(theta)
    solver = ctx.config.solver
    cycle, smoother = specs_from_config(solver)
    methods = ["vcycle", "fmg"] if ctx.option("fmg", False) else ["vcycle"]

    rows = []
    for k0, n in pairs:
        problem = problem_from_config(ProblemConfig(problem=f"helmholtz{dim}d-twodots", k0=k0))
        grid = problem.rotated_grid(n, gamma)
        for method in methods:
            solve = fmg if method == "fmg" else solve_vcycles
            _, report = solve(problem, grid, solver.tol, solver.max_iters, cycle, smoother)
            rows.append([k0, n, k0 * grid.axes[0].h, method, report.iterations, report.work_units,
                         report.avg_factor, report.relative_residual, report.converged])
            logger.info(f"mg-bench k0={k0} n={n} {method}: {report.iterations} iterations")

    header = ["k0", "n", "k0_h", "method", "iterations", "work_units", "avg_factor", "relative_residual", "converged"]
    ctx.artifact("mg_bench", header, rows, gamma=gamma, theta=theta, dimension=dim)
    ctx.show(header, rows, f"{dim}D multigrid benchmark, gamma={math.degrees(gamma):.1f} deg")
    converged = all(row[-1] for row in rows)
    return {"converged": converged, "metric": f"{len(rows)} solves"}


def fmg_time_command(ctx: CommandContext) -> Dict[str, Any]:
    """Wall time of one F(s) full multigrid solve (hardware dependent)."""
    dim = int(ctx.option("dim", 3))
    n = int(ctx.option("n", 64))
    k0 = float(ctx.option("k0", 1.0))
    cycles_per_level = int(ctx.option("cycles_per_level", 1))
    gamma = theta_to_gamma(parse_angle(ctx.option("theta", DEFAULT_THETA)))
    solver = ctx.config.solver.model_copy(update={"cycles_per_level": cycles_per_level})
    cycle, smoother = specs_from_config(solver)

    problem = problem_from_config(ProblemConfig(problem=f"helmholtz{dim}d-twodots", k0=k0))
    grid = problem.rotated_grid(n, gamma)
    start = time.perf_counter()
    _, report = fmg(problem, grid, solver.tol, solver.max_iters, cycle, smoother)
    report.wall_time = time.perf_counter() - start

    header = ["n", "k0", "cycles_per_level", "wall_time_s", "final_residual", "relative_residual", "work_units"]
    rows = [[n, k0, cycles_per_level, report.wall_time, report.final_residual, report.relative_residual, report.work_units]]
    ctx.artifact("fmg_time", header, rows, informational="wall time depends on hardware")
    ctx.show(header, rows, f"F({cycles_per_level}) timing")
    return {"converged": True, "metric": f"{report.wall_time:.2f} s"}


def farfield_command(ctx: CommandContext) -> Dict[str, Any]:
    """Far-field map on the rotated grid, optionally compared with the ECS reference."""
    config = ctx.config
    problem = problem_from_config(config.problem)
    if isinstance(problem, SchrodingerProblem):
        raise ConfigurationError("farfield needs a Helmholtz problem")
    if ctx.args.gamma_from_theta is not None:
        config = config.with_overrides({"grid.theta": ctx.args.gamma_from_theta})
        config.grid.gamma = None
    elif config.grid.gamma is None and config.grid.theta is None:
        config = config.with_overrides({"grid.theta": math.pi / 4})
    ctx.config = config

    if problem.dim == 2:
        directions = farfield.directions_2d(int(ctx.option("n_directions", 360)))
    else:
        directions = farfield.directions_3d(int(ctx.option("n_polar", 64)), int(ctx.option("n_azimuth", 128)))

    maps = {"complex": farfield.farfield_map(problem, "complex", config.grid, directions, config.solver)}
    compare = ctx.option("compare")
    if compare:
        maps[compare] = farfield.farfield_map(problem, compare, config.grid, directions, config.solver)

    for name, result in maps.items():
        ctx.artifact(f"farfield_{name.replace('-', '_')}", result.header, result.rows(),
                     prefactor=result.prefactor_descriptor, solve=result.metadata)

    summary: Dict[str, Any] = {"converged": all(m.metadata["converged"] for m in maps.values())}
    rows = [[name, m.metadata.get("gamma", m.metadata.get("theta")), m.metadata["report"]["iterations"],
             float(np.max(np.abs(m.values)))] for name, m in maps.items()]
    ctx.show(["solver", "angle", "iterations", "max |F|"], rows, f"Far field of {problem.name}")
    if compare:
        difference = farfield.normalized_difference(maps["complex"].values, maps[compare].values)
        ctx.workspace.write_json(ctx.run_dir, "difference", {"normalized_l2_difference": difference, "reference": compare})
        summary["difference"] = difference
        summary["metric"] = f"diff {difference:.2e}"
        ctx.monitor.console.print(f"Normalized L2 difference complex vs {compare}: {difference:.3e}")
    return summary


def ionization_scan_command(ctx: CommandContext) -> Dict[str, Any]:
    """Single and double ionization observables over an energy range, per path."""
    base = problem_from_config(ctx.config.problem.model_copy(update={"problem": "schrodinger2d-benchmark"}))
    energies = _energies(float(ctx.option("emin", -1.5)), float(ctx.option("emax", 1.5)), float(ctx.option("estep", 0.25)))
    paths = [p.strip() for p in ctx.option("paths", "complex,real").split(",") if p.strip()]
    n_alpha = int(ctx.option("n_alpha", 64))
    solver = ctx.config.solver.model_copy(update={"method": ctx.option("method", "direct")})
    grids = {
        "complex": quantum.default_ionization_grid(base, "complex", ctx.option("n_complex"),
                                                   multigrid=solver.method == "multigrid"),
        "real": quantum.default_ionization_grid(base, "real", ctx.option("n_real")),
    }

    totals, channels = [], []
    for path in paths:
        if path not in grids:
            raise ConfigurationError(f"Unknown ionization path {path!r}")
        points = quantum.energy_scan(base, energies, grids[path], ionization_path=path, solver=solver,
                                     n_alpha=n_alpha, threads=ctx.config.threads)
        for point in points:
            result = point.ionization
            if result is None:
                totals.append([point.energy, path, 0, 0.0, 0.0, 0.0, False, 0.0, 0, "failed"])
                continue
            open_channels = [c for c in result.channels if c.is_open]
            report = point.report
            totals.append([point.energy, path, len(open_channels), sum(c.s_abs2 for c in result.channels),
                           result.sigma_tot, result.sigma_tot_reduced, report.converged, report.avg_factor,
                           report.iterations, "ok" if report.converged else "not-converged"])
            for c in result.channels:
                channels.append([point.energy, path, c.n, c.threshold, c.is_open,
                                 c.amplitude.real, c.amplitude.imag, c.s_abs2])

    total_header = ["energy", "path", "open_channels", "single_s_abs2", "sigma_tot", "sigma_tot_reduced",
                    "converged", "avg_factor", "iterations", "status"]
    ctx.artifact("cross_sections", total_header, totals, conventions=dict(quantum.CONVENTIONS))
    ctx.artifact("channels", ["energy", "path", "channel", "threshold", "open", "re_s", "im_s", "s_abs2"],
                 channels, conventions=dict(quantum.CONVENTIONS))
    ctx.show(total_header, totals, "Ionization scan")
    failed = [row for row in totals if row[-1] == "failed"]
    return {"converged": not failed, "metric": f"{len(energies)} energies x {len(paths)} paths"}


def mg_rate_scan_command(ctx: CommandContext) -> Dict[str, Any]:
    """Average V-cycle factor of the Schrödinger model over an energy range."""
    dim = int(ctx.option("dim", 2))
    if dim not in (2, 3):
        raise ConfigurationError(f"mg-rate-scan supports --dim 2 or 3, got {dim}")
    energies = _energies(float(ctx.option("emin", -2.0)), float(ctx.option("emax", 3.0)), float(ctx.option("estep", 0.25)))
    n = int(ctx.option("n", RATE_SCAN_INTERVALS[dim]))
    grid_config = ctx.config.grid
    gamma = grid_config.rotation_angle() if grid_config.gamma is not None or grid_config.theta is not None else RATE_SCAN_GAMMA[dim]
    cycles = int(ctx.option("cycles", RATE_SCAN_CYCLES[dim]))
    cycle, smoother = specs_from_config(ctx.config.solver)

    problem = problem_from_config(ProblemConfig(problem=f"schrodinger{dim}d-benchmark"))
    grid = problem.rotated_grid(n, gamma)
    points = quantum.energy_scan(problem, energies, grid, cycle, smoother, rate_cycles=cycles,
                                 fmg_start=dim == 3, threads=ctx.config.threads)

    rows = []
    for point in points:
        if point.report is None:
            rows.append([point.energy, float("nan"), 0, False, "failed"])
            continue
        report = point.report
        rows.append([point.energy, report.avg_factor, report.iterations, report.converged,
                     "convergent" if report.converged else "divergent"])
    header = ["energy", "avg_factor", "cycles", "converged", "status"]
    ctx.artifact("mg_rate_scan", header, rows, gamma=gamma, dimension=dim, intervals=n)
    ctx.show(header, rows, f"{dim}D V-cycle factor scan, gamma={math.degrees(gamma):.1f} deg")
    divergent = [row[0] for row in rows if row[-1] == "divergent"]
    return {"converged": True, "metric": f"{len(divergent)} divergent energies"}


def spectrum_command(ctx: CommandContext) -> Dict[str, Any]:
    """1D spectra on real and rotated contours plus the Kronecker 2D approximation."""
    radius = float(ctx.option("radius", spectra.SPECTRUM_RADIUS))
    n = int(ctx.option("n", spectra.SPECTRUM_INTERVALS))
    gamma = parse_angle(ctx.option("gamma_1d", math.pi / 6))
    cutoff = float(ctx.option("kron_cutoff", 10.0))
    problem = SchrodingerProblem()

    real = spectra.eig_hamiltonian_1d(problem.one_body, build_contour(ContourKind.ROTATED, 0.0, radius, n))
    rotated = spectra.eig_hamiltonian_1d(problem.one_body, build_contour(ContourKind.ROTATED, 0.0, radius, n, gamma))
    kron = spectra.kronecker_2d_spectrum(real[real.real < cutoff])

    rows = spectra.spectrum_rows(real, "real") + spectra.spectrum_rows(rotated, "rotated") + spectra.spectrum_rows(kron, "kron2d")
    summary = spectra.spectrum_summary(real)
    ctx.artifact("spectrum", spectra.SPECTRUM_HEADER, rows, gamma=gamma, radius=radius, intervals=n,
                 kron_cutoff=cutoff, landmarks=summary)
    ctx.show(list(summary), [list(summary.values())], "1D spectrum landmarks")
    return {"converged": True, "metric": f"lambda0 {summary['lambda0']:.4f}"}


def angle_table_command(ctx: CommandContext) -> Dict[str, Any]:
    """ECS angle θ against the matching rotation angle γ."""
    rows = []
    for label, theta in ANGLE_TABLE:
        gamma = theta_to_gamma(theta)
        rows.append([label, theta, math.degrees(theta), gamma, math.degrees(gamma)])
    header = ["theta", "theta_rad", "theta_deg", "gamma_rad", "gamma_deg"]
    ctx.artifact("angle_table", header, rows)
    ctx.show(header, rows, "ECS angle to rotation angle")
    return {"converged": True, "metric": f"{len(rows)} angles"}


def status_command(ctx: CommandContext) -> Dict[str, Any]:
    """Show the runs of the workspace."""
    ctx.monitor.show(ctx.monitor.runs_table())
    return {}


# ----------------------------------------------------------------- parser

def _add_grid_solver_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--problem", help="Built-in problem name")
    parser.add_argument("--k0", type=float, help="Background wavenumber")
    parser.add_argument("--energy", type=float, help="Total energy (Schrodinger problems)")
    parser.add_argument("--n", type=int, help="Intervals per axis")
    parser.add_argument("--gamma", help="Rotation angle, e.g. pi/12 or 10deg")
    parser.add_argument("--theta", help="ECS angle; also sets gamma when --gamma is absent")
    parser.add_argument("--n-ecs", type=int, help="ECS intervals per tail")
    parser.add_argument("--method", choices=["multigrid", "direct", "krylov"], help="Solve method")
    parser.add_argument("--smoother", choices=["gmres", "jacobi"], help="Multigrid smoother")
    parser.add_argument("--tol", type=float, help="Relative residual tolerance")
    parser.add_argument("--max-iters", type=int, help="Iteration limit")
    parser.add_argument("--cycles-per-level", type=int, help="Fixed V-cycles per FMG level, F(s)")


def _flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    mapping = {
        "problem": "problem.problem",
        "k0": "problem.k0",
        "energy": "problem.energy",
        "gamma": "grid.gamma",
        "theta": "grid.theta",
        "n_ecs": "grid.n_ecs",
        "method": "solver.method",
        "smoother": "solver.smoother",
        "tol": "solver.tol",
        "max_iters": "solver.max_iters",
        "cycles_per_level": "solver.cycles_per_level",
        "threads": "threads",
    }
    overrides = {dotted: getattr(args, name, None) for name, dotted in mapping.items()}
    if getattr(args, "command_name", None) in ("helmholtz-solve", "farfield"):
        overrides["grid.n"] = getattr(args, "n", None)
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contour-scatter", description="Complex-contour scattering experiments")
    parser.add_argument("--workspace", default="./scatter_workspace", help="Run workspace directory")
    parser.add_argument("--config", help="JSON experiment configuration")
    parser.add_argument("--threads", type=int, help="Worker threads for energy scans")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Log level")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    helmholtz_parser = subparsers.add_parser("helmholtz", help="Single solves")
    helmholtz_sub = helmholtz_parser.add_subparsers(dest="helmholtz_command")
    solve_parser = helmholtz_sub.add_parser("solve", help="Solve one configured problem")
    _add_grid_solver_flags(solve_parser)
    solve_parser.set_defaults(func=solve_command, command_name="helmholtz-solve")

    bench_parser = subparsers.add_parser("mg-bench", help="Multigrid iterations over (k0, n) pairs")
    bench_parser.add_argument("--dim", type=int, choices=[2, 3], help="Dimension (default 3)")
    bench_parser.add_argument("--pairs", help=f"Comma-separated k0:n pairs (default {BENCH_PAIRS})")
    bench_parser.add_argument("--theta", help="ECS angle defining gamma (default pi/6)")
    bench_parser.add_argument("--fmg", action="store_true", default=None, help="Also run full multigrid")
    bench_parser.set_defaults(func=mg_bench_command, command_name="mg-bench")

    time_parser = subparsers.add_parser("fmg-time", help="Wall time of an F(s) solve")
    time_parser.add_argument("--dim", type=int, choices=[2, 3])
    time_parser.add_argument("--n", type=int)
    time_parser.add_argument("--k0", type=float)
    time_parser.add_argument("--theta")
    time_parser.add_argument("--cycles-per-level", type=int)
    time_parser.set_defaults(func=fmg_time_command, command_name="fmg-time")

    farfield_parser = subparsers.add_parser("farfield", help="Far-field map")
    _add_grid_solver_flags(farfield_parser)
    farfield_parser.add_argument("--gamma-from-theta", help="Derive gamma from this ECS angle (also used by the reference)")
    farfield_parser.add_argument("--compare", choices=["reference", "reference-krylov"], help="Reference path to compare with")
    farfield_parser.add_argument("--n-directions", type=int, help="2D directions (default 360)")
    farfield_parser.add_argument("--n-polar", type=int, help="3D polar angles (default 64)")
    farfield_parser.add_argument("--n-azimuth", type=int, help="3D azimuths (default 128)")
    farfield_parser.set_defaults(func=farfield_command, command_name="farfield")

    ion_parser = subparsers.add_parser("ionization-scan", help="Ionization cross sections over energy")
    ion_parser.add_argument("--emin", type=float)
    ion_parser.add_argument("--emax", type=float)
    ion_parser.add_argument("--estep", type=float)
    ion_parser.add_argument("--paths", help="Comma-separated paths (default complex,real)")
    ion_parser.add_argument("--n-complex", type=int, help="Rotated-grid intervals (default 450, same mesh width as the ECS grid)")
    ion_parser.add_argument("--n-real", type=int, help="ECS real-section intervals (default 300)")
    ion_parser.add_argument("--n-alpha", type=int, help="Breakup angles (default 64)")
    ion_parser.add_argument("--method", choices=["direct", "multigrid"], help="Complex-path solve (default direct)")
    ion_parser.set_defaults(func=ionization_scan_command, command_name="ionization-scan")

    rate_parser = subparsers.add_parser("mg-rate-scan", help="V-cycle factor over energy")
    rate_parser.add_argument("--dim", type=int, choices=[2, 3])
    rate_parser.add_argument("--emin", type=float)
    rate_parser.add_argument("--emax", type=float)
    rate_parser.add_argument("--estep", type=float)
    rate_parser.add_argument("--n", type=int, help="Intervals per axis (default 256 in 2D, 64 in 3D)")
    rate_parser.add_argument("--gamma", help="Rotation angle")
    rate_parser.add_argument("--cycles", type=int, help="Cycles per rate measurement (default 4 in 2D, 3 in 3D)")
    rate_parser.set_defaults(func=mg_rate_scan_command, command_name="mg-rate-scan")

    spectrum_parser = subparsers.add_parser("spectrum", help="1D and Kronecker 2D spectra")
    spectrum_parser.add_argument("--radius", type=float)
    spectrum_parser.add_argument("--n", type=int)
    spectrum_parser.add_argument("--gamma-1d", help="Rotation angle of the rotated spectrum (default pi/6)")
    spectrum_parser.add_argument("--kron-cutoff", type=float, help="Largest 1D eigenvalue used in the Kronecker sums")
    spectrum_parser.set_defaults(func=spectrum_command, command_name="spectrum")

    angle_parser = subparsers.add_parser("angle-table", help="ECS angle to rotation angle table")
    angle_parser.set_defaults(func=angle_table_command, command_name="angle-table")

    status_parser = subparsers.add_parser("status", help="Show workspace runs")
    status_parser.set_defaults(func=status_command, command_name="status")

    return parser


def _error_report(command: Optional[str], error: Exception) -> Dict[str, Any]:
    return {"command": command, "error": type(error).__name__, "message": str(error)}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None or not hasattr(args, "func"):
        parser.print_help()
        return EXIT_USAGE

    workspace = RunWorkspace(Path(args.workspace))
    workspace.setup_logging(args.log_level)
    command = args.command_name
    ctx: Optional[CommandContext] = None
    try:
        config = load_config(args.config)
        dotted = {k: v for k, v in config.command_section(command).items() if "." in k}
        config = config.with_overrides(dotted).with_overrides(_flag_overrides(args))
        ctx = CommandContext(args, config, workspace)
        workspace.record_event("started", {"command": command, "options": ctx.options()})
        summary = args.func(ctx)
    except ContourScatterError as e:
        code = EXIT_NUMERICAL if isinstance(e, NumericalError) else EXIT_USAGE
        report = _error_report(command, e)
        logger.error(f"{command} failed: {e}")
        if ctx is not None:
            workspace.write_summary(ctx.run_dir, "failed", report)
        workspace.record_event("failed", report)
        print(json.dumps(report), file=sys.stderr)
        return code

    if command in SOLVE_COMMANDS and not summary.get("converged", True):
        report = {"command": command, "error": "ConvergenceFailure",
                  "message": f"{command} did not reach its tolerance ({summary.get('metric', 'no metric')})"}
        logger.error(report["message"])
        workspace.write_summary(ctx.run_dir, "not-converged", {**summary, **report})
        workspace.record_event("failed", report)
        print(json.dumps(report), file=sys.stderr)
        return EXIT_NUMERICAL

    if command != "status":
        status = "ok" if summary.get("converged", True) else "not-converged"
        workspace.write_summary(ctx.run_dir, status, summary)
        workspace.record_event("finished", {"command": command, "status": status})
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
