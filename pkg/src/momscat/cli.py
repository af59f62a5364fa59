"""Command-line driver: configure a scattering job, run it, emit artifacts.

A job is described by a plain ``key=value`` config file, command-line
flags, or both (flags win).  Running a job writes a far-field pattern
CSV, an optional GMRES convergence log, and a text report that echoes
the fully resolved configuration.  The ``compare`` subcommand evaluates
the relative error metric between two pattern CSVs on matching grids.

Exit codes: 0 on success, 2 on configuration or input errors, 3 when
the iterative solver did not reach its tolerance (artifacts are still
written in that case).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
from scipy.constants import c as _c0

from .assembly import FORMULATIONS, build_system
from .excitation import PlaneWave
from .kernels import KernelEvaluator
from .mesh import load_mesh
from .postproc import (
    cut_directions,
    error_metric,
    far_field,
    pattern_error_db,
    read_pattern_csv,
    write_pattern_csv,
)
from .rwg import build_space
from .solver import SolverConfig, gmres_solve

__all__ = ["JobConfig", "run_job", "compare_runs", "main"]

logger = logging.getLogger(__name__)

_DB_FLOOR = -300.0


@dataclass(frozen=True)
class JobConfig:
    """Fully resolved description of one scattering run."""

    mesh: str
    freq: float
    formulation: str = "efie"
    format: str | None = None
    alpha: float = 1.0
    cfie_beta: float = 0.5
    inc_theta: float = 180.0
    inc_phi: float = 0.0
    pol: str = "x"
    cut: str = "theta=90"
    step: float = 1.0
    tol: float = 1e-4
    restart: int = 200
    quad_obs: int = 3
    quad_src: int = 5
    out: str = "job"
    reference: str | None = None
    log_convergence: bool = False

    def __post_init__(self):
        if self.freq <= 0.0:
            raise ValueError("freq must be positive")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.formulation!r}")

    def echo(self) -> str:
        """Sorted key=value lines of the resolved configuration."""
        rows = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            if value is None:
                continue
            rows.append(f"{f.name}={value}")
        return "\n".join(rows)


_CONVERTERS = {
    "freq": float, "alpha": float, "cfie_beta": float, "inc_theta": float,
    "inc_phi": float, "step": float, "tol": float, "restart": int,
    "quad_obs": int, "quad_src": int,
    "log_convergence": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def _read_config_file(path: str) -> dict:
    """Parse ``key=value`` lines; '#' starts a comment, blanks ignored."""
    values: dict = {}
    known = {f.name for f in fields(JobConfig)}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"{path}:{ln}: unknown key {key!r}")
        values[key] = _CONVERTERS.get(key, str)(value)
    return values


def run_job(config: JobConfig) -> int:
    """Assemble, solve, and write pattern CSV, convergence log, report.

    Parameters
    ----------
    config : JobConfig

    Returns
    -------
    int
        Process exit code: 0, or 3 when GMRES did not converge.
    """
    t_start = time.perf_counter()
    mesh = load_mesh(config.mesh, config.format)
    space = build_space(mesh)
    k0 = 2.0 * np.pi * config.freq / _c0
    evaluator = KernelEvaluator(k0)
    system = build_system(
        space, evaluator, config.formulation,
        alpha=config.alpha, cfie_beta=config.cfie_beta,
        quad_obs=config.quad_obs, quad_src=config.quad_src,
    )
    wave = PlaneWave(k0, config.inc_theta, config.inc_phi, config.pol)
    system.attach_excitation(wave)
    t_assembled = time.perf_counter()

    solver_config = SolverConfig(tol=config.tol, restart=config.restart)
    x, report = gmres_solve(system, solver_config)
    theta, phi, _ = cut_directions(config.cut, config.step)
    pattern = far_field(space, k0, system.currents(x), theta, phi)

    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pattern_path = out.with_suffix(".csv")
    write_pattern_csv(pattern_path, pattern)
    if config.log_convergence:
        lines = ["iter,residual"]
        lines += [f"{i},{r:.9e}" for i, r in enumerate(report.history)]
        Path(f"{out}_convergence.csv").write_text("\n".join(lines) + "\n")

    lines = [
        f"mesh: {config.mesh} ({mesh.n_triangles} triangles)",
        f"basis functions: {space.n_functions}",
        f"unknowns: {system.size}",
        f"formulation: {config.formulation}",
        f"converged: {report.converged}",
        f"iterations: {report.iterations}",
        f"residual: {report.residual:.6e}",
        f"assembly seconds: {t_assembled - t_start:.3f}",
        f"solve seconds: {report.seconds:.3f}",
        f"wall seconds: {time.perf_counter() - t_start:.3f}",
    ]
    if config.reference is not None:
        reference = read_pattern_csv(config.reference)
        err_db = pattern_error_db(reference, pattern)
        lines.append(f"max error vs reference: {err_db.max():.2f} dB")
    lines += ["", "resolved config:", config.echo()]
    Path(f"{out}_report.txt").write_text("\n".join(lines) + "\n")

    logger.info("pattern written to %s", pattern_path)
    if not report.converged:
        logger.warning("solver did not converge (residual %.3e)", report.residual)
        return 3
    return 0


def compare_runs(reference_csv: str, candidate_csv: str,
                 out: str | None = None) -> tuple[float, float]:
    """Error metric between two pattern CSVs on identical cut grids.

    Writes a per-direction error CSV and returns the per-component
    maxima ``(eps_theta_db, eps_phi_db)``.
    """
    reference = read_pattern_csv(reference_csv)
    candidate = read_pattern_csv(candidate_csv)
    if (reference.theta_deg.shape != candidate.theta_deg.shape
            or not np.array_equal(reference.theta_deg, candidate.theta_deg)
            or not np.array_equal(reference.phi_deg, candidate.phi_deg)):
        raise ValueError("cut grids of the two pattern files do not match")
    eps_theta, eps_phi = error_metric(reference, candidate)
    with np.errstate(divide="ignore"):
        db_theta = np.maximum(20.0 * np.log10(eps_theta), _DB_FLOOR)
        db_phi = np.maximum(20.0 * np.log10(eps_phi), _DB_FLOOR)
    if out is None:
        out = str(Path(candidate_csv).with_suffix("")) + "_error.csv"
    rows = ["theta_deg,phi_deg,eps_theta_db,eps_phi_db"]
    for i in range(reference.theta_deg.size):
        rows.append(f"{reference.theta_deg[i]:.17g},{reference.phi_deg[i]:.17g},"
                    f"{db_theta[i]:.6f},{db_phi[i]:.6f}")
    Path(out).write_text("\n".join(rows) + "\n")
    return float(db_theta.max()), float(db_phi.max())


def _run_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momscat",
        description="Method-of-moments scattering run: mesh in, far-field pattern out.",
    )
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--mesh", help="mesh file path (OFF or Gmsh ASCII v2.2)")
    parser.add_argument("--format", choices=("off", "gmsh22"),
                        help="mesh format (default: by file extension)")
    parser.add_argument("--freq", type=float, help="frequency in Hz")
    parser.add_argument("--formulation", choices=FORMULATIONS)
    parser.add_argument("--alpha", type=float, help="combined-source weight (csie)")
    parser.add_argument("--cfie-beta", type=float, help="EFIE fraction (cfie)")
    parser.add_argument("--inc-theta", type=float, help="incidence theta in degrees")
    parser.add_argument("--inc-phi", type=float, help="incidence phi in degrees")
    parser.add_argument("--pol", choices=("x", "y", "theta", "phi"),
                        help="incident polarization")
    parser.add_argument("--cut", help='far-field cut, e.g. "theta=90" or "phi=0"')
    parser.add_argument("--step", type=float, help="cut step in degrees")
    parser.add_argument("--tol", type=float, help="GMRES relative tolerance")
    parser.add_argument("--restart", type=int, help="GMRES restart length")
    parser.add_argument("--quad-obs", type=int, help="observation quadrature order")
    parser.add_argument("--quad-src", type=int, help="source quadrature order")
    parser.add_argument("--out", help="output prefix (default: job)")
    parser.add_argument("--reference", help="pattern CSV for the report's error line")
    parser.add_argument("--log-convergence", action="store_const", const=True,
                        default=None, help="write <out>_convergence.csv")
    return parser


def main(argv: list | None = None) -> int:
    """Console entry point."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)

    if argv and argv[0] == "compare":
        parser = argparse.ArgumentParser(
            prog="momscat compare",
            description="Error metric between two far-field pattern CSVs.",
        )
        parser.add_argument("reference")
        parser.add_argument("candidate")
        parser.add_argument("--out", help="error CSV path")
        args = parser.parse_args(argv[1:])
        try:
            max_theta, max_phi = compare_runs(args.reference, args.candidate, args.out)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"max eps_theta: {max_theta:.2f} dB")
        print(f"max eps_phi: {max_phi:.2f} dB")
        return 0

    args = _run_parser().parse_args(argv)
    values = {}
    try:
        if args.config:
            values.update(_read_config_file(args.config))
        for f in fields(JobConfig):
            flag = getattr(args, f.name, None)
            if flag is not None:
                values[f.name] = flag
        if "mesh" not in values:
            raise ValueError("a mesh is required (--mesh or mesh= in the config file)")
        if "freq" not in values:
            raise ValueError("a frequency is required (--freq or freq= in the config file)")
        config = JobConfig(**values)
        return run_job(config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
