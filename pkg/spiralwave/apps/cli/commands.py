"""
Command line entry point: `python -m spiralwave <command> [options]`.

Every command accepts the same options; values from --config are merged
underneath the flags. Exit codes: 0 success, 1 validation failure, 2 solver
failure, 64 usage or configuration error.
"""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np

from spiralwave.apps.complex_branch.solver import ComplexBranchSolver, SolutionPoint
from spiralwave.apps.complex_branch.sweep import sweep_parameters
from spiralwave.apps.eigensolver.spectrum import spectrum
from spiralwave.apps.geometry.boundary import BoundaryCondition, default_boundary
from spiralwave.apps.geometry.grid import make_grid
from spiralwave.apps.geometry.surface import (
    SurfaceOfRevolution,
    make_custom,
    make_disk,
    make_sphere,
    read_profile_csv,
    validate_surface,
)
from spiralwave.apps.kinetics.assumptions import check_assumptions
from spiralwave.apps.kinetics.reaction import KineticsSpec, parse_kinetics
from spiralwave.apps.pattern.classify import classify as classify_point
from spiralwave.apps.pattern.locus import frozen_locus
from spiralwave.apps.pattern.polar import phase_derivative_integral, polar_decompose
from spiralwave.apps.pattern.render import render_pattern
from spiralwave.apps.real_branch.branch import BranchPoint, RealBranchSolver, verify_branch
from spiralwave.core import settings
from spiralwave.core.exceptions import (
    BoundaryConditionError,
    ConfigError,
    ConvergenceError,
    GeometryError,
    KineticsError,
    SpiralwaveError,
    ValidationFailure,
)
from spiralwave.core.instrumentation import export_metrics

from .config import RunConfig, build_config, read_config_file
from .outputs import Artifact, write_outputs

logger = logging.getLogger(__name__)

USAGE_HINT = "Usage: spiralwave COMMAND [OPTIONS]; run 'spiralwave COMMAND --help' for the options."

Pipeline = Callable[[RunConfig], Tuple[List[Artifact], int]]

OPTIONS = [
    click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON run configuration; flags override it."),
    click.option("--surface", help="disk, sphere or custom."),
    click.option("--profile", help="CSV with header s,a,atilde for a custom surface."),
    click.option("--bc", help="none, dirichlet, neumann or robin:alpha1,alpha2."),
    click.option("--kinetics", help="cubic:beta, cubic-omega:beta or poly:FILE."),
    click.option("--m", type=int, help="Winding number."),
    click.option("--n", type=int, help="Nodal index."),
    click.option("--nmax", type=int, help="Largest nodal index for eig."),
    click.option("--lambda", "lam", type=float, help="Domain size parameter lambda."),
    click.option("--lambda-max", type=float, help="End of the branch continuation."),
    click.option("--step", type=float, help="Continuation step in lambda."),
    click.option("--sigma-sign", type=int, help="Pitchfork leg, 1 or -1."),
    click.option("--eta", type=float, help="Diffusion twist eta."),
    click.option("--b", help="Kinetic parameters, comma separated."),
    click.option("--eta-range", help="lo,hi,count for sweep."),
    click.option("--b-range", help="lo,hi,count for sweep."),
    click.option("--beta-range", help="lo,hi,count for locus."),
    click.option("--t", type=float, help="Render time."),
    click.option("--points-per-arm", type=int, help="Samples per rendered arm."),
    click.option("--omega-tol", type=float, help="Frozen threshold on |Omega|."),
    click.option("--p-tol", type=float, help="Vortex threshold on sup|p'| s_star."),
    click.option("--newton-tol", type=float, help="Newton residual tolerance."),
    click.option("--threads", type=int, help="Worker cap; overrides SPIRALWAVE_THREADS."),
    click.option("--out", help="Output directory."),
    click.option("--metrics-file", help="Write Prometheus metrics here after the run."),
]


def common_options(func):
    for option in reversed(OPTIONS):
        func = option(func)
    return func


@contextmanager
def overridden_settings(cfg: RunConfig):
    """Apply per-run numerical overrides to core.settings and restore them afterwards."""
    overrides = {"NEWTON_TOL": cfg.newton_tol, "THREADS": cfg.threads}
    saved = {}
    for name, value in overrides.items():
        if value is not None:
            saved[name] = getattr(settings, name)
            setattr(settings, name, value)
    try:
        yield
    finally:
        for name, value in saved.items():
            setattr(settings, name, value)


def execute(command: str, flags: Dict, pipeline: Pipeline) -> int:
    config_path = flags.pop("config_path", None)
    file_values = read_config_file(config_path) if config_path else {}
    cfg = build_config(command, file_values, flags)
    logger.info(f"Running {command} on {cfg.surface} (m={cfg.m}, n={cfg.n})")
    try:
        with overridden_settings(cfg):
            artifacts, code = pipeline(cfg)
        write_outputs(artifacts, cfg.out, cfg)
        return code
    finally:
        if cfg.metrics_file:
            export_metrics(cfg.metrics_file)


# -- shared setup ------------------------------------------------------------


def load_surface(cfg: RunConfig) -> SurfaceOfRevolution:
    if cfg.surface == "disk":
        return make_disk()
    if cfg.surface == "sphere":
        return make_sphere()
    return make_custom(read_profile_csv(cfg.profile), name=Path(cfg.profile).stem)


def load_kinetics(cfg: RunConfig) -> KineticsSpec:
    if cfg.polynomial is None:
        return parse_kinetics(cfg.kinetics)
    tables = cfg.polynomial.model_dump()
    if cfg.b is not None:
        tables["b"] = cfg.b
    return parse_kinetics("poly", polynomial=tables)


def load_boundary(cfg: RunConfig, S: SurfaceOfRevolution) -> BoundaryCondition:
    bc = cfg.boundary() or default_boundary(S)
    try:
        return bc.check_surface(S)
    except BoundaryConditionError as exc:
        raise ConfigError(exc.message, details={**exc.details, "bc": cfg.bc}) from exc


def setup(cfg: RunConfig):
    S = load_surface(cfg)
    bc = load_boundary(cfg, S)
    return S, bc, load_kinetics(cfg), make_grid(S)


def continue_or_reject(solver: RealBranchSolver, cfg: RunConfig, lambda_end: float):
    try:
        return solver.continue_branch(cfg.n, lambda_end, step=cfg.step, sigma_sign=cfg.sigma_sign)
    except ValueError as exc:
        raise ConfigError(str(exc), details={"m": cfg.m, "n": cfg.n, "lambda": lambda_end}) from exc


def base_point(cfg: RunConfig, S, bc, K, grid) -> BranchPoint:
    """Continue C_n^m from its pitchfork up to --lambda and return the end point."""
    cfg.require("lam")
    solver = RealBranchSolver(S, K, cfg.m, bc, grid)
    branch = continue_or_reject(solver, cfg, cfg.lam)
    if not branch.complete or not branch.points:
        raise ConvergenceError(
            f"Real branch m={cfg.m} n={cfg.n} did not reach lambda={cfg.lam}",
            details=branch.diagnostic,
        )
    return branch.points[-1]


def solve_point(cfg: RunConfig) -> Tuple[SolutionPoint, KineticsSpec]:
    S, bc, K, grid = setup(cfg)
    base = base_point(cfg, S, bc, K, grid)
    return ComplexBranchSolver(base, K).solve(cfg.eta, cfg.b), K


def point_summary(pt: SolutionPoint) -> Dict:
    return {
        "lambda": pt.lam,
        "eta": pt.eta,
        "b": pt.b,
        "omega": pt.omega,
        "residual_norm": pt.residual_norm,
        "gauge_residual": pt.gauge_residual,
        "freq_relation_residual": pt.freq_relation_residual,
        "iterations": pt.iterations,
        "condition": pt.condition,
    }


def profile_artifact(name: str, pt: SolutionPoint) -> Artifact:
    return Artifact.columns(name, ["s", "Re_u", "Im_u"], pt.grid.nodes, pt.u.real, pt.u.imag)


# -- pipelines ---------------------------------------------------------------


def eig_pipeline(cfg: RunConfig):
    S = load_surface(cfg)
    bc = load_boundary(cfg, S)
    pairs = spectrum(S, cfg.m, bc, cfg.nmax, grid=make_grid(S))
    rows = [(cfg.m, pair.n, pair.lam) for pair in pairs]
    artifacts = [Artifact.csv(f"spectrum_m{cfg.m}.csv", ["m", "n", "lambda"], rows)]
    for pair in pairs:
        artifacts.append(
            Artifact.columns(f"eigenfunction_m{cfg.m}_n{pair.n}.csv", ["s", "v"], pair.grid.nodes, pair.radial)
        )
    for pair in pairs:
        click.echo(f"lambda_{pair.n}^{cfg.m} = {pair.lam:.12g}")
    return artifacts, 0


def branch_pipeline(cfg: RunConfig):
    cfg.require("lambda_max")
    S, bc, K, grid = setup(cfg)
    solver = RealBranchSolver(S, K, cfg.m, bc, grid)
    branch = continue_or_reject(solver, cfg, cfg.lambda_max)
    report = verify_branch(branch)
    stem = f"branch_m{cfg.m}_n{cfg.n}"
    rows = [(p.lam, p.sup_u, p.sigma_proj, p.residual_norm, p.nodal_index) for p in branch.points]
    artifacts = [
        Artifact.csv(f"{stem}.csv", ["lambda", "max_u", "sigma_proj", "residual", "nodal_index"], rows),
        Artifact.json(
            f"{stem}.json",
            {
                "m": branch.m,
                "n": branch.n,
                "bifurcation_lambda": branch.bifurcation_lambda,
                "discrete_bifurcation_lambda": branch.discrete_bifurcation_lambda,
                "curvature": solver.curvature(cfg.n),
                "complete": branch.complete,
                "diagnostic": branch.diagnostic,
                "verification": {"passed": report.passed, "amplitude_monotone": report.amplitude_monotone, "checks": report.checks},
            },
        ),
    ]
    for index, point in enumerate(branch.points):
        artifacts.append(Artifact.columns(f"{stem}_profile_{index:04d}.csv", ["s", "u"], grid.nodes, point.u))
    click.echo(f"{len(branch.points)} points on C_{cfg.n}^{cfg.m}{'' if branch.complete else ' (partial)'}")
    return artifacts, 0


def solve_pipeline(cfg: RunConfig):
    pt, _ = solve_point(cfg)
    click.echo(f"omega = {pt.omega:.12g}")
    return [Artifact.json("solve.json", point_summary(pt)), profile_artifact("solve_profile.csv", pt)], 0


def sweep_pipeline(cfg: RunConfig):
    S, bc, K, grid = setup(cfg)
    base = base_point(cfg, S, bc, K, grid)
    eta_values = cfg.eta_range.values() if cfg.eta_range else [cfg.eta]
    b_values = cfg.b_range.values() if cfg.b_range else [K.params(cfg.b)]
    sheet = sweep_parameters(base, eta_values, b_values, K)

    artifacts, rows = [], []
    failures = {tuple(f["cell"]): f for f in sheet.failures}
    for i, eta in enumerate(sheet.eta_values):
        for j, b in enumerate(sheet.b_values):
            name = f"cell_{i:03d}_{j:03d}.json"
            point = sheet.points.get((i, j))
            if point is None:
                failure = failures.get((i, j), {})
                artifacts.append(Artifact.json(name, {"eta": eta, "b": b, "converged": False, "failure": failure}))
                rows.append((eta, b[0] if b.size else 0.0, float("nan"), float("nan"), float("nan"), False))
                continue
            artifacts.append(Artifact.json(name, {**point_summary(point), "converged": True}))
            rows.append((eta, b[0] if b.size else 0.0, point.omega, point.residual_norm, point.freq_relation_residual, True))
    artifacts.append(
        Artifact.csv("sheet.csv", ["eta", "b", "omega", "residual_norm", "freq_relation_residual", "converged"], rows)
    )
    click.echo(f"{len(sheet.points)} of {sheet.shape[0] * sheet.shape[1]} cells converged")
    return artifacts, 0


def classify_pipeline(cfg: RunConfig):
    pt, K = solve_point(cfg)
    profile = polar_decompose(pt)
    pattern = classify_point(pt, K, omega_tol=cfg.omega_tol, p_tol=cfg.p_tol, profile=profile)
    integral = phase_derivative_integral(pt, K)
    agreement = float(np.max(np.abs(integral - profile.p_prime)[profile.resolved], initial=0.0))
    click.echo(pattern.label)
    report = {
        "point": point_summary(pt),
        "rotation": pattern.rotation,
        "shape": pattern.shape,
        "label": pattern.label,
        "diagnostics": pattern.diagnostics,
        "phase_derivative_agreement": agreement,
    }
    return [Artifact.json("classify.json", report)], 0


def locus_pipeline(cfg: RunConfig):
    cfg.require("beta_range")
    S, bc, K, grid = setup(cfg)
    base = base_point(cfg, S, bc, K, grid)
    locus = frozen_locus(base, cfg.beta_range.values(), K)
    rows = [(sample.beta, sample.eta_tilde, sample.omega_residual) for sample in locus.samples]
    # one kinetic parameter gives a scalar slope
    slope = np.atleast_1d(locus.slope_at_zero)
    slope_at_zero = float(slope[0]) if slope.size == 1 else slope.tolist()
    artifacts = [
        Artifact.csv("locus.csv", ["beta", "eta_tilde", "omega_residual"], rows),
        Artifact.json("locus.json", {"slope_at_zero": slope_at_zero, "skipped": locus.skipped}),
    ]
    click.echo(f"{len(locus.samples)} locus samples, {len(locus.skipped)} skipped")
    return artifacts, 0


def render_pipeline(cfg: RunConfig):
    pt, _ = solve_point(cfg)
    curves = render_pattern(pt, cfg.m, t=cfg.t, points_per_arm=cfg.points_per_arm)
    artifacts = []
    for k, arm in enumerate(curves.arms):
        time = np.full(curves.s.shape, curves.t)
        artifacts.append(
            Artifact.columns(f"render_arm{k}.csv", ["t", "s", "x", "y", "z"], time, curves.s, arm[:, 0], arm[:, 1], arm[:, 2])
        )
    return artifacts, 0


def validate_pipeline(cfg: RunConfig):
    report: Dict = {}
    failed = False
    surface = None
    try:
        surface = load_surface(cfg)
        report["surface"] = validate_surface(surface).as_dict()
    except GeometryError as exc:
        report["surface"] = {"passed": False, "message": exc.message, **exc.details}
        failed = True
    if surface is not None and cfg.bc:
        load_boundary(cfg, surface)
        report["boundary"] = {"passed": True, "bc": cfg.bc}
    try:
        report["kinetics"] = check_assumptions(load_kinetics(cfg)).as_dict()
    except KineticsError as exc:
        report["kinetics"] = {"passed": False, "message": exc.message, **exc.details}
        failed = True
    report["passed"] = not failed
    click.echo("valid" if not failed else "invalid")
    return [Artifact.json("validate.json", report)], 1 if failed else 0


# -- click wiring ------------------------------------------------------------


@click.group(help="Vortex and spiral patterns of complex Ginzburg-Landau equations on surfaces of revolution.")
def cli():
    pass


def subcommand(name: str, pipeline: Pipeline, help_text: str):
    @cli.command(name=name, help=help_text)
    @common_options
    def command(**flags):
        return execute(name, flags, pipeline)

    return command


subcommand("eig", eig_pipeline, "Radial eigenvalues and eigenfunctions for n = 0..nmax.")
subcommand("branch", branch_pipeline, "Continue the real branch C_n^m to --lambda-max.")
subcommand("solve", solve_pipeline, "Solve one complex point at (--lambda, --eta, --b).")
subcommand("sweep", sweep_pipeline, "Solve over an (eta, b) grid.")
subcommand("classify", classify_pipeline, "Classify the pattern at one point.")
subcommand("locus", locus_pipeline, "Trace the frozen-spiral locus over --beta-range.")
subcommand("render", render_pipeline, "Sample spiral arms on the surface.")
subcommand("validate", validate_pipeline, "Check a surface, boundary condition and kinetics.")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    settings.configure_logging()
    settings.configure_sentry()
    args = list(argv or [])
    if not args:
        click.echo(cli.get_help(click.Context(cli, info_name="spiralwave")), err=True)
        return ConfigError.exit_code
    try:
        result = cli.main(args=args, prog_name="spiralwave", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"Usage error: {exc.format_message()}", err=True)
        return ConfigError.exit_code
    except click.ClickException as exc:
        exc.show()
        return ConfigError.exit_code
    except click.Abort:
        return ConfigError.exit_code
    except SpiralwaveError as exc:
        level = logging.WARNING if isinstance(exc, (ConfigError, ValidationFailure)) else logging.ERROR
        logger.log(level, f"{type(exc).__name__}: {exc.message}", extra={"details": exc.details})
        click.echo(f"Error: {exc.message}", err=True)
        if isinstance(exc, ConfigError):
            click.echo(USAGE_HINT, err=True)
        return exc.exit_code
    return result if isinstance(result, int) else 0
