"""Command-line driver: solve | compare | sweep | converge | check.

Every run writes CSV reports plus resolved_config.json and summary.txt into
the output directory.  Outputs are deterministic: identical config (and seed)
gives byte-identical files.  Each library error class maps to its own exit
code (see --help).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import errors
from .assembly import FormMatrices, assemble_a0, assemble_boundary_mass, \
    assemble_form, assemble_mass
from .checks import run_all_checks
from .config import ExperimentConfig, parse_config
from .errors import InsufficientSpectrum, ValidationError
from .geometry import mesh_uniform, refine
from .spectra import solve_pencil
from .theorems import (
    eigencurve_sweep,
    monotonicity_report,
    nid_check,
    richardson_extrapolate,
    trace_certificate,
)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_WEAK_FAIL = 50
EXIT_CHECK_FAIL = 51

_EXIT_TABLE = [
    (errors.ParseError, 2, "malformed config JSON"),
    (errors.ValidationError, 3, "config violates the schema"),
    (errors.SelfIntersection, 10, "polygon boundary crosses itself"),
    (errors.DegenerateEdge, 11, "zero-length polygon segment"),
    (errors.LabelCountMismatch, 12, "label count != segment count"),
    (errors.MeshFailure, 13, "triangulation/refinement failed"),
    (errors.EmptyRegion, 14, "boundary region matched no edge"),
    (errors.NotElliptic, 20, "coefficients fail ellipticity"),
    (errors.LabelMissing, 21, "boundary coefficient missing a label"),
    (errors.QuadratureFailure, 22, "non-finite coefficient values"),
    (errors.SingularBoundaryMass, 23, "boundary mass system singular"),
    (errors.NotPositiveDefinite, 30, "mass matrix not positive definite"),
    (errors.ConvergenceFailure, 31, "eigensolver did not converge"),
    (errors.InsufficientSpectrum, 32, "too few eigenvalues for a count"),
    (errors.ZeroVector, 33, "Rayleigh quotient of zero vector"),
    (errors.DependentVectors, 34, "dependent certificate vectors"),
    (errors.ComparisonFailed, 40, "theta1 <= theta2 violated"),
    (errors.MismatchedMeshes, 41, "operands on different meshes"),
    (errors.NonConvergent, 42, "sequence not order-p convergent"),
]

_EPILOG = "exit codes:\n  0   success\n" + "".join(
    f"  {code:<3} {desc}\n" for _, code, desc in _EXIT_TABLE
) + (
    f"  {EXIT_WEAK_FAIL:<3} compare: weak monotonicity failed\n"
    f"  {EXIT_CHECK_FAIL:<3} check: an invariant suite failed\n"
    f"  {EXIT_UNEXPECTED:<3} unexpected internal error\n"
)


def _exit_code_for(exc: Exception) -> int:
    for cls, code, _ in _EXIT_TABLE:
        if isinstance(exc, cls):
            return code
    return EXIT_UNEXPECTED


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_lines(path: Path, lines) -> None:
    path.write_text("\n".join(lines) + "\n")


def _build_mesh(cfg: ExperimentConfig):
    mesh = mesh_uniform(cfg.domain, cfg.h_target)
    for _ in range(cfg.refinements):
        mesh = refine(mesh)
    return mesh


def _say(quiet: bool, *parts) -> None:
    if not quiet:
        print(*parts)


# -- commands -----------------------------------------------------------------


def _cmd_solve(cfg, out: Path, seed: int, quiet: bool) -> int:
    mesh = _build_mesh(cfg)
    F = assemble_form(mesh, cfg.coefficients, cfg.theta1)
    k = min(cfg.k_max, F.n_nodes)
    spec = solve_pencil(F, k, cluster_tol=cfg.cluster_tol, seed=seed)
    ids = spec.cluster_ids
    rows = ["k,lambda,cluster_id,residual"]
    for j in range(spec.k):
        rows.append(
            f"{j + 1},{_fmt(spec.eigenvalues[j])},{ids[j]},{_fmt(spec.residuals[j])}"
        )
    _write_lines(out / "spectrum.csv", rows)
    summary = [
        "command: solve",
        f"nodes: {mesh.n_nodes}",
        f"h: {_fmt(mesh.h)}",
        f"eigenvalues: {k}",
        f"lambda_1: {_fmt(spec.eigenvalues[0])}",
        f"lambda_{k}: {_fmt(spec.eigenvalues[-1])}",
    ]
    _write_lines(out / "summary.txt", summary)
    _say(quiet, f"solve: {k} eigenvalues on {mesh.n_nodes} nodes -> {out}")
    return EXIT_OK


def _solve_pair_with_buffer(cfg, F1, F2, mus_of, seed):
    """Solve both pencils with enough buffer that all counting queries resolve."""
    n = F1.n_nodes
    k_solve = min(n, cfg.k_max + 8)
    while True:
        s1 = solve_pencil(F1, k_solve, cluster_tol=cfg.cluster_tol, seed=seed)
        s2 = solve_pencil(F2, k_solve, cluster_tol=cfg.cluster_tol, seed=seed)
        try:
            rows = [nid_check(s1, s2, mu) for mu in mus_of(s1, s2)]
            return s1, s2, rows
        except InsufficientSpectrum:
            if k_solve >= n:
                raise
            k_solve = min(n, 2 * k_solve + 8)


def _cmd_compare(cfg, out: Path, seed: int, quiet: bool) -> int:
    if cfg.theta2 is None:
        raise ValidationError("theta2", "required by the compare command")
    mesh = _build_mesh(cfg)
    S0 = assemble_a0(mesh, cfg.coefficients)
    M = assemble_mass(mesh)
    F1 = FormMatrices(S0, assemble_boundary_mass(mesh, cfg.theta1), M, mesh.n_nodes)
    F2 = FormMatrices(S0, assemble_boundary_mass(mesh, cfg.theta2), M, mesh.n_nodes)
    k = min(cfg.k_max, mesh.n_nodes)

    def mus_of(s1, s2):
        mus = [float(s2.eigenvalues[j]) for j in range(min(10, k))]
        lo = float(s1.eigenvalues[0]) - 1.0
        hi = float(s2.eigenvalues[k - 1])
        if cfg.nid_grid > 0:
            mus.extend(float(m) for m in np.linspace(lo, hi, cfg.nid_grid))
        return mus

    s1, s2, nid_rows = _solve_pair_with_buffer(cfg, F1, F2, mus_of, seed)
    report = monotonicity_report(
        mesh, cfg.coefficients, cfg.theta1, cfg.theta2, k,
        cluster_tol=cfg.cluster_tol, strict_tol=cfg.strict_tol,
        spectra=(s1, s2),
    )

    rows = ["k,lambda1,lambda2,gap,certified"]
    for j in range(k):
        rows.append(
            f"{j + 1},{_fmt(report.eigenvalues1[j])},{_fmt(report.eigenvalues2[j])},"
            f"{_fmt(report.gaps[j])},{int(report.certified[j])}"
        )
    _write_lines(out / "monotonicity.csv", rows)

    rows = ["mu,n1,n2,dim_ker,passed"]
    for r in nid_rows:
        rows.append(f"{_fmt(r.mu)},{r.n1},{r.n2},{r.dim_ker},{int(r.passed)}")
    _write_lines(out / "nid.csv", rows)

    rows = ["k,trace_norm,flagged"]
    if report.strict_region.edge_ids:
        cert = trace_certificate(s2, mesh, report.strict_region, k)
        for j in range(len(cert.norms)):
            rows.append(f"{j + 1},{_fmt(cert.norms[j])},{int(j in cert.flagged)}")
    _write_lines(out / "trace.csv", rows)

    summary = [
        "command: compare",
        f"nodes: {mesh.n_nodes}",
        f"h: {_fmt(mesh.h)}",
        f"k_max: {k}",
        f"weak_pass: {report.weak_pass}",
        f"strict_pass: {report.strict_pass}",
        f"min_gap: {_fmt(np.min(report.gaps))}",
        f"strict_region_edges: {len(report.strict_region.edge_ids)}",
        f"strict_region_length: {_fmt(report.strict_region.total_length)}",
        f"nid_checks_passed: {sum(int(r.passed) for r in nid_rows)}/{len(nid_rows)}",
    ]
    _write_lines(out / "summary.txt", summary)
    _say(quiet, f"compare: weak={report.weak_pass} strict={report.strict_pass} -> {out}")
    return EXIT_OK if report.weak_pass else EXIT_WEAK_FAIL


def _cmd_sweep(cfg, out: Path, seed: int, quiet: bool) -> int:
    if cfg.theta2 is None:
        raise ValidationError("theta2", "required by the sweep command")
    mesh = _build_mesh(cfg)
    k = min(cfg.k_max, mesh.n_nodes)
    table = eigencurve_sweep(
        mesh, cfg.coefficients, cfg.theta1, cfg.theta2, cfg.t_values, k,
        cluster_tol=cfg.cluster_tol, seed=seed,
    )
    header = "t," + ",".join(f"lambda_{j + 1}" for j in range(k))
    rows = [header]
    for i, t in enumerate(table.t_values):
        rows.append(",".join([_fmt(t)] + [_fmt(v) for v in table.eigenvalues[i]]))
    _write_lines(out / "eigencurves.csv", rows)
    _write_lines(out / "summary.txt", [
        "command: sweep",
        f"nodes: {mesh.n_nodes}",
        f"t_values: {len(table.t_values)}",
        f"k_max: {k}",
    ])
    _say(quiet, f"sweep: {len(table.t_values)} points, k <= {k} -> {out}")
    return EXIT_OK


def _cmd_converge(cfg, out: Path, seed: int, quiet: bool) -> int:
    if cfg.levels < 3:
        raise ValidationError("mesh.levels", "converge needs at least 3 levels")
    mesh = _build_mesh(cfg)
    meshes = [mesh]
    for _ in range(cfg.levels - 1):
        meshes.append(refine(meshes[-1]))
    k = min(cfg.k_max, meshes[0].n_nodes)
    lambdas = np.empty((cfg.levels, k))
    rows = ["level,h,n_nodes," + ",".join(f"lambda_{j + 1}" for j in range(k))]
    for lev, m in enumerate(meshes):
        F = assemble_form(m, cfg.coefficients, cfg.theta1)
        spec = solve_pencil(F, k, cluster_tol=cfg.cluster_tol, seed=seed)
        lambdas[lev] = spec.eigenvalues[:k]
        rows.append(",".join([str(lev), _fmt(m.h), str(m.n_nodes)]
                             + [_fmt(v) for v in lambdas[lev]]))
    _write_lines(out / "levels.csv", rows)

    rows = ["k,estimate,order,converged"]
    n_conv = 0
    for j in range(k):
        try:
            r = richardson_extrapolate(lambdas[:, j])
            rows.append(f"{j + 1},{_fmt(r.estimate)},{_fmt(r.order)},1")
            n_conv += 1
        except errors.NonConvergent:
            rows.append(f"{j + 1},nan,nan,0")
    _write_lines(out / "richardson.csv", rows)
    _write_lines(out / "summary.txt", [
        "command: converge",
        f"levels: {cfg.levels}",
        f"finest_h: {_fmt(meshes[-1].h)}",
        f"finest_nodes: {meshes[-1].n_nodes}",
        f"extrapolated: {n_conv}/{k}",
    ])
    _say(quiet, f"converge: {cfg.levels} levels, extrapolated {n_conv}/{k} -> {out}")
    return EXIT_OK


def _cmd_check(cfg, out: Path, seed: int, quiet: bool) -> int:
    results = run_all_checks(cfg, seed=seed)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.name}" + (f" ({r.detail})" if r.detail else "")
        lines.append(line)
        _say(quiet, line)
    n_fail = sum(1 for r in results if not r.passed)
    lines.append(f"total: {len(results)} checks, {n_fail} failed")
    _say(quiet, lines[-1])
    _write_lines(out / "checks.txt", lines)
    _write_lines(out / "summary.txt", [
        "command: check",
        f"checks: {len(results)}",
        f"failed: {n_fail}",
    ])
    return EXIT_OK if n_fail == 0 else EXIT_CHECK_FAIL


_COMMANDS = {
    "solve": _cmd_solve,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "converge": _cmd_converge,
    "check": _cmd_check,
}


def run(command: str, cfg: ExperimentConfig, out_dir, seed: int = 0,
        quiet: bool = False) -> int:
    """Run one subcommand against a parsed config; returns the exit code."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.json").write_text(cfg.resolved_json())
    return _COMMANDS[command](cfg, out, seed, quiet)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(
        prog="robineig",
        description="Robin eigenvalue problems on polygons: solve spectra and "
                    "verify strict eigenvalue monotonicity in the boundary "
                    "coefficient.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "solve": "spectrum of the theta1 problem -> spectrum.csv",
        "compare": "eigenvalue gaps theta1 vs theta2 -> monotonicity.csv, nid.csv, trace.csv",
        "sweep": "eigenvalue curves along theta1 + t (theta2 - theta1) -> eigencurves.csv",
        "converge": "mesh refinement study with extrapolation -> levels.csv, richardson.csv",
        "check": "run the invariant suites on the configured instance",
    }
    for name, desc in descriptions.items():
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized checks and solver start vectors")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"robineig: cannot read config: {exc}", file=sys.stderr)
        sys.exit(EXIT_UNEXPECTED)
    try:
        cfg = parse_config(text)
        code = run(args.command, cfg, args.out, seed=args.seed, quiet=args.quiet)
    except errors.RobinEigError as exc:
        print(f"robineig: {type(exc).__name__}: {exc}", file=sys.stderr)
        sys.exit(_exit_code_for(exc))
    sys.exit(code)


if __name__ == "__main__":
    main()
