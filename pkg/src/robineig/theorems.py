"""Numerical verification of eigenvalue monotonicity in the boundary coefficient.

For theta1 <= theta2 with strict inequality somewhere on the boundary, each
eigenvalue of the theta1 problem lies strictly below its theta2 counterpart.
The routines here compute per-index gaps, check the counting-function
inequality N_1(mu) >= N_2(mu) + dim ker(A_1 - mu) at and between eigenvalues,
certify that eigenfunctions keep a nonzero trace on the strict region, sweep
eigenvalue curves along the segment theta_t = theta1 + t (theta2 - theta1),
and extrapolate mesh sequences to continuum values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import (
    FormMatrices,
    assemble_a0,
    assemble_boundary_mass,
    assemble_mass,
    boundary_l2_norm,
)
from .coeffs import EllipticCoefficients, RobinCoefficient, robin_compare
from .errors import ComparisonFailed, MismatchedMeshes, NonConvergent
from .geometry import BoundaryRegion, TriangleMesh
from .spectra import Spectrum, counting, eigenspace, solve_pencil


@dataclass(frozen=True)
class MonotonicityReport:
    """Per-index eigenvalue comparison of two boundary coefficients."""

    eigenvalues1: np.ndarray
    eigenvalues2: np.ndarray
    gaps: np.ndarray
    certified: np.ndarray          # gap_k above the per-k strict tolerance
    weak_pass: bool                # all gaps >= -1e-9
    strict_pass: bool              # all gaps certified
    strict_tol: float
    strict_region: BoundaryRegion  # where theta2 - theta1 is strictly positive


@dataclass(frozen=True)
class NidResult:
    """Counting-function inequality N_1(mu) >= N_2(mu) + dim ker(A_1 - mu)."""

    passed: bool
    mu: float
    n1: int
    n2: int
    dim_ker: int


@dataclass(frozen=True)
class TraceCertificate:
    """L2 norms over the strict region of the theta2 eigenfunction traces.

    A norm at zero would break the strict-gap argument; ``flagged`` lists the
    (0-based) indices whose trace norm falls at or below ``tol``.
    """

    norms: np.ndarray
    flagged: tuple[int, ...]
    tol: float


@dataclass(frozen=True)
class EigencurveTable:
    """Eigenvalue curves t -> lambda_k(theta1 + t (theta2 - theta1))."""

    t_values: np.ndarray
    eigenvalues: np.ndarray  # shape (len(t_values), k_max)


@dataclass(frozen=True)
class RichardsonResult:
    estimate: float
    order: float


def monotonicity_report(mesh: TriangleMesh, c: EllipticCoefficients,
                        theta1: RobinCoefficient, theta2: RobinCoefficient,
                        k_max: int, *, cluster_tol=1e-6, strict_tol=1e-8,
                        spectra: tuple[Spectrum, Spectrum] | None = None,
                        ) -> MonotonicityReport:
    """Compare the first k_max eigenvalues of the theta1 and theta2 problems.

    Requires theta1 <= theta2 at every boundary quadrature node
    (ComparisonFailed otherwise).  Pass ``spectra`` to reuse already computed
    eigensolutions (each must hold at least k_max eigenvalues).
    """
    cmp = robin_compare(theta1, theta2, mesh)
    if not cmp.leq_everywhere:
        raise ComparisonFailed(
            f"theta1 > theta2 somewhere (violation {cmp.max_violation:g})"
        )
    if spectra is None:
        S0 = assemble_a0(mesh, c)
        M = assemble_mass(mesh)
        F1 = FormMatrices(S0, assemble_boundary_mass(mesh, theta1), M, mesh.n_nodes)
        F2 = FormMatrices(S0, assemble_boundary_mass(mesh, theta2), M, mesh.n_nodes)
        spec1 = solve_pencil(F1, k_max, cluster_tol=cluster_tol)
        spec2 = solve_pencil(F2, k_max, cluster_tol=cluster_tol)
    else:
        spec1, spec2 = spectra
    w1 = spec1.eigenvalues[:k_max]
    w2 = spec2.eigenvalues[:k_max]
    if len(w1) < k_max or len(w2) < k_max:
        raise ValueError(f"spectra hold fewer than k_max={k_max} eigenvalues")
    gaps = w2 - w1
    scale = 1.0 + np.maximum(np.abs(w1), np.abs(w2))
    certified = gaps > strict_tol * scale
    return MonotonicityReport(
        eigenvalues1=w1,
        eigenvalues2=w2,
        gaps=gaps,
        certified=certified,
        weak_pass=bool(np.all(gaps >= -1e-9)),
        strict_pass=bool(np.all(certified)),
        strict_tol=float(strict_tol),
        strict_region=cmp.strict_edges,
    )


def weak_monotonicity_exact(F1: FormMatrices, F2: FormMatrices, k_max: int,
                            *, tol=1e-9) -> bool:
    """Exact discrete weak monotonicity: lambda_k(F1) <= lambda_k(F2) + tol.

    Both forms must be built from the same interior matrices (identical S0
    and M entrywise); only the boundary terms may differ.
    """
    if F1.n_nodes != F2.n_nodes:
        raise MismatchedMeshes("forms have different sizes")
    dS = F1.S0 - F2.S0
    dM = F1.M - F2.M
    if (dS.nnz and np.max(np.abs(dS.data)) != 0.0) or (
        dM.nnz and np.max(np.abs(dM.data)) != 0.0
    ):
        raise MismatchedMeshes("forms do not share S0 and M")
    w1 = solve_pencil(F1, min(k_max, F1.n_nodes)).eigenvalues
    w2 = solve_pencil(F2, min(k_max, F2.n_nodes)).eigenvalues
    return bool(np.all(w1 <= w2 + tol))


def nid_check(spec1: Spectrum, spec2: Spectrum, mu: float) -> NidResult:
    """Check N_1(mu) >= N_2(mu) + dim ker(A_1 - mu) at one spectral parameter.

    mu snaps to the nearest theta2 eigenvalue when one lies within the
    cluster tolerance, so querying "at lambda_k" is stable against roundoff.
    """
    w2 = spec2.eigenvalues
    mu_used = float(mu)
    if len(w2):
        j = int(np.argmin(np.abs(w2 - mu_used)))
        if abs(w2[j] - mu_used) <= spec2.tol_at(mu_used):
            mu_used = float(w2[j])
    n1 = counting(spec1, mu_used)
    n2 = counting(spec2, mu_used)
    dim_ker = eigenspace(spec1, mu_used).shape[1]
    return NidResult(passed=n1 >= n2 + dim_ker, mu=mu_used, n1=n1, n2=n2,
                     dim_ker=dim_ker)


def trace_certificate(spec: Spectrum, mesh: TriangleMesh,
                      region: BoundaryRegion, k_max: int, *,
                      tol=1e-8) -> TraceCertificate:
    """Boundary trace norms ||x_k||_{L2(region)} for the first k_max vectors."""
    k_max = min(k_max, spec.k)
    norms = np.empty(k_max)
    for k in range(k_max):
        norms[k] = boundary_l2_norm(mesh, spec.eigenvectors[:, k], region)
    flagged = tuple(int(k) for k in range(k_max) if norms[k] <= tol)
    return TraceCertificate(norms=norms, flagged=flagged, tol=float(tol))


def eigencurve_sweep(mesh: TriangleMesh, c: EllipticCoefficients,
                     theta1: RobinCoefficient, theta2: RobinCoefficient,
                     t_values, k_max: int, *, cluster_tol=1e-6,
                     seed=0) -> EigencurveTable:
    """Eigenvalue curves along theta_t = theta1 + t (theta2 - theta1), t in [0, 1].

    The boundary matrix depends linearly on theta, so B_t = B1 + t (B2 - B1)
    exactly.  When theta1 <= theta2 each curve is nondecreasing; a decreasing
    row signals a solver fault and raises ValueError.
    """
    t_values = np.asarray(t_values, dtype=float)
    if np.any(t_values < 0) or np.any(t_values > 1) or np.any(np.diff(t_values) <= 0):
        raise ValueError("t_values must be strictly increasing within [0, 1]")
    cmp = robin_compare(theta1, theta2, mesh)
    if not cmp.leq_everywhere:
        raise ComparisonFailed(
            f"theta1 > theta2 somewhere (violation {cmp.max_violation:g})"
        )
    S0 = assemble_a0(mesh, c)
    M = assemble_mass(mesh)
    B1 = assemble_boundary_mass(mesh, theta1)
    B2 = assemble_boundary_mass(mesh, theta2)
    dB = (B2 - B1).tocsr()
    table = np.empty((len(t_values), k_max))
    for i, t in enumerate(t_values):
        F = FormMatrices(S0, (B1 + t * dB).tocsr(), M, mesh.n_nodes)
        table[i] = solve_pencil(F, k_max, cluster_tol=cluster_tol,
                                seed=seed).eigenvalues
    rows_ok = np.all(np.diff(table, axis=0) >= -1e-9)
    if not rows_ok:
        raise ValueError("eigenvalue curve decreased along an increasing sweep")
    return EigencurveTable(t_values=t_values, eigenvalues=table)


def richardson_extrapolate(values) -> RichardsonResult:
    """Extrapolate a sequence computed at h, h/2, h/4, ... to its limit.

    Uses the finest three levels: the observed order is
    p = log2((v0 - v1) / (v1 - v2)) and the estimate v2 + (v2 - v1)/(2^p - 1).
    Raises NonConvergent unless the difference ratio lies in (1, 8), i.e.
    0 < p < 3.
    """
    v = np.asarray(values, dtype=float).ravel()
    if len(v) < 3:
        raise ValueError("need at least three levels to extrapolate")
    v0, v1, v2 = v[-3], v[-2], v[-1]
    d1 = v1 - v0
    d2 = v2 - v1
    if d2 == 0.0 or d1 == 0.0:
        raise NonConvergent("differences vanish; no observable order")
    ratio = d1 / d2
    if not (1.0 < ratio < 8.0):
        raise NonConvergent(f"difference ratio {ratio:g} outside (1, 8)")
    p = math.log2(ratio)
    estimate = v2 + d2 / (ratio - 1.0)
    return RichardsonResult(estimate=float(estimate), order=float(p))
