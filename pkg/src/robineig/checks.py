"""Randomized invariant suites over a configured problem instance.

Each suite exercises the library's contracts (Hermiticity, form consistency,
orthonormality, min-max inequalities, counting identities, monotonicity) on
the instance described by a config, plus a deliberately small companion
instance where exhaustive cross-checks against the independent dense
eigensolver are affordable.  Used by the command-line `check` subcommand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .assembly import (
    FormMatrices,
    assemble_boundary_mass,
    assemble_form,
    direct_form_value,
)
from .coeffs import (
    RobinCoefficient,
    check_ellipticity,
    check_hermitian,
    robin_compare,
    robin_from_callables,
)
from .config import ExperimentConfig
from .errors import NonConvergent
from .geometry import mesh_uniform, refine
from .spectra import (
    _negative_inertia,
    counting,
    form_lower_bound,
    rayleigh,
    reference_eigenvalues,
    solve_pencil,
    subspace_certificate,
)
from .theorems import (
    monotonicity_report,
    nid_check,
    richardson_extrapolate,
    trace_certificate,
    weak_monotonicity_exact,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _combine_robin(mesh, ta: RobinCoefficient, tb: RobinCoefficient, s: float):
    """theta = ta + s * tb as a new boundary coefficient on this mesh's labels."""
    labels = {e.label for e in mesh.boundary_edges}
    per = {
        lab: (lambda t, lab=lab: float(ta.evaluate(lab, t)) + s * float(tb.evaluate(lab, t)))
        for lab in labels
    }
    return robin_from_callables(per_label=per)


def _interior_samples(mesh, rng, n=32):
    """Random points inside mesh triangles (barycentric sampling)."""
    tris = rng.randint(0, len(mesh.triangles), size=n)
    r = rng.rand(n, 3)
    r /= r.sum(axis=1, keepdims=True)
    pts = np.einsum("nij,ni->nj", mesh.nodes[mesh.triangles[tris]], r)
    return pts


def run_all_checks(cfg: ExperimentConfig, seed: int = 0) -> list[CheckResult]:
    rng = np.random.RandomState(seed)
    out: list[CheckResult] = []

    def record(name, passed, detail=""):
        out.append(CheckResult(name=name, passed=bool(passed), detail=str(detail)))

    mesh = mesh_uniform(cfg.domain, cfg.h_target)
    for _ in range(cfg.refinements):
        mesh = refine(mesh)
    c = cfg.coefficients
    theta1 = cfg.theta1
    theta2 = cfg.theta2 if cfg.theta2 is not None else theta1

    # --- geometry ---------------------------------------------------------
    area_err = abs(float(np.sum(mesh.triangle_areas())) - cfg.domain.area)
    record("geometry.area_conservation", area_err <= 1e-10 * cfg.domain.area,
           f"defect {area_err:.3e}")
    fine = refine(mesh)
    record("geometry.refine_halves_h", abs(fine.h - 0.5 * mesh.h) <= 1e-12 * mesh.h,
           f"h {mesh.h:.6g} -> {fine.h:.6g}")
    record("geometry.refine_counts",
           len(fine.triangles) == 4 * len(mesh.triangles)
           and len(fine.boundary_edges) == 2 * len(mesh.boundary_edges),
           f"{len(mesh.triangles)} -> {len(fine.triangles)} triangles")

    # --- coefficients -----------------------------------------------------
    samples = _interior_samples(mesh, rng)
    herm = check_hermitian(c, samples)
    record("coeffs.hermitian", herm.passed, f"violation {herm.max_violation:.3e}")
    ell = check_ellipticity(c, samples)
    record("coeffs.ellipticity", ell.passed,
           f"estimate {ell.estimate:.6g} vs claimed {ell.claimed_E:.6g}")
    same = robin_compare(theta1, theta1, mesh)
    record("coeffs.compare_reflexive",
           same.leq_everywhere and not same.strict_edges.edge_ids,
           "theta1 vs itself")
    pair = robin_compare(theta1, theta2, mesh)
    record("coeffs.compare_ordered", pair.leq_everywhere,
           f"max violation {pair.max_violation:.3e}")

    # --- assembly ---------------------------------------------------------
    F1 = assemble_form(mesh, c, theta1)
    S = F1.S_theta
    herm_defect = float(np.max(np.abs((S - S.conj().T.tocsr()).toarray())))
    smax = float(np.max(np.abs(S.toarray()))) or 1.0
    record("assembly.hermitian", herm_defect <= 1e-12 * smax,
           f"defect {herm_defect:.3e} (max {smax:.3e})")
    ok = True
    worst = 0.0
    for _ in range(5):
        u = rng.standard_normal(mesh.n_nodes) + 1j * rng.standard_normal(mesh.n_nodes)
        v = rng.standard_normal(mesh.n_nodes) + 1j * rng.standard_normal(mesh.n_nodes)
        lhs = complex(v.conj() @ (S @ u))
        rhs = direct_form_value(mesh, c, theta1, u, v)
        scale = max(abs(lhs), abs(rhs), 1.0)
        err = abs(lhs - rhs) / scale
        worst = max(worst, err)
        ok = ok and err <= 1e-10
    record("assembly.form_consistency", ok, f"worst rel err {worst:.3e}")
    ones = np.ones(mesh.n_nodes)
    mass_total = float(ones @ (F1.M @ ones))
    record("assembly.mass_total", abs(mass_total - cfg.domain.area) <= 1e-10 * cfg.domain.area,
           f"1'M1 = {mass_total:.12g}")
    record("assembly.mass_positive", _negative_inertia(F1.M) == 0, "inertia check")
    if pair.leq_everywhere:
        B1 = F1.B_theta
        B2 = assemble_boundary_mass(mesh, theta2)
        record("assembly.boundary_monotone", _negative_inertia((B2 - B1).tocsr() +
               1e-14 * F1.M) == 0, "B(theta2) - B(theta1) PSD")
    combo = _combine_robin(mesh, theta1, theta2, 2.5)
    Bc = assemble_boundary_mass(mesh, combo)
    Blin = (F1.B_theta + 2.5 * assemble_boundary_mass(mesh, theta2)).tocsr()
    lin_defect = float(np.max(np.abs((Bc - Blin).toarray()))) if Bc.shape[0] else 0.0
    bscale = max(float(np.max(np.abs(Blin.toarray()))), 1.0)
    record("assembly.boundary_linear", lin_defect <= 1e-13 * bscale,
           f"defect {lin_defect:.3e}")

    # --- spectra ----------------------------------------------------------
    k = min(cfg.k_max, F1.n_nodes)
    spec1 = solve_pencil(F1, k, cluster_tol=cfg.cluster_tol, seed=seed)
    record("spectra.residuals", float(np.max(spec1.residuals)) <= 1e-9,
           f"max residual {np.max(spec1.residuals):.3e}")
    G = spec1.eigenvectors.conj().T @ (F1.M @ spec1.eigenvectors)
    ortho = float(np.max(np.abs(G - np.eye(k))))
    record("spectra.m_orthonormal", ortho <= 1e-9, f"defect {ortho:.3e}")
    lam1 = form_lower_bound(F1)
    record("spectra.lower_bound_is_lambda1",
           abs(lam1 - spec1.eigenvalues[0]) <= 1e-9 * (1 + abs(lam1)),
           f"lambda_1 = {lam1:.9g}")
    shifted = FormMatrices(
        S0=(F1.S0 + 2.75 * F1.M).tocsr(), B_theta=F1.B_theta, M=F1.M,
        n_nodes=F1.n_nodes,
    )
    spec_sh = solve_pencil(shifted, k, cluster_tol=cfg.cluster_tol, seed=seed)
    shift_err = float(np.max(np.abs(spec_sh.eigenvalues - spec1.eigenvalues - 2.75)))
    record("spectra.shift_invariance", shift_err <= 1e-8 * (1 + abs(spec1.eigenvalues[-1])),
           f"defect {shift_err:.3e}")
    ray = rayleigh(F1, spec1.eigenvectors[:, 0])
    record("spectra.rayleigh_matches", abs(ray - spec1.eigenvalues[0]) <= 1e-9 * (1 + abs(ray)),
           f"R(x_1) = {ray:.9g}")

    # small companion instance: exhaustive cross-checks
    small = mesh_uniform(cfg.domain, 10.0)
    while small.n_nodes * 4 <= 60:
        small = refine(small)
    Fs = assemble_form(small, c, theta1)
    spec_s = solve_pencil(Fs, cluster_tol=cfg.cluster_tol, seed=seed)
    ref = reference_eigenvalues(Fs.S_theta, Fs.M)
    ref_err = float(np.max(np.abs(ref - spec_s.eigenvalues)
                           / (1 + np.abs(ref))))
    record("spectra.reference_equivalence", ref_err <= 1e-8,
           f"N={Fs.n_nodes}, worst rel err {ref_err:.3e}")
    w = spec_s.eigenvalues
    ok = True
    for _ in range(5):
        mu = rng.uniform(w[0] - 1.0, w[-1] + 1.0)
        if np.min(np.abs(w - mu)) <= 10 * spec_s.tol_at(mu):
            continue  # stay away from tolerance boundaries
        n_count = counting(spec_s, mu)
        m = 0
        while m < len(w) and subspace_certificate(Fs, mu, spec_s.eigenvectors[:, : m + 1]):
            m += 1
        ok = ok and (n_count == m)
    record("spectra.counting_vs_certificate", ok, "random mu sweep")
    ok = True
    for _ in range(30):
        j = rng.randint(1, len(w) + 1)
        V = rng.standard_normal((Fs.n_nodes, j))
        G = V.T @ (Fs.M @ V)
        A = (V.T @ (Fs.S_theta @ V)).real
        # max Rayleigh quotient over span(V) via the projected pencil
        top = float(sla.eigh(0.5 * (A + A.T), 0.5 * (G + G.T),
                             eigvals_only=True)[-1])
        ok = ok and (top >= w[j - 1] - 1e-9)
    record("spectra.minmax_random_subspaces", ok, "30 random subspaces")

    # --- theorems ---------------------------------------------------------
    if pair.leq_everywhere and cfg.theta2 is not None:
        F2 = FormMatrices(F1.S0, assemble_boundary_mass(mesh, theta2), F1.M,
                          F1.n_nodes)
        record("theorems.weak_monotone_exact",
               weak_monotonicity_exact(F1, F2, k), f"k <= {k}")
        k_solve = min(F1.n_nodes, k + 8)
        s1 = solve_pencil(F1, k_solve, cluster_tol=cfg.cluster_tol, seed=seed)
        s2 = solve_pencil(F2, k_solve, cluster_tol=cfg.cluster_tol, seed=seed)
        rep = monotonicity_report(mesh, c, theta1, theta2, k,
                                  cluster_tol=cfg.cluster_tol,
                                  strict_tol=cfg.strict_tol, spectra=(s1, s2))
        record("theorems.weak_monotone_report", rep.weak_pass,
               f"min gap {np.min(rep.gaps):.3e}")
        ok = True
        detail = []
        for kk in range(min(5, k)):
            res = nid_check(s1, s2, float(s2.eigenvalues[kk]))
            ok = ok and res.passed
            detail.append(f"{res.n1}>={res.n2}+{res.dim_ker}")
        record("theorems.counting_inequality", ok, "; ".join(detail))
        if rep.strict_region.edge_ids:
            cert = trace_certificate(s2, mesh, rep.strict_region, min(5, k))
            record("theorems.trace_certificate", not cert.flagged,
                   f"min trace norm {np.min(cert.norms):.3e}")
    exact = [7.0 + 3.0 * 4.0 ** (-j) for j in range(4)]
    rich = richardson_extrapolate(exact)
    record("theorems.richardson_exact_quadratic",
           abs(rich.estimate - 7.0) <= 1e-12 and abs(rich.order - 2.0) <= 1e-12,
           f"estimate {rich.estimate:.12g}, order {rich.order:.6g}")
    try:
        richardson_extrapolate([1.0, 1.0, 1.0])
        record("theorems.richardson_flags_constant", False, "no error raised")
    except NonConvergent:
        record("theorems.richardson_flags_constant", True, "NonConvergent raised")

    return out
