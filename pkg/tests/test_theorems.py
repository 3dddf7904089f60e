import numpy as np
import pytest
from numpy.testing import assert_allclose

import robineig as rb
from robineig.errors import (
    ComparisonFailed,
    MismatchedMeshes,
    NonConvergent,
)


# -- monotonicity -------------------------------------------------------------


def test_monotonicity_constant_pair(mesh8, lap):
    rep = rb.monotonicity_report(mesh8, lap, rb.robin_constant(0.0),
                                 rb.robin_constant(1.0), k_max=10)
    assert rep.weak_pass
    assert rep.strict_pass
    assert np.all(rep.gaps > 0)
    assert len(rep.gaps) == 10
    assert_allclose(rep.gaps, rep.eigenvalues2 - rep.eigenvalues1)
    assert_allclose(rep.strict_region.total_length, 4.0)


def test_monotonicity_indicator_pair(mesh8, lap):
    rep = rb.monotonicity_report(mesh8, lap, rb.robin_constant(0.0),
                                 rb.robin_indicator(["bottom"], 1.0), k_max=10)
    assert rep.weak_pass and rep.strict_pass
    assert_allclose(rep.strict_region.total_length, 1.0)
    # perturbing only one side moves eigenvalues less than perturbing all four
    full = rb.monotonicity_report(mesh8, lap, rb.robin_constant(0.0),
                                  rb.robin_constant(1.0), k_max=10)
    assert np.all(rep.gaps <= full.gaps + 1e-12)


def test_monotonicity_equal_coefficients(mesh8, lap):
    th = rb.robin_constant(1.0)
    rep = rb.monotonicity_report(mesh8, lap, th, rb.robin_constant(1.0), k_max=6)
    assert rep.weak_pass
    assert not rep.strict_pass  # zero gaps cannot be certified strict
    assert np.all(np.abs(rep.gaps) < 1e-9)


def test_monotonicity_hypothesis_violation(mesh8, lap):
    with pytest.raises(ComparisonFailed):
        rb.monotonicity_report(mesh8, lap, rb.robin_constant(1.0),
                               rb.robin_constant(0.0), k_max=4)


def test_monotonicity_reuses_spectra(mesh8, lap):
    th1, th2 = rb.robin_constant(0.0), rb.robin_constant(1.0)
    s1 = rb.solve_pencil(rb.assemble_form(mesh8, lap, th1), 6)
    s2 = rb.solve_pencil(rb.assemble_form(mesh8, lap, th2), 6)
    rep = rb.monotonicity_report(mesh8, lap, th1, th2, k_max=6, spectra=(s1, s2))
    assert_allclose(rep.eigenvalues1, s1.eigenvalues[:6])
    assert_allclose(rep.eigenvalues2, s2.eigenvalues[:6])


def test_weak_monotonicity_exact_matrix_level(mesh8, lap):
    F1 = rb.assemble_form(mesh8, lap, rb.robin_constant(0.0))
    F2 = rb.assemble_form(mesh8, lap, rb.robin_constant(0.5))
    assert rb.weak_monotonicity_exact(F1, F2, k_max=12)


def test_weak_monotonicity_mismatched_meshes(mesh8, mesh16, lap):
    F1 = rb.assemble_form(mesh8, lap, rb.robin_constant(0.0))
    F2 = rb.assemble_form(mesh16, lap, rb.robin_constant(1.0))
    with pytest.raises(MismatchedMeshes):
        rb.weak_monotonicity_exact(F1, F2, k_max=4)


# -- counting-function inequality ----------------------------------------------


def _nid_pair(mesh, lap, k=12):
    th1 = rb.robin_constant(0.0)
    th2 = rb.robin_indicator(["bottom"], 1.0)
    s1 = rb.solve_pencil(rb.assemble_form(mesh, lap, th1), k + 6)
    s2 = rb.solve_pencil(rb.assemble_form(mesh, lap, th2), k + 6)
    return s1, s2


def test_nid_at_second_spectrum_eigenvalues(mesh8, lap):
    s1, s2 = _nid_pair(mesh8, lap)
    for k in range(8):
        res = rb.nid_check(s1, s2, float(s2.eigenvalues[k]))
        assert res.passed
        assert res.n1 >= res.n2 + res.dim_ker
        # mu snapped onto the theta2 eigenvalue it was queried at
        assert_allclose(res.mu, s2.eigenvalues[k])


def test_nid_on_grid(mesh8, lap):
    s1, s2 = _nid_pair(mesh8, lap)
    hi = float(min(s1.eigenvalues[-1], s2.eigenvalues[-1]))
    hi -= 3.0 * max(s1.tol_at(hi), s2.tol_at(hi))  # stay inside both windows
    for mu in np.linspace(-1.0, hi, 40):
        res = rb.nid_check(s1, s2, float(mu))
        assert res.passed


def test_nid_kernel_dimension_counts(mesh8, lap):
    s1, s2 = _nid_pair(mesh8, lap)
    # at a theta1 eigenvalue the kernel term is its multiplicity
    mu = float(s1.eigenvalues[1])  # double Neumann eigenvalue pi^2
    res = rb.nid_check(s1, s2, mu)
    assert res.dim_ker == 2
    assert res.passed


# -- boundary trace certificate -------------------------------------------------


def test_trace_certificate_clean(mesh8, lap):
    th2 = rb.robin_indicator(["bottom"], 1.0)
    spec = rb.solve_pencil(rb.assemble_form(mesh8, lap, th2), 6)
    region = rb.boundary_region(mesh8, "bottom")
    cert = rb.trace_certificate(spec, mesh8, region, k_max=6)
    assert cert.flagged == ()
    assert np.all(cert.norms > cert.tol)


def test_trace_certificate_flags_vanishing_trace(mesh8, lap):
    # Dirichlet-like data: a vector supported away from the bottom edge has
    # zero trace norm there and must be flagged
    th2 = rb.robin_indicator(["bottom"], 1.0)
    spec = rb.solve_pencil(rb.assemble_form(mesh8, lap, th2), 2)
    region = rb.boundary_region(mesh8, "bottom")
    doctored = spec.eigenvectors.copy()
    bottom_nodes = np.abs(mesh8.nodes[:, 1]) < 1e-14
    doctored[bottom_nodes, 0] = 0.0
    fake = rb.Spectrum(eigenvalues=spec.eigenvalues,
                       eigenvectors=doctored,
                       residuals=spec.residuals,
                       cluster_tol=spec.cluster_tol,
                       clusters=spec.clusters,
                       complete=spec.complete)
    cert = rb.trace_certificate(fake, mesh8, region, k_max=2)
    assert 0 in cert.flagged
    assert 1 not in cert.flagged


# -- eigencurves ----------------------------------------------------------------


def test_eigencurve_sweep_monotone(mesh8, lap):
    th1, th2 = rb.robin_constant(0.0), rb.robin_constant(1.0)
    t = np.linspace(0.0, 1.0, 6)
    table = rb.eigencurve_sweep(mesh8, lap, th1, th2, t, k_max=5)
    assert table.eigenvalues.shape == (6, 5)
    assert np.all(np.diff(table.eigenvalues, axis=0) >= -1e-9)
    # endpoints agree with direct solves
    s1 = rb.solve_pencil(rb.assemble_form(mesh8, lap, th1), 5)
    s2 = rb.solve_pencil(rb.assemble_form(mesh8, lap, th2), 5)
    assert_allclose(table.eigenvalues[0], s1.eigenvalues, atol=1e-9)
    assert_allclose(table.eigenvalues[-1], s2.eigenvalues, atol=1e-9)


def test_eigencurve_sweep_validates_t(mesh8, lap):
    th1, th2 = rb.robin_constant(0.0), rb.robin_constant(1.0)
    with pytest.raises(ValueError):
        rb.eigencurve_sweep(mesh8, lap, th1, th2, [0.0, 0.5, 0.5, 1.0], k_max=3)
    with pytest.raises(ValueError):
        rb.eigencurve_sweep(mesh8, lap, th1, th2, [-0.1, 0.5, 1.0], k_max=3)


def test_eigencurve_sweep_checks_order(mesh8, lap):
    with pytest.raises(ComparisonFailed):
        rb.eigencurve_sweep(mesh8, lap, rb.robin_constant(1.0),
                            rb.robin_constant(0.0), [0.0, 1.0], k_max=3)


# -- Richardson extrapolation ---------------------------------------------------


def test_richardson_exact_on_model_sequence():
    # v(h) = L + C h^2 sampled at h, h/2, h/4 extrapolates to L exactly
    L, C = 3.7, 2.0
    hs = np.array([0.4, 0.2, 0.1])
    res = rb.richardson_extrapolate(L + C * hs**2)
    assert_allclose(res.estimate, L, atol=1e-12)
    assert_allclose(res.order, 2.0, atol=1e-12)


def test_richardson_first_order_sequence():
    L, C = -1.25, 0.8
    hs = np.array([0.4, 0.2, 0.1])
    res = rb.richardson_extrapolate(L + C * hs)
    assert_allclose(res.estimate, L, atol=1e-12)
    assert_allclose(res.order, 1.0, atol=1e-12)


def test_richardson_uses_finest_three_levels():
    # a garbage coarse value must not affect the finest-three extrapolation
    L, C = 2.0, 1.0
    hs = np.array([0.8, 0.4, 0.2, 0.1])
    vals = L + C * hs**2
    vals_with_junk = np.concatenate([[999.0], vals[1:]])
    res = rb.richardson_extrapolate(vals_with_junk)
    assert_allclose(res.estimate, L, atol=1e-12)


def test_richardson_rejects_nonconvergent():
    with pytest.raises(NonConvergent):
        rb.richardson_extrapolate([1.0, 2.0, 3.0])  # ratio 1: no decay
    with pytest.raises(NonConvergent):
        rb.richardson_extrapolate([1.0, 1.1, 1.05])  # oscillating signs
    with pytest.raises(NonConvergent):
        rb.richardson_extrapolate([1.0, 1.0, 1.0])  # zero differences
    with pytest.raises(ValueError):
        rb.richardson_extrapolate([1.0, 2.0])  # too short


def test_richardson_on_actual_eigenvalue_sequence(unit_square, lap):
    # lambda_2 of the Neumann square over three uniform refinements
    vals = []
    for ht in (1 / 4, 1 / 8, 1 / 16):
        mesh = rb.mesh_uniform(unit_square, ht)
        F = rb.assemble_form(mesh, lap, rb.robin_constant(0.0))
        vals.append(float(rb.solve_pencil(F, 2).eigenvalues[1]))
    res = rb.richardson_extrapolate(vals)
    pi2 = np.pi * np.pi
    assert abs(res.estimate - pi2) < 1e-4 * pi2
    assert 1.7 < res.order < 2.3
