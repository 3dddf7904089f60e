"""Coefficient fields for the differential expression and the boundary term.

The second-order operator is - sum_jk d_j a_jk d_k + sum_j (a_j d_j - d_j conj(a_j) .)
+ a with a Hermitian matrix field a_jk, a complex vector field a_j and a real
scalar field a.  The boundary condition carries a real coefficient theta given
per arc label as a function of normalized arc length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import LabelMissing, NotElliptic
from .geometry import BoundaryRegion, TriangleMesh

_TGRID = np.linspace(0.0, 1.0, 1025)


@dataclass(frozen=True)
class EllipticCoefficients:
    """Pointwise evaluators (x, y) -> a2 (2x2 complex), a1 (2 complex), a0 (real).

    ``claimed_E`` is the ellipticity constant the coefficients are asserted to
    satisfy; check_ellipticity verifies the claim by sampling.
    """

    a2: Callable[[float, float], np.ndarray]
    a1: Callable[[float, float], np.ndarray]
    a0: Callable[[float, float], float]
    claimed_E: float


@dataclass(frozen=True)
class RobinCoefficient:
    """Real boundary coefficient, one callable of t in [0, 1] per arc label.

    ``default`` applies to labels without their own entry; ``bound`` is a
    sup-norm bound used in form lower-bound estimates.
    """

    per_label: Mapping[str, Callable[[float], float]]
    default: Callable[[float], float] | None
    bound: float

    def evaluate(self, label: str, t) -> np.ndarray:
        fn = self.per_label.get(label, self.default)
        if fn is None:
            raise LabelMissing(f"no boundary coefficient for label '{label}'")
        t = np.asarray(t, dtype=float)
        vals = np.asarray([fn(float(ti)) for ti in np.atleast_1d(t)], dtype=float)
        return vals if t.ndim else vals[0]


# -- catalog: interior coefficients -------------------------------------------


def laplacian() -> EllipticCoefficients:
    """a2 = I, a1 = 0, a0 = 0: the Neumann/Robin Laplacian."""
    eye = np.eye(2, dtype=complex)
    zero2 = np.zeros(2, dtype=complex)
    return EllipticCoefficients(
        a2=lambda x, y: eye,
        a1=lambda x, y: zero2,
        a0=lambda x, y: 0.0,
        claimed_E=1.0,
    )


def constant_coefficients(a2, a1=(0.0, 0.0), a0=0.0, claimed_E=None) -> EllipticCoefficients:
    """Constant-in-space coefficients; E defaults to lambda_min of sym Re a2."""
    A = np.array(a2, dtype=complex)
    b = np.array(a1, dtype=complex)
    c = float(a0)
    if claimed_E is None:
        claimed_E = _sym_min_eig(A)
    return EllipticCoefficients(
        a2=lambda x, y: A,
        a1=lambda x, y: b,
        a0=lambda x, y: c,
        claimed_E=float(claimed_E),
    )


def _sym_min_eig(A: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetrized real part of a 2x2 matrix."""
    M = 0.5 * (A.real + A.real.T)
    half_tr = 0.5 * (M[0, 0] + M[1, 1])
    rad = math.hypot(0.5 * (M[0, 0] - M[1, 1]), M[0, 1])
    return float(half_tr - rad)


_POLY_KEYS = ("1", "x", "y", "xx", "xy", "yy")


def _poly_eval(coeffs: Mapping[str, float]):
    c = {k: float(coeffs.get(k, 0.0)) for k in _POLY_KEYS}

    def p(x, y):
        return (
            c["1"]
            + c["x"] * x
            + c["y"] * y
            + c["xx"] * x * x
            + c["xy"] * x * y
            + c["yy"] * y * y
        )

    return p


def isotropic_poly(coeffs, claimed_E) -> EllipticCoefficients:
    """a2 = p(x, y) * I for a quadratic polynomial p; a1 = 0, a0 = 0."""
    p = _poly_eval(coeffs)
    zero2 = np.zeros(2, dtype=complex)

    def a2(x, y):
        return p(x, y) * np.eye(2, dtype=complex)

    return EllipticCoefficients(a2=a2, a1=lambda x, y: zero2,
                                a0=lambda x, y: 0.0, claimed_E=float(claimed_E))


def anisotropic_trig(d1=2.0, d2=2.0, amp=0.5, off=0.5, claimed_E=None) -> EllipticCoefficients:
    """a2 = [[d1 + amp sin(pi x), off], [off, d2 + amp cos(pi y)]], real symmetric."""
    if claimed_E is None:
        claimed_E = min(d1, d2) - amp - abs(off)

    def a2(x, y):
        return np.array(
            [
                [d1 + amp * math.sin(math.pi * x), off],
                [off, d2 + amp * math.cos(math.pi * y)],
            ],
            dtype=complex,
        )

    zero2 = np.zeros(2, dtype=complex)
    return EllipticCoefficients(a2=a2, a1=lambda x, y: zero2,
                                a0=lambda x, y: 0.0, claimed_E=float(claimed_E))


_A2_CATALOG = ("identity", "diagonal", "constant", "iso_poly", "aniso_trig")
_A1_CATALOG = ("zero", "constant")
_A0_CATALOG = ("zero", "constant", "poly", "trig")


def _complex_matrix(entry, shape):
    re = np.array(entry.get("re", np.zeros(shape)), dtype=float)
    im = np.array(entry.get("im", np.zeros(shape)), dtype=float)
    return re + 1j * im


def coefficients_from_config(cfg: Mapping) -> EllipticCoefficients:
    """Build coefficients from a config mapping (see README for the schema)."""
    if cfg is None or cfg == {} or cfg.get("name") == "laplacian":
        return laplacian()

    a2_cfg = cfg.get("a2", {"name": "identity"})
    name = a2_cfg.get("name", "constant")
    if name == "identity":
        eye = np.eye(2, dtype=complex)
        a2 = lambda x, y: eye
        E_default = 1.0
    elif name == "diagonal":
        d = np.diag(np.array(a2_cfg["values"], dtype=float)).astype(complex)
        a2 = lambda x, y: d
        E_default = float(min(a2_cfg["values"]))
    elif name == "constant":
        A = _complex_matrix(a2_cfg, (2, 2))
        a2 = lambda x, y: A
        E_default = _sym_min_eig(A)
    elif name == "iso_poly":
        p = _poly_eval(a2_cfg["coeffs"])
        a2 = lambda x, y: p(x, y) * np.eye(2, dtype=complex)
        E_default = None  # must be claimed explicitly
    elif name == "aniso_trig":
        base = anisotropic_trig(
            d1=a2_cfg.get("d1", 2.0),
            d2=a2_cfg.get("d2", 2.0),
            amp=a2_cfg.get("amp", 0.5),
            off=a2_cfg.get("off", 0.5),
        )
        a2 = base.a2
        E_default = base.claimed_E
    else:
        raise KeyError(f"unknown a2 catalog entry '{name}' (choose from {_A2_CATALOG})")

    a1_cfg = cfg.get("a1", {"name": "zero"})
    name = a1_cfg.get("name", "constant")
    zero2 = np.zeros(2, dtype=complex)
    if name == "zero":
        a1 = lambda x, y: zero2
    elif name == "constant":
        b = _complex_matrix(a1_cfg, (2,))
        a1 = lambda x, y: b
    else:
        raise KeyError(f"unknown a1 catalog entry '{name}' (choose from {_A1_CATALOG})")

    a0_cfg = cfg.get("a0", {"name": "zero"})
    name = a0_cfg.get("name", "constant")
    if name == "zero":
        a0 = lambda x, y: 0.0
    elif name == "constant":
        v = float(a0_cfg["value"])
        a0 = lambda x, y: v
    elif name == "poly":
        a0 = _poly_eval(a0_cfg["coeffs"])
    elif name == "trig":
        amp = float(a0_cfg.get("amp", 1.0))
        a0 = lambda x, y: amp * math.cos(math.pi * x) * math.cos(math.pi * y)
    else:
        raise KeyError(f"unknown a0 catalog entry '{name}' (choose from {_A0_CATALOG})")

    claimed_E = cfg.get("claimed_E", E_default)
    if claimed_E is None:
        raise KeyError("claimed_E required for this coefficient family")
    return EllipticCoefficients(a2=a2, a1=a1, a0=a0, claimed_E=float(claimed_E))


# -- catalog: boundary coefficients -------------------------------------------


def robin_constant(value: float) -> RobinCoefficient:
    """theta identically equal to ``value`` on every labelled arc."""
    v = float(value)
    return RobinCoefficient(per_label={}, default=lambda t: v, bound=abs(v))


def robin_indicator(labels, value=1.0, elsewhere=0.0) -> RobinCoefficient:
    """theta = value on the given labels, ``elsewhere`` on the rest."""
    if isinstance(labels, str):
        labels = [labels]
    v, w = float(value), float(elsewhere)
    per = {str(s): (lambda t, v=v: v) for s in labels}
    return RobinCoefficient(per_label=per, default=lambda t: w,
                            bound=max(abs(v), abs(w)))


def robin_from_callables(per_label=None, default=None, bound=None) -> RobinCoefficient:
    """Wrap raw callables; the sup bound is sampled on a fine grid if absent."""
    per_label = dict(per_label or {})
    if bound is None:
        cands = [0.0]
        for fn in list(per_label.values()) + ([] if default is None else [default]):
            cands.append(max(abs(fn(float(t))) for t in _TGRID))
        bound = max(cands)
    return RobinCoefficient(per_label=per_label, default=default, bound=float(bound))


def _robin_entry(entry) -> Callable[[float], float]:
    if isinstance(entry, (int, float)):
        v = float(entry)
        return lambda t: v
    name = entry.get("name", "constant")
    if name == "constant":
        v = float(entry["value"])
        return lambda t: v
    if name == "linear":
        a, b = float(entry.get("a", 0.0)), float(entry.get("b", 1.0))
        return lambda t: a + b * t
    if name == "trig":
        mean = float(entry.get("mean", 0.0))
        amp = float(entry.get("amp", 1.0))
        freq = float(entry.get("freq", 1.0))
        return lambda t: mean + amp * math.sin(2.0 * math.pi * freq * t)
    if name == "bump":
        amp = float(entry.get("amp", 1.0))
        return lambda t: amp * t * (1.0 - t)
    raise KeyError(f"unknown boundary coefficient entry '{name}'")


def robin_from_config(cfg) -> RobinCoefficient:
    """Build a RobinCoefficient from a config value (number or mapping)."""
    if isinstance(cfg, (int, float)):
        return robin_constant(cfg)
    default = _robin_entry(cfg["default"]) if "default" in cfg else None
    per = {str(k): _robin_entry(v) for k, v in cfg.get("per_label", {}).items()}
    return robin_from_callables(per_label=per, default=default, bound=cfg.get("bound"))


# -- checks -------------------------------------------------------------------


@dataclass(frozen=True)
class HermitianReport:
    passed: bool
    max_violation: float
    worst_point: tuple[float, float]


@dataclass(frozen=True)
class EllipticityReport:
    estimate: float
    claimed_E: float
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    """Pointwise ordering of two boundary coefficients on one mesh."""

    leq_everywhere: bool
    strict_edges: BoundaryRegion
    max_violation: float


def check_hermitian(c: EllipticCoefficients, samples, tol=1e-12) -> HermitianReport:
    """Largest |a_jk - conj(a_kj)| over the sample points."""
    worst = 0.0
    worst_pt = (math.nan, math.nan)
    for x, y in np.atleast_2d(np.asarray(samples, dtype=float)):
        A = np.asarray(c.a2(x, y), dtype=complex)
        v = float(np.max(np.abs(A - A.conj().T)))
        if v > worst:
            worst, worst_pt = v, (float(x), float(y))
    return HermitianReport(passed=worst <= tol, max_violation=worst, worst_point=worst_pt)


def check_ellipticity(c: EllipticCoefficients, samples, directions=None) -> EllipticityReport:
    """Smallest eigenvalue of the symmetrized real part over the samples.

    With ``directions`` given (unit vectors, shape (m, 2)), minimizes the
    Rayleigh quotient xi^T Re(a2) xi over those directions instead of using
    the closed-form 2x2 eigenvalue.  Raises NotElliptic when the estimate is
    not positive.
    """
    est = math.inf
    for x, y in np.atleast_2d(np.asarray(samples, dtype=float)):
        A = np.asarray(c.a2(x, y), dtype=complex)
        if directions is None:
            val = _sym_min_eig(A)
        else:
            D = np.asarray(directions, dtype=float)
            M = 0.5 * (A.real + A.real.T)
            quad = np.einsum("ij,jk,ik->i", D, M, D) / np.einsum("ij,ij->i", D, D)
            val = float(np.min(quad))
        est = min(est, val)
    if est <= 0:
        raise NotElliptic(f"ellipticity estimate {est:g} is not positive")
    return EllipticityReport(estimate=est, claimed_E=c.claimed_E, passed=est >= c.claimed_E)


def edge_gauss_params(edge, order=2):
    """Gauss point parameters of an edge, in its segment's t chart."""
    x, w = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (x + 1.0)
    return edge.t0 + s * (edge.t1 - edge.t0), 0.5 * w


def robin_compare(theta1: RobinCoefficient, theta2: RobinCoefficient,
                  mesh: TriangleMesh, quad_order=2) -> ComparisonReport:
    """Compare theta1 <= theta2 at every boundary quadrature node.

    strict_edges collects the edges where theta2 - theta1 is strictly positive
    at all of the edge's quadrature nodes (the region where a strict gap is
    certified).
    """
    leq = True
    violation = 0.0
    strict_ids = []
    strict_len = 0.0
    for i, e in enumerate(mesh.boundary_edges):
        ts, _ = edge_gauss_params(e, quad_order)
        v1 = theta1.evaluate(e.label, ts)
        v2 = theta2.evaluate(e.label, ts)
        diff = v2 - v1
        violation = max(violation, float(np.max(-diff)))
        if np.any(diff < -1e-12):
            leq = False
        if np.all(diff > 0):
            strict_ids.append(i)
            strict_len += mesh.edge_length(e)
    return ComparisonReport(
        leq_everywhere=leq,
        strict_edges=BoundaryRegion(edge_ids=tuple(strict_ids), total_length=strict_len),
        max_violation=max(0.0, violation),
    )
