"""P1 assembly of the interior form, boundary mass and mass matrices.

The interior form is

    a0[u, v] = int_Omega ( sum_jk a_jk d_k u conj(d_j v)
                           + sum_j ( a_j d_j u conj(v) + conj(a_j) u conj(d_j v) )
                           + a u conj(v) ) dx

discretized with piecewise-linear elements.  Interior integrals use the
edge-midpoint rule (exact for quadratics); boundary integrals use Gauss
quadrature per boundary edge.  The boundary term adds theta-weighted edge mass
matrices, so the discrete pencil is S_theta = S0 + B_theta against the mass
matrix M.

Global matrices are symmetrized entrywise after accumulation, which makes
S0 = S0^H hold exactly in floating point (the accumulated defect is itself a
few ulps and is checked separately in the invariant suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .coeffs import EllipticCoefficients, RobinCoefficient, edge_gauss_params
from .errors import QuadratureFailure, SingularBoundaryMass
from .geometry import BoundaryRegion, TriangleMesh

# values of the three hat functions at the three edge midpoints
_PHI_MID = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])

_MASS_LOCAL = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


@dataclass(frozen=True)
class FormMatrices:
    """Discrete form: S0 (interior), B_theta (boundary), M (mass), all N x N."""

    S0: sp.csr_matrix
    B_theta: sp.csr_matrix
    M: sp.csr_matrix
    n_nodes: int

    @property
    def S_theta(self) -> sp.csr_matrix:
        return (self.S0 + self.B_theta).tocsr()


@dataclass(frozen=True)
class BoundaryFunction:
    """Nodal values on the boundary: sorted node ids and matching values."""

    nodes: np.ndarray
    values: np.ndarray

    def to_full(self, n: int) -> np.ndarray:
        full = np.zeros(n, dtype=self.values.dtype)
        full[self.nodes] = self.values
        return full


def _tri_geometry(coords: np.ndarray):
    """Area and P1 gradient rows G (3 x 2) of one CCW triangle."""
    (x0, y0), (x1, y1), (x2, y2) = coords
    det = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
    area = 0.5 * det
    G = np.array(
        [
            [y1 - y2, x2 - x1],
            [y2 - y0, x0 - x2],
            [y0 - y1, x1 - x0],
        ]
    ) / det
    return area, G


def _hermitize(A):
    return 0.5 * (A + A.conj().T)


def assemble_a0(mesh: TriangleMesh, c: EllipticCoefficients) -> sp.csr_matrix:
    """Interior form matrix S0 (exactly Hermitian, real when possible)."""
    T = len(mesh.triangles)
    rows = np.empty(9 * T, dtype=int)
    cols = np.empty(9 * T, dtype=int)
    vals = np.empty(9 * T, dtype=complex)
    for t, tri in enumerate(mesh.triangles):
        coords = mesh.nodes[tri]
        area, G = _tri_geometry(coords)
        qpts = 0.5 * (coords + np.roll(coords, -1, axis=0))  # edge midpoints
        w = area / 3.0

        A2 = np.zeros((2, 2), dtype=complex)
        C1 = np.zeros((3, 3), dtype=complex)
        R = np.zeros((3, 3))
        for q, (xq, yq) in enumerate(qpts):
            Aq = np.asarray(c.a2(xq, yq), dtype=complex)
            bq = np.asarray(c.a1(xq, yq), dtype=complex)
            aq = float(c.a0(xq, yq))
            if not (np.all(np.isfinite(Aq)) and np.all(np.isfinite(bq)) and math.isfinite(aq)):
                raise QuadratureFailure(
                    f"non-finite coefficient at quadrature point ({xq:g}, {yq:g})"
                )
            A2 += w * Aq
            C1 += w * np.outer(_PHI_MID[q], G @ bq)
            R += (w * aq) * np.outer(_PHI_MID[q], _PHI_MID[q])
        local = G @ A2 @ G.T.conj()  # conj is a no-op: G real
        local = local + C1 + C1.conj().T + R
        local = _hermitize(local)
        k = 9 * t
        rows[k : k + 9] = np.repeat(tri, 3)
        cols[k : k + 9] = np.tile(tri, 3)
        vals[k : k + 9] = local.ravel()
    n = mesh.n_nodes
    S = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    S = 0.5 * (S + S.conj().T.tocsr())
    S.sort_indices()
    if not np.any(S.data.imag):
        S = sp.csr_matrix((S.data.real, S.indices, S.indptr), shape=S.shape)
    return S


def assemble_mass(mesh: TriangleMesh) -> sp.csr_matrix:
    """Mass matrix M; 1^T M 1 equals the mesh area."""
    T = len(mesh.triangles)
    rows = np.empty(9 * T, dtype=int)
    cols = np.empty(9 * T, dtype=int)
    vals = np.empty(9 * T)
    areas = mesh.triangle_areas()
    for t, tri in enumerate(mesh.triangles):
        k = 9 * t
        rows[k : k + 9] = np.repeat(tri, 3)
        cols[k : k + 9] = np.tile(tri, 3)
        vals[k : k + 9] = (areas[t] * _MASS_LOCAL).ravel()
    n = mesh.n_nodes
    M = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    M = 0.5 * (M + M.T.tocsr())
    M.sort_indices()
    return M


def assemble_boundary_mass(mesh: TriangleMesh, theta: RobinCoefficient,
                           region: BoundaryRegion | None = None,
                           quad_order: int = 2) -> sp.csr_matrix:
    """theta-weighted boundary mass matrix (N x N, supported on boundary nodes).

    With ``region`` given, only its edges contribute (used for norms over a
    boundary sub-arc).
    """
    if region is None:
        edges = list(mesh.boundary_edges)
    else:
        edges = [mesh.boundary_edges[i] for i in region.edge_ids]
    rows, cols, vals = [], [], []
    for e in edges:
        L = mesh.edge_length(e)
        ts, w = edge_gauss_params(e, quad_order)  # weights sum to 1
        th = theta.evaluate(e.label, ts)
        if not np.all(np.isfinite(th)):
            raise QuadratureFailure(f"non-finite boundary coefficient on '{e.label}'")
        s = (ts - e.t0) / (e.t1 - e.t0)
        psi = np.column_stack([1.0 - s, s])
        local = L * (psi.T * (w * th)) @ psi
        local = 0.5 * (local + local.T)
        for a, ia in enumerate((e.n1, e.n2)):
            for b, ib in enumerate((e.n1, e.n2)):
                rows.append(ia)
                cols.append(ib)
                vals.append(local[a, b])
    n = mesh.n_nodes
    B = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    B = 0.5 * (B + B.T.tocsr())
    B.sort_indices()
    return B


def assemble_form(mesh: TriangleMesh, c: EllipticCoefficients,
                  theta: RobinCoefficient) -> FormMatrices:
    """Assemble the full discrete form for one boundary coefficient."""
    return FormMatrices(
        S0=assemble_a0(mesh, c),
        B_theta=assemble_boundary_mass(mesh, theta),
        M=assemble_mass(mesh),
        n_nodes=mesh.n_nodes,
    )


def direct_form_value(mesh: TriangleMesh, c: EllipticCoefficients,
                      theta: RobinCoefficient, u, v) -> complex:
    """Evaluate a_theta[u, v] by direct quadrature, bypassing the matrices.

    Same quadrature rules as assembly; used as an independent consistency
    check of v^H S_theta u.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    total = 0.0 + 0.0j
    for tri in mesh.triangles:
        coords = mesh.nodes[tri]
        area, G = _tri_geometry(coords)
        qpts = 0.5 * (coords + np.roll(coords, -1, axis=0))
        w = area / 3.0
        gu = G.T @ u[tri]  # gradient of u on this triangle (constant)
        gv = G.T @ v[tri]
        for q, (xq, yq) in enumerate(qpts):
            Aq = np.asarray(c.a2(xq, yq), dtype=complex)
            bq = np.asarray(c.a1(xq, yq), dtype=complex)
            aq = float(c.a0(xq, yq))
            uq = _PHI_MID[q] @ u[tri]
            vq = _PHI_MID[q] @ v[tri]
            total += w * (
                np.conj(gv) @ Aq @ gu
                + (bq @ gu) * np.conj(vq)
                + (np.conj(bq) @ gv.conj()) * uq
                + aq * uq * np.conj(vq)
            )
    for e in mesh.boundary_edges:
        L = mesh.edge_length(e)
        ts, w = edge_gauss_params(e)
        th = theta.evaluate(e.label, ts)
        s = (ts - e.t0) / (e.t1 - e.t0)
        ue = u[e.n1] * (1.0 - s) + u[e.n2] * s
        ve = v[e.n1] * (1.0 - s) + v[e.n2] * s
        total += L * np.sum(w * th * ue * np.conj(ve))
    return complex(total)


# -- boundary traces and the conormal derivative ------------------------------


def _boundary_block(mesh: TriangleMesh, bnodes: np.ndarray) -> np.ndarray:
    """Dense theta=1 boundary mass restricted to the boundary nodes."""
    from .coeffs import robin_constant

    Bfull = assemble_boundary_mass(mesh, robin_constant(1.0))
    return Bfull[np.ix_(bnodes, bnodes)].toarray()


def conormal_recover(mesh: TriangleMesh, c: EllipticCoefficients, u, lam,
                     form: FormMatrices | None = None) -> BoundaryFunction:
    """Discrete conormal derivative of an eigenpair (u, lam).

    Solves the boundary-mass system B g = (S0 - lam M) u restricted to the
    boundary nodes: the weak analogue of reading the conormal derivative off
    the first Green identity.  For an exact discrete eigenpair of the
    theta-problem, g approximates -theta * u on the boundary.

    Pass ``form`` to reuse already assembled matrices.
    """
    u = np.asarray(u)
    if form is None:
        S0 = assemble_a0(mesh, c)
        M = assemble_mass(mesh)
    else:
        S0, M = form.S0, form.M
    r = S0 @ u - lam * (M @ u)
    bnodes = mesh.boundary_nodes
    B = _boundary_block(mesh, bnodes)
    try:
        g = np.linalg.solve(B, r[bnodes])
    except np.linalg.LinAlgError as exc:
        raise SingularBoundaryMass(str(exc)) from exc
    # interior residual should vanish for a true eigenpair; the boundary solve
    # only uses boundary rows, so no further projection is needed
    return BoundaryFunction(nodes=bnodes, values=g)


def boundary_l2_norm(mesh: TriangleMesh, w, region: BoundaryRegion | None = None) -> float:
    """L2 norm over the boundary (or a sub-region) of a P1 nodal function.

    ``w`` is either a full nodal vector or a BoundaryFunction.  Uses the exact
    edgewise formula for piecewise-linear integrands.
    """
    if isinstance(w, BoundaryFunction):
        w = w.to_full(mesh.n_nodes)
    else:
        w = np.asarray(w)
    if region is None:
        edges = mesh.boundary_edges
    else:
        edges = [mesh.boundary_edges[i] for i in region.edge_ids]
    acc = 0.0
    for e in edges:
        L = mesh.edge_length(e)
        w1, w2 = w[e.n1], w[e.n2]
        acc += L / 3.0 * (abs(w1) ** 2 + abs(w2) ** 2 + (w1 * np.conj(w2)).real)
    return math.sqrt(max(acc, 0.0))


def robin_residual(mesh: TriangleMesh, c: EllipticCoefficients, u, lam,
                   theta: RobinCoefficient, form: FormMatrices | None = None) -> float:
    """|| g + theta * u ||_{L2(boundary)} for the recovered conormal g.

    Converges to zero under refinement when (u, lam) converges to an
    eigenpair of the theta-problem.
    """
    u = np.asarray(u)
    g = conormal_recover(mesh, c, u, lam, form=form).to_full(mesh.n_nodes)
    acc = 0.0
    for e in mesh.boundary_edges:
        L = mesh.edge_length(e)
        ts, w = edge_gauss_params(e, order=3)
        th = theta.evaluate(e.label, ts)
        s = (ts - e.t0) / (e.t1 - e.t0)
        ge = g[e.n1] * (1.0 - s) + g[e.n2] * s
        ue = u[e.n1] * (1.0 - s) + u[e.n2] * s
        acc += L * float(np.sum(w * np.abs(ge + th * ue) ** 2))
    return math.sqrt(acc)


# -- matrix text format --------------------------------------------------------


def save_matrix(A, path) -> None:
    """Write a sparse Hermitian matrix as '%%matrix hermitian N N nnz' + entries.

    One line per stored entry: 'i j re im' with 0-based indices and 17
    significant digits.
    """
    A = sp.csr_matrix(A)
    A.sort_indices()
    coo = A.tocoo()
    lines = [f"%%matrix hermitian {A.shape[0]} {A.shape[1]} {A.nnz}"]
    data = coo.data.astype(complex)
    for i, j, v in zip(coo.row, coo.col, data):
        lines.append(f"{i} {j} {v.real:.17g} {v.imag:.17g}")
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def load_matrix(path) -> sp.csr_matrix:
    """Read a matrix written by save_matrix."""
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path) as f:
            text = f.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "%%matrix" or head[1] != "hermitian":
        raise ValueError("expected '%%matrix hermitian N N nnz' header")
    n, m, nnz = int(head[2]), int(head[3]), int(head[4])
    if len(lines) - 1 != nnz:
        raise ValueError(f"expected {nnz} entries, found {len(lines) - 1}")
    rows = np.empty(nnz, dtype=int)
    cols = np.empty(nnz, dtype=int)
    vals = np.empty(nnz, dtype=complex)
    for k, ln in enumerate(lines[1:]):
        i, j, re, im = ln.split()
        rows[k], cols[k] = int(i), int(j)
        vals[k] = float(re) + 1j * float(im)
    A = sp.coo_matrix((vals, (rows, cols)), shape=(n, m)).tocsr()
    A.sort_indices()
    if not np.any(A.data.imag):
        A = sp.csr_matrix((A.data.real, A.indices, A.indptr), shape=A.shape)
    return A
