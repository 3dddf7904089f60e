"""Generalized Hermitian eigenvalue computations for the discrete pencil.

solve_pencil computes the bottom of the spectrum of S x = lambda M x (S
Hermitian, M symmetric positive definite): dense LAPACK below a size cutoff,
ARPACK shift-invert above it, with a shift certified to sit below the smallest
eigenvalue (inertia of S - sigma*M via a symmetric sparse factorization).

reference_eigenvalues is a deliberately independent dense route used to
cross-check solve_pencil: complex problems are embedded into real symmetric
ones, M is reduced by a hand-written Cholesky factorization, the standard
problem is tridiagonalized by Householder reflections and the eigenvalues are
extracted by Sturm-sequence bisection.  No library eigensolver is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import FormMatrices
from .errors import (
    ConvergenceFailure,
    DependentVectors,
    InsufficientSpectrum,
    NotPositiveDefinite,
    ZeroVector,
)

DENSE_CUTOFF = 2000
RESIDUAL_TOL = 1e-9
ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Bottom of a pencil's spectrum: ascending eigenvalues, M-orthonormal
    eigenvectors (columns), per-pair relative residuals, and the grouping of
    eigenvalues into clusters at relative tolerance cluster_tol."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    cluster_tol: float
    clusters: tuple[tuple[int, ...], ...]
    complete: bool

    def tol_at(self, x: float) -> float:
        return self.cluster_tol * (1.0 + abs(float(x)))

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def cluster_ids(self) -> np.ndarray:
        ids = np.empty(self.k, dtype=int)
        for ci, group in enumerate(self.clusters):
            for j in group:
                ids[j] = ci
        return ids


def _as_pencil(F):
    if isinstance(F, FormMatrices):
        return F.S_theta, F.M
    S, M = F
    return sp.csr_matrix(S), sp.csr_matrix(M)


def _cluster_indices(w: np.ndarray, cluster_tol: float):
    clusters = []
    group = [0]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= cluster_tol * (1.0 + abs(w[i - 1])):
            group.append(i)
        else:
            clusters.append(tuple(group))
            group = [i]
    if len(w):
        clusters.append(tuple(group))
    return tuple(clusters)


def _phase_normalize(X: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column real and positive.

    Near-ties (within 1e-12 relative) resolve to the lowest index, so the
    convention is reproducible across solvers.
    """
    X = X.copy()
    for j in range(X.shape[1]):
        mag = np.abs(X[:, j])
        top = mag.max()
        if top == 0.0:
            continue
        i = int(np.nonzero(mag >= top * (1.0 - 1e-12))[0][0])
        pivot = X[i, j]
        if np.iscomplexobj(X):
            X[:, j] *= np.conj(pivot) / abs(pivot)
        elif pivot < 0:
            X[:, j] *= -1.0
    return X


def _gershgorin_lower(A: sp.csr_matrix) -> float:
    A = sp.csr_matrix(A)
    diag = A.diagonal().real
    absA = abs(A)
    row_sums = np.asarray(absA.sum(axis=1)).ravel() - np.abs(A.diagonal())
    return float(np.min(diag - row_sums))


def _negative_inertia(A: sp.csr_matrix) -> int:
    """Number of negative eigenvalues of a sparse real symmetric matrix,
    from the U diagonal of a diagonal-pivoted symmetric LU factorization."""
    lu = spla.splu(
        sp.csc_matrix(A),
        diag_pivot_thresh=0.0,
        permc_spec="MMD_AT_PLUS_A",
        options={"SymmetricMode": True},
    )
    return int(np.sum(lu.U.diagonal().real < 0))


def _certified_shift(S: sp.csr_matrix, M: sp.csr_matrix) -> float:
    """A shift strictly below the smallest pencil eigenvalue.

    Starts just under the cheap Rayleigh upper bound min_j S_jj / M_jj and
    lowers geometrically until the inertia of S - sigma*M certifies that no
    eigenvalue lies below sigma.
    """
    dS = S.diagonal().real
    dM = M.diagonal().real
    upper = float(np.min(dS / dM))
    step = 1.0 + 0.01 * abs(upper)
    sigma = upper - step
    if np.iscomplexobj(S.data):
        # real embedding preserves inertia (eigenvalues doubled)
        Sr = sp.bmat([[S.real, -S.imag], [S.imag, S.real]])
        Mr = sp.bmat([[M, None], [None, M]]).tocsr()
    else:
        Sr, Mr = S, M
    for _ in range(60):
        try:
            if _negative_inertia((Sr - sigma * Mr).tocsr()) == 0:
                return sigma
        except RuntimeError:
            pass  # singular factorization: sigma hit an eigenvalue; back off
        step *= 4.0
        sigma = upper - step
    raise ConvergenceFailure("could not certify a shift below the spectrum")


def solve_pencil(F, k=None, *, cluster_tol=1e-6, dense_cutoff=DENSE_CUTOFF,
                 seed=0) -> Spectrum:
    """Smallest k eigenpairs of S_theta x = lambda M x (all of them if k=None).

    Deterministic: dense solves are, and the sparse path uses a fixed ARPACK
    start vector derived from ``seed``.  Raises NotPositiveDefinite when M is
    not positive definite and ConvergenceFailure when the solver cannot meet
    the residual/orthogonality contract.
    """
    S, M = _as_pencil(F)
    n = S.shape[0]
    if k is None:
        k = n
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")

    if n <= dense_cutoff or k >= n - 1:
        Sd = S.toarray()
        Md = M.toarray()
        try:
            w, X = scipy.linalg.eigh(Sd, Md)
        except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
            raise NotPositiveDefinite(str(exc)) from exc
        w, X = w[:k], X[:, :k]
        complete = k == n
    else:
        sigma = _certified_shift(S, M)
        v0 = np.random.RandomState(seed).standard_normal(n)
        ncv = min(n - 1, max(2 * k + 1, 40))
        try:
            w, X = spla.eigsh(S, k=k, M=M, sigma=sigma, which="LM", v0=v0,
                              ncv=ncv)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceFailure(str(exc)) from exc
        complete = False

    order = np.argsort(w, kind="stable")
    w = np.ascontiguousarray(w[order].real)
    X = np.ascontiguousarray(X[:, order])

    # enforce M-orthonormality exactly enough for downstream Gram arithmetic
    G = X.conj().T @ (M @ X)
    defect = float(np.max(np.abs(G - np.eye(k))))
    if defect > 1e-12:
        try:
            L = np.linalg.cholesky(0.5 * (G + G.conj().T))
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure("eigenvector Gram matrix singular") from exc
        X = scipy.linalg.solve_triangular(L, X.conj().T, lower=True).conj().T
        G = X.conj().T @ (M @ X)
        defect = float(np.max(np.abs(G - np.eye(k))))
    if defect > ORTHO_TOL:
        raise ConvergenceFailure(f"M-orthonormality defect {defect:g}")

    X = _phase_normalize(X)
    R = S @ X - (M @ X) * w
    s_norm = spla.norm(S, np.inf)
    m_norm = spla.norm(M, np.inf)
    x_norms = np.linalg.norm(X, axis=0)
    residuals = np.linalg.norm(R, axis=0) / ((s_norm + np.abs(w) * m_norm) * x_norms)
    if np.max(residuals) > RESIDUAL_TOL:
        raise ConvergenceFailure(f"residual {np.max(residuals):g} above contract")

    return Spectrum(
        eigenvalues=w,
        eigenvectors=X,
        residuals=residuals,
        cluster_tol=float(cluster_tol),
        clusters=_cluster_indices(w, float(cluster_tol)),
        complete=complete,
    )


def counting(spectrum: Spectrum, mu: float) -> int:
    """N(mu): how many eigenvalues are <= mu (up to the cluster tolerance).

    Raises InsufficientSpectrum when the spectrum is partial and the count
    could still grow with more computed eigenvalues.
    """
    tol = spectrum.tol_at(mu)
    w = spectrum.eigenvalues
    if not spectrum.complete and (len(w) == 0 or w[-1] <= mu + tol):
        raise InsufficientSpectrum(
            f"need eigenvalues beyond {mu:g} to count reliably"
        )
    return int(np.count_nonzero(w <= mu + tol))


def eigenspace(spectrum: Spectrum, mu: float) -> np.ndarray:
    """Eigenvectors with eigenvalue within tol_at(mu) of mu (N x m, may be empty)."""
    tol = spectrum.tol_at(mu)
    w = spectrum.eigenvalues
    if not spectrum.complete and (len(w) == 0 or w[-1] <= mu + tol):
        raise InsufficientSpectrum(
            f"need eigenvalues beyond {mu:g} to resolve the eigenspace"
        )
    mask = np.abs(w - mu) <= tol
    return spectrum.eigenvectors[:, mask]


def rayleigh(F, u) -> float:
    """Rayleigh quotient u^H S u / u^H M u; must be real for Hermitian S."""
    S, M = _as_pencil(F)
    u = np.asarray(u).ravel()
    if not np.any(u):
        raise ZeroVector("Rayleigh quotient of the zero vector")
    den = (u.conj() @ (M @ u)).real
    num = u.conj() @ (S @ u)
    if abs(num.imag) > 1e-12 * (1.0 + abs(num.real)):
        raise ValueError(f"form value has imaginary part {num.imag:g}")
    return float(num.real / den)


def form_lower_bound(F) -> float:
    """Greatest c with a_theta[u] >= c ||u||^2 on the discrete space: lambda_1."""
    return float(solve_pencil(F, k=1).eigenvalues[0])


def subspace_certificate(F, mu, vectors, *, tol=1e-9, rank_tol=1e-10) -> bool:
    """Certify max Rayleigh quotient <= mu + tol on span(vectors).

    The vectors must be numerically independent in the M inner product
    (DependentVectors otherwise).  A passing certificate exhibits a subspace
    of dimension len(vectors) on which the form stays below mu.
    """
    S, M = _as_pencil(F)
    if isinstance(vectors, np.ndarray):
        V = vectors if vectors.ndim == 2 else vectors[:, None]
    else:
        V = np.column_stack([np.asarray(v).ravel() for v in vectors])
    G = V.conj().T @ (M @ V)
    G = 0.5 * (G + G.conj().T)
    gev = np.linalg.eigvalsh(G)
    if gev[0] <= rank_tol * max(gev[-1], 0.0) or gev[0] <= 0.0:
        raise DependentVectors(
            f"Gram spectrum [{gev[0]:g}, {gev[-1]:g}] below rank tolerance"
        )
    A = V.conj().T @ (S @ V)
    A = 0.5 * (A + A.conj().T)
    lam_max = scipy.linalg.eigh(A, G, eigvals_only=True)[-1]
    return bool(lam_max <= mu + tol)


# -- independent dense reference ----------------------------------------------


def _chol_lower(A: np.ndarray) -> np.ndarray:
    """Hand-written Cholesky A = L L^T for real symmetric positive definite A."""
    n = A.shape[0]
    L = np.zeros_like(A, dtype=float)
    for j in range(n):
        d = A[j, j] - L[j, :j] @ L[j, :j]
        if d <= 0.0 or not math.isfinite(d):
            raise NotPositiveDefinite(f"pivot {d:g} at row {j}")
        L[j, j] = math.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (A[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def _solve_lower(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Forward substitution: X with L X = B (B may have many columns)."""
    n = L.shape[0]
    X = np.array(B, dtype=float, copy=True)
    for i in range(n):
        if i:
            X[i] -= L[i, :i] @ X[:i]
        X[i] /= L[i, i]
    return X


def _householder_tridiag(A: np.ndarray):
    """Reduce a real symmetric matrix to tridiagonal form; returns (diag, off)."""
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    e = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = A[k + 1 :, k].copy()
        nx = math.sqrt(float(x @ x))
        if nx == 0.0:
            e[k] = 0.0
            continue
        alpha = -math.copysign(nx, x[0] if x[0] != 0.0 else 1.0)
        v = x.copy()
        v[0] -= alpha
        nv = math.sqrt(float(v @ v))
        if nv == 0.0:
            e[k] = alpha
            continue
        v /= nv
        B = A[k + 1 :, k + 1 :]
        p = B @ v
        w = p - (v @ p) * v
        B -= 2.0 * np.outer(v, w) + 2.0 * np.outer(w, v)
        A[k + 1 :, k + 1 :] = 0.5 * (B + B.T)
        A[k + 1, k] = alpha
        A[k, k + 1] = alpha
        A[k + 2 :, k] = 0.0
        A[k, k + 2 :] = 0.0
        e[k] = alpha
    if n >= 2:
        e[n - 2] = A[n - 1, n - 2]
    return np.diag(A).copy(), e


def _sturm_counts(d: np.ndarray, e2: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """For each x: number of eigenvalues of the tridiagonal matrix below x."""
    scale = float(np.max(np.abs(d)) + (np.max(e2) if len(e2) else 0.0) + 1.0)
    pivmin = scale * 1e-290
    counts = np.zeros(len(xs), dtype=int)
    q = d[0] - xs
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    counts += q < 0
    for i in range(1, len(d)):
        q = d[i] - xs - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        counts += q < 0
    return counts


def _tridiag_eigenvalues(d: np.ndarray, e: np.ndarray) -> np.ndarray:
    n = len(d)
    if n == 1:
        return d.copy()
    e2 = e * e
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    span = max(hi - lo, 1.0)
    lo -= 1e-12 * span
    hi += 1e-12 * span
    lbs = np.full(n, lo)
    ubs = np.full(n, hi)
    targets = np.arange(1, n + 1)
    for _ in range(200):
        mids = 0.5 * (lbs + ubs)
        cnt = _sturm_counts(d, e2, mids)
        take_upper = cnt >= targets  # at least j eigenvalues below mid
        ubs = np.where(take_upper, mids, ubs)
        lbs = np.where(take_upper, lbs, mids)
        if np.max(ubs - lbs) <= 1e-15 * span:
            break
    return 0.5 * (lbs + ubs)


def reference_eigenvalues(S, M=None) -> np.ndarray:
    """All eigenvalues of the pencil by the independent dense route.

    Intended for cross-checking solve_pencil on small problems; complex
    Hermitian input is embedded as a doubled real symmetric problem.
    """
    S = np.asarray(sp.csr_matrix(S).toarray() if sp.issparse(S) else S)
    n = S.shape[0]
    if M is None:
        M = np.eye(n)
    else:
        M = np.asarray(sp.csr_matrix(M).toarray() if sp.issparse(M) else M)
    is_complex = np.iscomplexobj(S) and np.any(S.imag) or (
        np.iscomplexobj(M) and np.any(M.imag)
    )
    if is_complex:
        A, B = S.real, S.imag
        Sr = np.block([[A, -B], [B, A]])
        Mr = np.block([[M.real, -M.imag], [M.imag, M.real]])
    else:
        Sr = S.real.astype(float)
        Mr = M.real.astype(float)
    Sr = 0.5 * (Sr + Sr.T)
    Mr = 0.5 * (Mr + Mr.T)

    L = _chol_lower(Mr)
    Y = _solve_lower(L, Sr)       # Y = L^-1 S
    C = _solve_lower(L, Y.T)      # C = L^-1 S L^-T  (S symmetric)
    C = 0.5 * (C + C.T)
    d, e = _householder_tridiag(C)
    w = np.sort(_tridiag_eigenvalues(d, e))
    if is_complex:
        w = w[0::2]  # doubled spectrum: take one of each pair
    return w
