"""Sparse symmetric eigenvalue and projection solves used by the grid module.

Smallest eigenvalues of SPD (or positive semidefinite with known kernel)
operators are obtained by dense LAPACK for small problems, shift-invert
Lanczos for medium ones, and LOBPCG with an algebraic-multigrid
preconditioner beyond that.  All entry points are deterministic for a fixed
seed.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NonConvergenceError

DENSE_LIMIT = 900
SPLU_LIMIT = 36_000


def _as_csr(L):
    return L.tocsr() if sp.issparse(L) else sp.csr_matrix(L)


def _verify(L, vals, vecs, rtol):
    # residual r bounds the Ritz value error by ~r (Weyl), quadratically near
    # convergence; 3e-5 relative keeps eigenvalues well inside the 1e-4 contract
    scale = max(abs(vals[-1]), 1e-300)
    R = L @ vecs - vecs * vals[None, :]
    res = np.linalg.norm(R, axis=0) / np.maximum(np.linalg.norm(vecs, axis=0), 1e-300)
    worst = float(np.max(res))
    if worst > max(rtol * 10.0, 3e-5) * scale:
        raise NonConvergenceError("eigensolver residual too large", worst)


def smallest_eigs_spd(
    L,
    k: int,
    kernel_basis: np.ndarray | None = None,
    rtol: float = 1e-9,
    seed: int = 7,
    maxiter: int = 400,
) -> np.ndarray:
    """Ascending smallest eigenvalues of a symmetric positive semidefinite L.

    `kernel_basis` (n-by-m, orthonormal columns) marks known null directions;
    the returned eigenvalues exclude them.
    """
    L = _as_csr(L)
    n = L.shape[0]
    kdim = 0 if kernel_basis is None else kernel_basis.shape[1]
    if n <= DENSE_LIMIT:
        vals = np.linalg.eigvalsh(L.toarray())
        return vals[kdim : kdim + k]
    scale = float(np.mean(L.diagonal()))
    if n <= SPLU_LIMIT:
        sigma = -1e-3 * scale
        vals, vecs = spla.eigsh(L, k=k + kdim, sigma=sigma, which="LM")
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        _verify(L, vals, vecs, rtol)
        return vals[kdim : kdim + k]
    return _lobpcg_path(L, k, kernel_basis, rtol, seed, maxiter, scale)


def _lobpcg_path(L, k, kernel_basis, rtol, seed, maxiter, scale):
    import pyamg
    import warnings as _warnings

    n = L.shape[0]
    rng = np.random.default_rng(seed)
    block = min(n - 1, k + max(3, k // 2))
    X = rng.standard_normal((n, block))
    ml = pyamg.smoothed_aggregation_solver(L, max_coarse=200)
    M = ml.aspreconditioner(cycle="V")
    Y = kernel_basis
    with _warnings.catch_warnings():
        # stagnation short of the requested tolerance is caught by _verify
        _warnings.simplefilter("ignore", UserWarning)
        vals, vecs = spla.lobpcg(
            L, X, M=M, Y=Y, tol=max(rtol, 1e-8) * scale, maxiter=maxiter, largest=False
        )
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    _verify(L, vals, vecs, max(rtol, 1e-8))
    return vals[:k]


def cg_solve(A, b: np.ndarray, rtol: float = 1e-12, maxiter: int | None = None) -> np.ndarray:
    """Conjugate-gradient solve for SPD (or semidefinite with compatible rhs) A."""
    A = _as_csr(A)
    if maxiter is None:
        maxiter = 20 * A.shape[0]
    x, info = spla.cg(A, b, rtol=rtol, atol=0.0, maxiter=maxiter)
    if info != 0:
        resid = float(np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), 1e-300))
        raise NonConvergenceError("CG did not converge", resid)
    return x


class GramSolver:
    """Repeated solves with A^T A (plus known nullspace) via cached factorization."""

    def __init__(self, A, kernel_dim: int = 0, rtol: float = 1e-12):
        self.A = _as_csr(A)
        self.gram = (self.A.T @ self.A).tocsc()
        self.kernel_dim = kernel_dim
        self.rtol = rtol
        n = self.gram.shape[0]
        if kernel_dim == 0 and n <= 250_000:
            self._lu = spla.splu(self.gram)
        else:
            self._lu = None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._lu is not None:
            return self._lu.solve(rhs)
        return cg_solve(self.gram, rhs, rtol=self.rtol)

    def project_onto_range(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of v onto R(A) computed as A (A^T A)^+ A^T v."""
        return self.A @ self.solve(self.A.T @ v)
