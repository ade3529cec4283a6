"""Kernel/range splits, closed-range constants, resolvents and the smoother.

Everything here is finite dimensional and real.  For an operator A the
closed-range constant is 1/sigma_min_plus(A); the skew block matrix
T = [[0, -A^T], [A, 0]] inherits the same positive singular values (each
twice) and carries the resolvent formulas used by the property suites.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    DerhamGapError,
    GapDomainError,
    ResolventAtZeroError,
    ComplexPropertyError,
    ZeroOperatorError,
)

DENSE_SVD_LIMIT = 2000
PROJECTOR_TOL = 1e-12


@dataclass
class LinearMap:
    """Real matrix with a shape contract and a free-form role tag."""

    entries: np.ndarray | sp.spmatrix
    role_tag: str = ""

    def __post_init__(self):
        if sp.issparse(self.entries):
            data = self.entries.data
        else:
            self.entries = np.atleast_2d(np.asarray(self.entries, dtype=float))
            data = self.entries
        if self.entries.ndim != 2 or min(self.entries.shape) == 0:
            raise DerhamGapError("LinearMap requires a non-empty 2-D matrix")
        if data.size and not np.all(np.isfinite(data)):
            raise DerhamGapError("LinearMap entries must be finite")

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def dense(self) -> np.ndarray:
        if sp.issparse(self.entries):
            return self.entries.toarray()
        return self.entries

    def __matmul__(self, other):
        return self.entries @ other


def write_coo(lm: LinearMap, path) -> None:
    """Serialize to the documented text format: 'rows cols nnz' then 'i j value'."""
    A = sp.coo_matrix(lm.entries)
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]} {A.shape[1]} {A.nnz}\n")
        for i, j, v in zip(A.row, A.col, A.data):
            fh.write(f"{i} {j} {float(v)!r}\n")


def read_coo(path, role_tag: str = "") -> LinearMap:
    with open(path) as fh:
        rows, cols, nnz = (int(tok) for tok in fh.readline().split())
        i = np.empty(nnz, dtype=int)
        j = np.empty(nnz, dtype=int)
        v = np.empty(nnz, dtype=float)
        for n in range(nnz):
            toks = fh.readline().split()
            i[n], j[n], v[n] = int(toks[0]), int(toks[1]), float(toks[2])
    return LinearMap(sp.coo_matrix((v, (i, j)), shape=(rows, cols)).tocsr(), role_tag)


@dataclass
class KernelRangeData:
    source: LinearMap
    rank: int
    pi_n: np.ndarray              # projector onto N(A), domain side
    pi_r_domain: np.ndarray       # projector onto R(A^T), domain side
    pi_r_codomain: np.ndarray     # projector onto R(A), codomain side
    sigma_min_plus: float
    zero_tol: float
    ambiguous: bool = False
    singular_values: np.ndarray = field(default_factory=lambda: np.array([]))

    def validate(self, tol: float = PROJECTOR_TOL) -> None:
        for P in (self.pi_n, self.pi_r_domain, self.pi_r_codomain):
            if np.max(np.abs(P @ P - P)) > tol or np.max(np.abs(P - P.T)) > tol:
                raise DerhamGapError("projector is not a symmetric idempotent")
        eye = np.eye(self.pi_n.shape[0])
        if np.max(np.abs(self.pi_n + self.pi_r_domain - eye)) > tol:
            raise DerhamGapError("domain projectors do not sum to the identity")
        if np.max(np.abs(self.source.dense() @ self.pi_n)) > max(
            self.zero_tol, tol * max(1.0, self.sigma_min_plus)
        ):
            raise DerhamGapError("A does not annihilate the kernel projector")


def kernel_range(a: LinearMap, zero_tol: float | None = None) -> KernelRangeData:
    """Split domain/codomain along the singular values of `a`.

    Singular values below zero_tol count as kernel directions.  The default
    zero_tol is 1e-9 times the largest singular value.  A warning flag is set
    when a singular value sits within a factor of 10 of the threshold.
    """
    if max(a.rows, a.cols) > DENSE_SVD_LIMIT:
        raise DerhamGapError(
            f"dense SVD limited to dimension {DENSE_SVD_LIMIT}; "
            "use the grid module's iterative path for large operators"
        )
    A = a.dense()
    U, s, Vt = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    if zero_tol is None:
        zero_tol = 1e-9 * smax if smax > 0 else 1e-30
    if zero_tol <= 0:
        raise DerhamGapError("zero_tol must be positive")
    keep = s > zero_tol
    rank = int(np.sum(keep))
    ambiguous = bool(np.any((s > zero_tol / 10.0) & (s < zero_tol * 10.0)))
    if ambiguous:
        warnings.warn(
            "singular value within a factor 10 of zero_tol; kernel split is ambiguous",
            RuntimeWarning,
            stacklevel=2,
        )
    V = Vt.T
    pi_r_dom = V[:, :rank] @ V[:, :rank].T if rank else np.zeros((a.cols, a.cols))
    pi_n = np.eye(a.cols) - pi_r_dom
    pi_r_cod = U[:, :rank] @ U[:, :rank].T if rank else np.zeros((a.rows, a.rows))
    sigma_min_plus = float(s[rank - 1]) if rank else 0.0
    krd = KernelRangeData(
        source=a,
        rank=rank,
        pi_n=pi_n,
        pi_r_domain=pi_r_dom,
        pi_r_codomain=pi_r_cod,
        sigma_min_plus=sigma_min_plus,
        zero_tol=zero_tol,
        ambiguous=ambiguous,
        singular_values=s,
    )
    krd.validate()
    return krd


def closed_range_constant(krd: KernelRangeData) -> float:
    """Best constant c with ||x|| <= c ||A x|| on the kernel complement."""
    if krd.rank == 0:
        raise ZeroOperatorError("operator is zero; constant undefined")
    return 1.0 / krd.sigma_min_plus


@dataclass
class GapConstants:
    c_t: float
    lam: float

    def __post_init__(self):
        if abs(self.lam) >= 1.0 / self.c_t:
            raise GapDomainError(
                f"|lambda|={abs(self.lam):.3e} outside guaranteed gap 1/c_T={1.0 / self.c_t:.3e}"
            )

    @property
    def c_hat(self) -> float:
        return self.c_t / (1.0 - self.c_t * abs(self.lam))

    @property
    def c_full(self) -> float:
        return float(np.sqrt(self.c_hat**2 + self.lam**-2))


@dataclass
class BlockSkewSystem:
    """T = [[0, -A^T], [A, 0]] together with its kernel/range data."""

    a: LinearMap
    t: LinearMap
    krd: KernelRangeData
    c_t: float

    @classmethod
    def from_map(cls, a: LinearMap, zero_tol: float | None = None) -> "BlockSkewSystem":
        A = a.dense()
        m, n = A.shape
        T = np.zeros((m + n, m + n))
        T[:n, n:] = -A.T
        T[n:, :n] = A
        tmap = LinearMap(T, role_tag=f"skew({a.role_tag})")
        krd = kernel_range(tmap, zero_tol)
        if krd.rank == 0:
            raise ZeroOperatorError("operator is zero; spectral gap undefined")
        return cls(a=a, t=tmap, krd=krd, c_t=1.0 / krd.sigma_min_plus)

    @property
    def dim(self) -> int:
        return self.t.rows


def reduced_resolvent(sys: BlockSkewSystem, lam: float) -> LinearMap:
    """(T restricted to its range, minus lambda)^{-1}, extended by zero."""
    gc = GapConstants(sys.c_t, lam)  # validates |lam| < 1/c_T
    T = sys.t.dense()
    pi_r = sys.krd.pi_r_domain
    pi_n = sys.krd.pi_n
    # shift the kernel block away from lambda so the full matrix is invertible
    alpha = 1.0 + abs(lam)
    M = T - lam * np.eye(sys.dim) + alpha * pi_n
    try:
        X = np.linalg.solve(M, pi_r)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by gap bound
        raise DerhamGapError(f"singular solve in reduced resolvent: {exc}") from exc
    out = pi_r @ X
    nrm = np.linalg.norm(out, 2)
    if nrm > gc.c_hat * (1.0 + 1e-8):
        raise DerhamGapError(
            f"reduced resolvent norm {nrm:.6e} exceeds guaranteed bound {gc.c_hat:.6e}"
        )
    return LinearMap(out, role_tag="reduced_resolvent")


def full_resolvent(sys: BlockSkewSystem, lam: float) -> LinearMap:
    """(T - lambda)^{-1} via the kernel/range split; needs 0 < |lam| < 1/c_T."""
    if lam == 0.0:
        if sys.krd.rank < sys.dim:
            raise ResolventAtZeroError("resolvent does not exist at 0: kernel is nontrivial")
        return reduced_resolvent(sys, 0.0)
    GapConstants(sys.c_t, lam)
    red = reduced_resolvent(sys, lam).dense()
    out = red @ sys.krd.pi_r_domain - (1.0 / lam) * sys.krd.pi_n
    return LinearMap(out, role_tag="full_resolvent")


def neumann_partial_sum(sys: BlockSkewSystem, lam: float, k: int) -> tuple[LinearMap, float]:
    """Truncated low-frequency expansion of the resolvent and its error bound.

    Returns (-1/lam) pi_N + sum_{n<k} lam^n Tred^{-n-1} pi_R and the bound
    c_hat * c_T^k * |lam|^k on the operator-norm error.
    """
    if k < 1:
        raise DerhamGapError("k must be >= 1")
    if lam == 0.0:
        raise ResolventAtZeroError("expansion point must be nonzero")
    gc = GapConstants(sys.c_t, lam)
    tinv = reduced_resolvent(sys, 0.0).dense()
    pi_r = sys.krd.pi_r_domain
    approx = -(1.0 / lam) * sys.krd.pi_n
    power = tinv.copy()
    for n in range(k):
        approx = approx + (lam**n) * power @ pi_r
        power = power @ tinv
    bound = gc.c_hat * (sys.c_t ** k) * (abs(lam) ** k)
    return LinearMap(approx, role_tag="neumann_partial_sum"), float(bound)


def density_smoother(a0: LinearMap, a1: LinearMap, y: np.ndarray) -> np.ndarray:
    """Regularized removal of the a0-range part: y - A0 (A0^T A0 + 1)^{-1} A0^T y.

    Requires the composition a1 @ a0 = 0.  The output keeps the a1-image of y
    and is bounded in the graph norm of (a1, a0^T) by the (y, a1 y) norm.
    """
    A0 = a0.dense() if not sp.issparse(a0.entries) else a0.entries
    A1 = a1.dense() if not sp.issparse(a1.entries) else a1.entries
    comp = A1 @ A0
    comp_max = np.max(np.abs(comp.toarray() if sp.issparse(comp) else comp)) if comp.size else 0.0
    if comp_max > 1e-12:
        raise ComplexPropertyError(comp_max)
    y = np.asarray(y, dtype=float)
    if y.shape[0] != a1.cols:
        raise DerhamGapError("y must live in the domain of a1")
    if sp.issparse(A0):
        gram = (A0.T @ A0 + sp.identity(a0.cols, format="csc")).tocsc()
        z = sp.linalg.spsolve(gram, A0.T @ y)
    else:
        gram = A0.T @ A0 + np.eye(a0.cols)
        z = np.linalg.solve(gram, A0.T @ y)
    return y - A0 @ z
