"""Staggered (Yee-style) discrete de Rham complex on a cuboid.

Degrees of freedom sit on nodes, edges, faces and cells of a uniform tensor
grid; gradient, curl and divergence are scaled incidence matrices, so the
compositions curl*grad and div*curl vanish entrywise, exactly, including in
floating point.  Boundary conditions are imposed by eliminating boundary
DOFs.

Orderings are lexicographic with the x index fastest.  Edge and face blocks
are stacked by orientation (x, y, z).  Every DOF class carries the same
uniform mass weight h1*h2*h3, so adjoints of the restricted operators are
plain transposes and singular values can be read off the matrices directly.

Boundary-condition model
------------------------
Each face of the box carries one flag per operator family; a preset stores
the resulting strong elimination sets

    gamma0 (nodes), gamma1 (edges), gamma2 (faces),

which must be nested gamma2 <= gamma1 <= gamma0: eliminating an edge only
keeps the complex exact when its endpoints are eliminated too, and likewise
for faces and their edges.  The canonical presets clamp all six faces at the
matching depth.  The mixed preset clamps only the bottom face; its
normal-zero faces are realized weakly through transposes (eliminating face
DOFs there would break both the complex property and the operator being
studied), see the README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DerhamGapError, GridBudgetError
from .solvers import GramSolver, smallest_eigs_spd

FACE_KEYS = ("x-", "x+", "y-", "y+", "z-", "z+")
FLAGS = ("free", "scalar_zero", "tangential_zero", "normal_zero")
DOF_BUDGET = 5_000_000
DENSE_GAP_LIMIT = 2000


def _face_axis_side(key: str) -> tuple[int, int]:
    axis = "xyz".index(key[0])
    side = 0 if key[1] == "-" else 1
    return axis, side


def replace_gamma0(bc: "BoundaryConditions", gamma0: frozenset) -> "BoundaryConditions":
    return BoundaryConditions(bc.name, bc.flags, gamma0, bc.gamma1, bc.gamma2)


@dataclass(frozen=True)
class BoundaryConditions:
    """Per-face flags plus the nested strong elimination sets they induce."""

    name: str
    flags: dict
    gamma0: frozenset  # faces whose nodes are eliminated
    gamma1: frozenset  # faces whose in-plane edges are eliminated
    gamma2: frozenset  # faces whose face DOFs are eliminated

    def __post_init__(self):
        for key, flag in self.flags.items():
            if key not in FACE_KEYS or flag not in FLAGS:
                raise DerhamGapError(f"bad boundary flag {key!r}={flag!r}")
        if not (self.gamma2 <= self.gamma1 <= self.gamma0):
            raise DerhamGapError(
                "elimination sets must be nested (faces <= edges <= nodes); "
                "a face DOF may only be eliminated when its edges and nodes are"
            )


def bc_free() -> BoundaryConditions:
    flags = {k: "free" for k in FACE_KEYS}
    e = frozenset()
    return BoundaryConditions("free", flags, e, e, e)


def bc_scalar_zero() -> BoundaryConditions:
    flags = {k: "scalar_zero" for k in FACE_KEYS}
    return BoundaryConditions("scalar", flags, frozenset(FACE_KEYS), frozenset(), frozenset())


def bc_tangential_zero() -> BoundaryConditions:
    flags = {k: "tangential_zero" for k in FACE_KEYS}
    allf = frozenset(FACE_KEYS)
    return BoundaryConditions("tangential", flags, allf, allf, frozenset())


def bc_normal_zero() -> BoundaryConditions:
    flags = {k: "normal_zero" for k in FACE_KEYS}
    allf = frozenset(FACE_KEYS)
    return BoundaryConditions("normal", flags, allf, allf, allf)


def bc_mixed() -> BoundaryConditions:
    """Tangential-zero bottom, normal-zero top and sides.

    Only the bottom face is eliminated strongly (at node, edge and face
    depth); the normal-zero faces belong to the adjoint side of the complex
    and are realized weakly by transposition.
    """
    flags = {k: "normal_zero" for k in FACE_KEYS}
    flags["z-"] = "tangential_zero"
    g = frozenset({"z-"})
    return BoundaryConditions("mixed", flags, g, g, g)


def bc_from_flags(flags: dict, name: str = "custom") -> BoundaryConditions:
    """Nested elimination sets from per-face flags (hierarchical depth)."""
    full = {k: "free" for k in FACE_KEYS}
    full.update(flags)
    g2 = frozenset(k for k, f in full.items() if f == "normal_zero")
    g1 = g2 | frozenset(k for k, f in full.items() if f == "tangential_zero")
    g0 = g1 | frozenset(k for k, f in full.items() if f == "scalar_zero")
    return BoundaryConditions(name, full, g0, g1, g2)


PRESETS = {
    "free": bc_free,
    "scalar": bc_scalar_zero,
    "tangential": bc_tangential_zero,
    "normal": bc_normal_zero,
    "mixed": bc_mixed,
}


@dataclass(frozen=True)
class GridSpec:
    lengths: tuple[float, float, float]
    cells: tuple[int, int, int]
    bc: BoundaryConditions = field(default_factory=bc_free)

    def __post_init__(self):
        if len(self.lengths) != 3 or len(self.cells) != 3:
            raise DerhamGapError("lengths and cells must have three entries")
        if any(l <= 0 for l in self.lengths) or any(n < 1 for n in self.cells):
            raise DerhamGapError("lengths must be positive and cells >= 1")

    @property
    def spacings(self) -> tuple[float, float, float]:
        return tuple(l / n for l, n in zip(self.lengths, self.cells))


def _diff1d(n: int, h: float) -> sp.csr_matrix:
    """Forward difference from n+1 point values to n interval values."""
    return sp.diags([-np.ones(n), np.ones(n)], [0, 1], shape=(n, n + 1), format="csr") / h


def _eye(n: int) -> sp.csr_matrix:
    return sp.identity(n, format="csr")


def _kron3(a3, a2, a1) -> sp.csr_matrix:
    return sp.kron(a3, sp.kron(a2, a1, format="csr"), format="csr")


@dataclass
class StaggeredComplex:
    spec: GridSpec
    G: sp.csr_matrix
    C: sp.csr_matrix
    D: sp.csr_matrix
    active_nodes: np.ndarray
    active_edges: np.ndarray
    active_faces: np.ndarray
    node_count: int
    edge_counts: tuple[int, int, int]
    face_counts: tuple[int, int, int]
    cell_count: int

    @property
    def bc(self) -> BoundaryConditions:
        return self.spec.bc

    @property
    def vol_weight(self) -> float:
        h = self.spec.spacings
        return h[0] * h[1] * h[2]

    # operators with boundary conditions: domain restricted, codomain full
    @cached_property
    def grad_op(self) -> sp.csr_matrix:
        return self.G[:, self.active_nodes].tocsr()

    @cached_property
    def curl_op(self) -> sp.csr_matrix:
        return self.C[:, self.active_edges].tocsr()

    @cached_property
    def div_op(self) -> sp.csr_matrix:
        return self.D[:, self.active_faces].tocsr()

    # chain operators between restricted spaces, used for exactness
    @cached_property
    def grad_chain(self) -> sp.csr_matrix:
        return self.G[self.active_edges][:, self.active_nodes].tocsr()

    @cached_property
    def curl_chain(self) -> sp.csr_matrix:
        return self.C[self.active_faces][:, self.active_edges].tocsr()

    @cached_property
    def div_chain(self) -> sp.csr_matrix:
        return self.D[:, self.active_faces].tocsr()

    # gradient matched to the curl domain, spanning N(curl_op): node
    # eliminations follow the edge-level set gamma1, not gamma0
    @cached_property
    def matched_nodes(self) -> np.ndarray:
        spec = replace(self.spec, bc=replace_gamma0(self.bc, self.bc.gamma1))
        return _active_nodes(spec)

    @cached_property
    def grad_matched(self) -> sp.csr_matrix:
        return self.G[self.active_edges][:, self.matched_nodes].tocsr()

    def matched_scalar_kernel_dim(self) -> int:
        return 1 if not self.bc.gamma1 else 0

    def exactness_residuals(self) -> tuple[float, float]:
        cg = self.curl_chain @ self.grad_chain
        dc = self.div_chain @ self.curl_chain
        m1 = float(np.max(np.abs(cg.data))) if cg.nnz else 0.0
        m2 = float(np.max(np.abs(dc.data))) if dc.nnz else 0.0
        return m1, m2

    def scalar_kernel_dim(self) -> int:
        """Dimension of N(grad) on the active node space (constants or none)."""
        return 1 if not self.bc.gamma0 else 0

    def curl_kernel_dim(self) -> int:
        """dim N(curl_op) = rank of the matched gradient (harmonic fields trivial)."""
        return len(self.matched_nodes) - self.matched_scalar_kernel_dim()

    def div_kernel_dim(self) -> int:
        div_t_kernel = 1 if len(self.bc.gamma2) == 6 else 0
        return len(self.active_faces) - self.cell_count + div_t_kernel


def build_complex(spec: GridSpec) -> StaggeredComplex:
    """Assemble incidence-derived G, C, D and the BC-active index sets."""
    n1, n2, n3 = spec.cells
    h1, h2, h3 = spec.spacings
    node_count = (n1 + 1) * (n2 + 1) * (n3 + 1)
    edge_counts = (
        n1 * (n2 + 1) * (n3 + 1),
        (n1 + 1) * n2 * (n3 + 1),
        (n1 + 1) * (n2 + 1) * n3,
    )
    face_counts = (
        (n1 + 1) * n2 * n3,
        n1 * (n2 + 1) * n3,
        n1 * n2 * (n3 + 1),
    )
    cell_count = n1 * n2 * n3
    total = node_count + sum(edge_counts) + sum(face_counts) + cell_count
    if total > DOF_BUDGET:
        raise GridBudgetError(f"grid too large: {total} DOFs exceeds budget {DOF_BUDGET}")

    d1, d2, d3 = _diff1d(n1, h1), _diff1d(n2, h2), _diff1d(n3, h3)
    I = _eye

    G = sp.vstack(
        [
            _kron3(I(n3 + 1), I(n2 + 1), d1),
            _kron3(I(n3 + 1), d2, I(n1 + 1)),
            _kron3(d3, I(n2 + 1), I(n1 + 1)),
        ],
        format="csr",
    )

    # curl blocks: rows are x/y/z faces, columns are x/y/z edges
    dy_ez = _kron3(I(n3), d2, I(n1 + 1))   # d/dy of z-edges -> x-faces
    dz_ey = _kron3(d3, I(n2), I(n1 + 1))   # d/dz of y-edges -> x-faces
    dz_ex = _kron3(d3, I(n2 + 1), I(n1))   # d/dz of x-edges -> y-faces
    dx_ez = _kron3(I(n3), I(n2 + 1), d1)   # d/dx of z-edges -> y-faces
    dx_ey = _kron3(I(n3 + 1), I(n2), d1)   # d/dx of y-edges -> z-faces
    dy_ex = _kron3(I(n3 + 1), d2, I(n1))   # d/dy of x-edges -> z-faces
    zxx = sp.csr_matrix((face_counts[0], edge_counts[0]))
    zyy = sp.csr_matrix((face_counts[1], edge_counts[1]))
    zzz = sp.csr_matrix((face_counts[2], edge_counts[2]))
    C = sp.bmat(
        [
            [zxx, -dz_ey, dy_ez],
            [dz_ex, zyy, -dx_ez],
            [-dy_ex, dx_ey, zzz],
        ],
        format="csr",
    )

    D = sp.hstack(
        [
            _kron3(I(n3), I(n2), d1),
            _kron3(I(n3), d2, I(n1)),
            _kron3(d3, I(n2), I(n1)),
        ],
        format="csr",
    )

    active_nodes = _active_nodes(spec)
    active_edges = _active_edges(spec)
    active_faces = _active_faces(spec)
    return StaggeredComplex(
        spec=spec,
        G=G,
        C=C,
        D=D,
        active_nodes=active_nodes,
        active_edges=active_edges,
        active_faces=active_faces,
        node_count=node_count,
        edge_counts=edge_counts,
        face_counts=face_counts,
        cell_count=cell_count,
    )


def apply_bc(cx: StaggeredComplex, bc: BoundaryConditions | str) -> StaggeredComplex:
    """Same grid, new flags: re-derives the active DOF sets."""
    if isinstance(bc, str):
        bc = PRESETS[bc]()
    spec = replace(cx.spec, bc=bc)
    out = StaggeredComplex(
        spec=spec,
        G=cx.G,
        C=cx.C,
        D=cx.D,
        active_nodes=_active_nodes(spec),
        active_edges=_active_edges(spec),
        active_faces=_active_faces(spec),
        node_count=cx.node_count,
        edge_counts=cx.edge_counts,
        face_counts=cx.face_counts,
        cell_count=cx.cell_count,
    )
    return out


def _boundary_mask(sizes, boundary_axes_sides) -> np.ndarray:
    """Mask over a lexicographic index box marking listed boundary hyperplanes."""
    grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
    mask = np.zeros(sizes, dtype=bool)
    for axis, side, limit in boundary_axes_sides:
        idx = grids[axis]
        mask |= idx == (0 if side == 0 else limit)
    # lexicographic with x fastest means reversed axis order for C-ravel
    return mask


def _ravel_x_fastest(mask_xyz: np.ndarray) -> np.ndarray:
    return np.transpose(mask_xyz, (2, 1, 0)).ravel()


def _active_nodes(spec: GridSpec) -> np.ndarray:
    n = spec.cells
    sizes = (n[0] + 1, n[1] + 1, n[2] + 1)
    marks = []
    for key in spec.bc.gamma0:
        axis, side = _face_axis_side(key)
        marks.append((axis, side, sizes[axis] - 1))
    mask = _boundary_mask(sizes, marks)
    return np.flatnonzero(~_ravel_x_fastest(mask))


def _active_edges(spec: GridSpec) -> np.ndarray:
    n = spec.cells
    keep = []
    offset = 0
    for orient in range(3):
        sizes = tuple(n[a] if a == orient else n[a] + 1 for a in range(3))
        marks = []
        for key in spec.bc.gamma1:
            axis, side = _face_axis_side(key)
            if axis == orient:
                continue  # edges crossing the face do not lie in it
            marks.append((axis, side, sizes[axis] - 1))
        mask = _boundary_mask(sizes, marks)
        keep.append(np.flatnonzero(~_ravel_x_fastest(mask)) + offset)
        offset += sizes[0] * sizes[1] * sizes[2]
    return np.concatenate(keep)


def _active_faces(spec: GridSpec) -> np.ndarray:
    n = spec.cells
    keep = []
    offset = 0
    for orient in range(3):
        sizes = tuple(n[a] + 1 if a == orient else n[a] for a in range(3))
        marks = []
        for key in spec.bc.gamma2:
            axis, side = _face_axis_side(key)
            if axis != orient:
                continue  # only faces parallel to the boundary plane lie in it
            marks.append((axis, side, sizes[axis] - 1))
        mask = _boundary_mask(sizes, marks)
        keep.append(np.flatnonzero(~_ravel_x_fastest(mask)) + offset)
        offset += sizes[0] * sizes[1] * sizes[2]
    return np.concatenate(keep)


@dataclass
class GapResult:
    operator: str
    bc_name: str
    sigma_min_plus: float
    kernel_dim: int
    method: str
    lengths: tuple[float, float, float]
    cells: tuple[int, int, int]

    def csv_row(self) -> dict:
        return {
            "operator": self.operator,
            "bc": self.bc_name,
            "l1": self.lengths[0],
            "l2": self.lengths[1],
            "l3": self.lengths[2],
            "n1": self.cells[0],
            "n2": self.cells[1],
            "n3": self.cells[2],
            "gap": self.sigma_min_plus,
            "kernel_dim": self.kernel_dim,
            "method": self.method,
        }


GAP_CSV_HEADER = ["operator", "bc", "l1", "l2", "l3", "n1", "n2", "n3", "gap", "kernel_dim", "method"]


def _dense_sigma_min_plus(A: sp.spmatrix, kernel_dim: int) -> float:
    s = np.linalg.svd(A.toarray(), compute_uv=False)
    s = np.sort(s)
    # the SVD lists min(m, n) values; a wide matrix hides cols-rows kernel dims
    zeros = kernel_dim - max(0, A.shape[1] - A.shape[0])
    if zeros < 0 or zeros >= s.size:
        raise DerhamGapError("operator has no positive singular value")
    val = s[zeros]
    if zeros and s[zeros - 1] > 1e-8 * s[-1]:
        raise DerhamGapError("combinatorial kernel dimension disagrees with dense SVD")
    return float(val)


def _constants_basis(n: int) -> np.ndarray:
    return np.full((n, 1), 1.0 / math.sqrt(n))


def _remove_matching(values: np.ndarray, drop: np.ndarray, rel_tol: float = 1e-5) -> list[float]:
    """Remove each entry of `drop` from `values` once (nearest match within tol)."""
    vals = list(values)
    for d in drop:
        best, best_err = None, None
        for i, v in enumerate(vals):
            err = abs(v - d) / max(abs(d), 1e-30)
            if best is None or err < best_err:
                best, best_err = i, err
        if best is not None and best_err < rel_tol:
            vals.pop(best)
    return vals


def spectral_gap(cx: StaggeredComplex, operator: str, method: str = "auto",
                 seed: int = 7) -> GapResult:
    """Smallest positive singular value of grad/curl/div under the preset BCs.

    Dense SVD for small operators.  The iterative path works on the normal
    operator; for the curl it augments with the matched gradient pair
    (grad grad^T shifts the known kernel into a copy of the scalar Dirichlet
    spectrum, which is computed separately and removed from the union).
    """
    if operator not in ("grad", "curl", "div"):
        raise DerhamGapError(f"unknown operator {operator!r}")
    if operator == "grad":
        A = cx.grad_op
        kernel_dim = cx.scalar_kernel_dim()
    elif operator == "curl":
        A = cx.curl_op
        kernel_dim = cx.curl_kernel_dim()
    else:
        A = cx.div_op
        kernel_dim = cx.div_kernel_dim()

    use_dense = method == "dense_svd" or (method == "auto" and min(A.shape) <= DENSE_GAP_LIMIT)
    if use_dense:
        sigma = _dense_sigma_min_plus(A, kernel_dim)
        return GapResult(operator, cx.bc.name, sigma, kernel_dim, "dense_svd",
                         cx.spec.lengths, cx.spec.cells)

    if operator == "grad":
        L = (A.T @ A).tocsr()
        kb = _constants_basis(L.shape[0]) if cx.scalar_kernel_dim() else None
        vals = smallest_eigs_spd(L, 1, kernel_basis=kb, seed=seed)
        sigma = math.sqrt(max(vals[0], 0.0))
    elif operator == "div":
        L = (A @ A.T).tocsr()  # cell-space normal operator
        const_dim = 1 if len(cx.bc.gamma2) == 6 else 0
        kb = _constants_basis(L.shape[0]) if const_dim else None
        vals = smallest_eigs_spd(L, 1, kernel_basis=kb, seed=seed)
        sigma = math.sqrt(max(vals[0], 0.0))
    else:
        sigma = math.sqrt(_curl_gap_squared(cx, seed=seed))
    return GapResult(operator, cx.bc.name, sigma, kernel_dim, "deflated_iteration",
                     cx.spec.lengths, cx.spec.cells)


def _curl_gap_squared(cx: StaggeredComplex, n_extra: int = 2, seed: int = 7) -> float:
    A = cx.curl_op
    Gm = cx.grad_matched
    L = (A.T @ A + Gm @ Gm.T).tocsr()
    S = (Gm.T @ Gm).tocsr()
    s_kernel = _constants_basis(S.shape[0]) if cx.matched_scalar_kernel_dim() else None
    k_l, k_s = 4 + n_extra, 4 + n_extra
    for _ in range(5):
        lvals = smallest_eigs_spd(L, min(k_l, L.shape[0] - 2), seed=seed)
        svals = smallest_eigs_spd(S, min(k_s, S.shape[0] - 2), kernel_basis=s_kernel, seed=seed)
        remaining = _remove_matching(lvals, svals)
        # candidate is trustworthy once it lies below the largest scalar value
        # we have examined (coverage) or the scalar list cannot reach it
        if remaining and (remaining[0] <= svals[-1] or k_s >= S.shape[0] - 2):
            return float(remaining[0])
        k_l, k_s = k_l + 4, k_s + 4
    raise DerhamGapError("could not separate curl spectrum from scalar companion")


def normal_operator_eigenvalues(cx: StaggeredComplex, operator: str, count: int,
                                seed: int = 7) -> np.ndarray:
    """Smallest `count` positive eigenvalues of the operator's normal form.

    grad: grad^T grad on active nodes; div: div div^T on cells; curl: the
    augmented edge operator with the scalar companion spectrum removed.
    """
    if operator == "grad":
        A = cx.grad_op
        L = (A.T @ A).tocsr()
        kb = _constants_basis(L.shape[0]) if cx.scalar_kernel_dim() else None
        return smallest_eigs_spd(L, count, kernel_basis=kb, seed=seed)
    if operator == "div":
        A = cx.div_op
        L = (A @ A.T).tocsr()
        const_dim = 1 if len(cx.bc.gamma2) == 6 else 0
        kb = _constants_basis(L.shape[0]) if const_dim else None
        return smallest_eigs_spd(L, count, kernel_basis=kb, seed=seed)
    if operator != "curl":
        raise DerhamGapError(f"unknown operator {operator!r}")
    A = cx.curl_op
    Gm = cx.grad_matched
    L = (A.T @ A + Gm @ Gm.T).tocsr()
    S = (Gm.T @ Gm).tocsr()
    s_kernel = _constants_basis(S.shape[0]) if cx.matched_scalar_kernel_dim() else None
    extra = 6
    for _ in range(4):
        lvals = smallest_eigs_spd(L, min(count + extra, L.shape[0] - 2), seed=seed)
        svals = smallest_eigs_spd(S, min(count + extra, S.shape[0] - 2),
                                  kernel_basis=s_kernel, seed=seed)
        remaining = _remove_matching(lvals, svals)
        if len(remaining) >= count and (remaining[count - 1] <= svals[-1]
                                        or count + extra >= S.shape[0] - 2):
            return np.array(remaining[:count])
        extra += 6
    raise DerhamGapError("could not separate curl spectrum from scalar companion")


def helmholtz_project(cx: StaggeredComplex, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split an active-edge field into (curl-adjoint range part, curl-kernel part).

    The kernel part is the orthogonal projection onto R(grad_matched) =
    N(curl_op); the range part is the complement.  Parts sum to the input
    exactly and are orthogonal in the uniform mass inner product.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[0] != len(cx.active_edges):
        raise DerhamGapError("field must live on the active edge DOFs")
    solver = GramSolver(cx.grad_matched, kernel_dim=cx.matched_scalar_kernel_dim())
    kernel_part = solver.project_onto_range(v)
    return v - kernel_part, kernel_part


@dataclass
class SweepResult:
    lengths: list[float]
    results: list[GapResult]

    @property
    def gaps(self) -> np.ndarray:
        return np.array([r.sigma_min_plus for r in self.results])

    def diagnostics(self) -> dict:
        from .diagnostics import loglog_slope, tail_slope

        L = np.array(self.lengths, dtype=float)
        g = self.gaps
        return {
            "slope_ols": loglog_slope(L, g),
            "slope_tail": tail_slope(L, g),
        }


def gap_sweep(
    operator: str,
    bc: BoundaryConditions | str,
    lengths: list[float],
    axes: tuple[int, ...] = (0,),
    per_unit: int = 8,
    base_lengths: tuple[float, float, float] = (1.0, 1.0, 1.0),
    method: str = "auto",
    seed: int = 7,
    workers: int = 1,
) -> SweepResult:
    """Gap as a function of elongation along `axes` at fixed per-unit resolution.

    Sweep entries are independent; with workers > 1 they run on a thread pool
    and are merged back in input order, so the output is identical either way.
    """
    if isinstance(bc, str):
        bc = PRESETS[bc]()

    def one(ell: float) -> GapResult:
        lens = list(base_lengths)
        for ax in axes:
            lens[ax] = float(ell)
        cells = tuple(max(1, round(per_unit * l)) for l in lens)
        cx = build_complex(GridSpec(tuple(lens), cells, bc))
        return spectral_gap(cx, operator, method=method, seed=seed)

    if workers > 1 and len(lengths) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, lengths))
    else:
        results = [one(ell) for ell in lengths]
    return SweepResult([float(l) for l in lengths], results)
