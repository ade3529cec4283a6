"""Separable eigenmode oracle on boxes.

Eigenvalues of the scalar Laplacians (Dirichlet/Neumann walls) and of the
double-curl operator with tangential-zero walls are pi^2 * sum((k_i/l_i)^2)
over family-specific admissible integer indices.  The square root of the
smallest admissible positive eigenvalue is the spectral gap of the matching
first-order operator, which is what the grid code is validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DerhamGapError
from .fields import COS, SIN, TrigPoly, TrigScalarField, TrigVectorField

FAMILIES = ("dirichlet_scalar", "neumann_scalar", "maxwell_cavity")


@dataclass(frozen=True)
class ModeIndex:
    family: str
    k: tuple[int, int, int]
    lengths: tuple[float, float, float]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DerhamGapError(f"unknown mode family {self.family!r}")
        if any(l <= 0 for l in self.lengths):
            raise DerhamGapError("lengths must be positive")
        if any(ki < 0 for ki in self.k):
            raise DerhamGapError("mode indices must be non-negative")
        if self.family == "dirichlet_scalar" and min(self.k) < 1:
            raise DerhamGapError("dirichlet_scalar requires every index >= 1")
        if self.family == "neumann_scalar" and max(self.k) == 0:
            raise DerhamGapError("neumann_scalar requires a nonzero index")
        if self.family == "maxwell_cavity" and sum(ki >= 1 for ki in self.k) < 2:
            raise DerhamGapError("maxwell_cavity requires at least two nonzero indices")

    @property
    def multiplicity(self) -> int:
        if self.family == "maxwell_cavity" and min(self.k) >= 1:
            return 2
        return 1


def eigenvalue(m: ModeIndex) -> float:
    return np.pi**2 * sum((ki / li) ** 2 for ki, li in zip(m.k, m.lengths))


def _admissible(family: str, k: tuple[int, int, int]) -> bool:
    if family == "dirichlet_scalar":
        return min(k) >= 1
    if family == "neumann_scalar":
        return max(k) >= 1
    return sum(ki >= 1 for ki in k) >= 2


def _enumerate(family: str, lengths, lam_cap: float):
    """All admissible indices with eigenvalue <= lam_cap, sorted by (value, k)."""
    bounds = [int(math.ceil(li * math.sqrt(lam_cap) / math.pi)) + 1 for li in lengths]
    found = []
    for k1 in range(bounds[0] + 1):
        for k2 in range(bounds[1] + 1):
            for k3 in range(bounds[2] + 1):
                k = (k1, k2, k3)
                if not _admissible(family, k):
                    continue
                lam = np.pi**2 * sum((ki / li) ** 2 for ki, li in zip(k, lengths))
                if lam <= lam_cap:
                    found.append((lam, k))
    found.sort(key=lambda t: (t[0], t[1]))
    return found


def min_gap(family: str, lengths) -> tuple[float, ModeIndex]:
    """Smallest admissible gap and its lexicographically smallest index."""
    lengths = tuple(float(v) for v in lengths)
    if any(l <= 0 for l in lengths):
        raise DerhamGapError("lengths must be positive")
    # seed cap from a simple admissible candidate, then enumerate below it
    order = np.argsort(lengths)[::-1]
    if family == "dirichlet_scalar":
        seed = (1, 1, 1)
    elif family == "neumann_scalar":
        seed = tuple(1 if i == order[0] else 0 for i in range(3))
    else:
        seed = tuple(1 if i in (order[0], order[1]) else 0 for i in range(3))
    cap = np.pi**2 * sum((ki / li) ** 2 for ki, li in zip(seed, lengths))
    lam, k = _enumerate(family, lengths, cap)[0]
    return math.sqrt(lam), ModeIndex(family, k, lengths)


def list_eigenvalues(family: str, lengths, count: int) -> list[tuple[float, ModeIndex]]:
    """First `count` positive eigenvalues, repeated according to multiplicity."""
    lengths = tuple(float(v) for v in lengths)
    cap = (min_gap(family, lengths)[0]) ** 2 * 4.0 + 1.0
    while True:
        flat = []
        for lam, k in _enumerate(family, lengths, cap):
            m = ModeIndex(family, k, lengths)
            flat.extend([(lam, m)] * m.multiplicity)
        if len(flat) >= count:
            return flat[:count]
        cap *= 2.0


def _maxwell_polarizations(m: ModeIndex) -> list[np.ndarray]:
    kappa = np.array([ki / li for ki, li in zip(m.k, m.lengths)])
    zeros = [i for i in range(3) if m.k[i] == 0]
    if zeros:
        return [np.eye(3)[zeros[0]]]
    u = np.array([kappa[1], -kappa[0], 0.0])
    u /= np.linalg.norm(u)
    v = np.cross(kappa, u)
    v /= np.linalg.norm(v)
    return [u, v]


def mode_field(m: ModeIndex, polarization: int = 0):
    """Analytic eigenfield for the index.

    Scalar families return a TrigScalarField; maxwell_cavity returns a
    divergence-free TrigVectorField whose tangential components vanish on the
    boundary.  `polarization` selects among the degenerate vector modes.
    """
    L = m.lengths
    if m.family == "dirichlet_scalar":
        return TrigScalarField(TrigPoly.term(L, 1.0, (SIN, SIN, SIN), m.k))
    if m.family == "neumann_scalar":
        return TrigScalarField(TrigPoly.term(L, 1.0, (COS, COS, COS), m.k))
    pols = _maxwell_polarizations(m)
    if not 0 <= polarization < len(pols):
        raise DerhamGapError(
            f"mode {m.k} has {len(pols)} polarization(s); got index {polarization}"
        )
    A = pols[polarization]
    comps = []
    for i in range(3):
        kinds = [SIN, SIN, SIN]
        kinds[i] = COS
        comps.append(TrigPoly.term(L, A[i], tuple(kinds), m.k))
    return TrigVectorField(comps)


def mode_row(m: ModeIndex) -> dict:
    """Flat record for the documented oracle CSV schema."""
    lam = eigenvalue(m)
    return {
        "family": m.family,
        "l1": m.lengths[0],
        "l2": m.lengths[1],
        "l3": m.lengths[2],
        "k1": m.k[0],
        "k2": m.k[1],
        "k3": m.k[2],
        "eigenvalue": lam,
        "gap": math.sqrt(lam),
    }
