"""Degree-graded pullbacks along bi-Lipschitz maps and their verification.

For a map Phi with Jacobian J (J_ij = dPhi_i/dx_j) the pullbacks are

    degree 0:  u o Phi
    degree 1:  J^T (E o Phi)
    degree 2:  adj(J) (H o Phi),  adj(J) = det(J) J^{-1}
    degree 3:  det(J) (f o Phi)

They commute with grad/curl/div, invert by pulling back along Phi^{-1}, and
pair adjointly across complementary degrees.  Built-in maps: identity, affine,
an L-shaped pipe (piecewise affine with a kink at r = 0) and a growing snail
shell (smooth, determinant rho * r * phi^(14/5) with rho the cylindrical
radius).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .errors import DerhamGapError, MaskViolationError
from .fields import fd_jacobian


@dataclass
class PiolaMap:
    name: str
    forward: Callable
    inverse: Callable
    jacobian: Callable                      # analytic J at reference points
    reference_box: tuple                    # ((lo,hi),)*3 sampling truncation
    det_fn: Callable | None = None          # closed-form determinant, optional
    mask_distance: Callable | None = None   # distance to the non-smooth locus

    def det(self, pts: np.ndarray) -> np.ndarray:
        if self.det_fn is not None:
            return self.det_fn(np.asarray(pts, dtype=float))
        return np.linalg.det(self.jacobian(pts))

    def adjugate(self, pts: np.ndarray) -> np.ndarray:
        J = self.jacobian(pts)
        return self.det(pts)[..., None, None] * np.linalg.inv(J)

    def check_mask(self, pts: np.ndarray, min_distance: float = 0.0) -> None:
        if self.mask_distance is None:
            return
        d = self.mask_distance(np.asarray(pts, dtype=float))
        if np.any(d <= min_distance):
            raise MaskViolationError(
                f"{self.name}: {int(np.sum(d <= min_distance))} sample(s) within "
                f"{min_distance} of the non-smooth locus"
            )

    def inverted(self) -> "PiolaMap":
        """The inverse map as a PiolaMap with J computed through Phi^{-1}."""

        def jac(pts):
            ref = self.inverse(pts)
            return np.linalg.inv(self.jacobian(ref))

        def det_fn(pts):
            return 1.0 / self.det(self.inverse(pts))

        mask = None
        if self.mask_distance is not None:
            mask = lambda pts: self.mask_distance(self.inverse(pts))
        lo = self.forward(np.array([b[0] for b in self.reference_box]))
        hi = self.forward(np.array([b[1] for b in self.reference_box]))
        box = tuple((min(a, b), max(a, b)) for a, b in zip(lo, hi))
        return PiolaMap(
            name=f"{self.name}^-1",
            forward=self.inverse,
            inverse=self.forward,
            jacobian=jac,
            reference_box=box,
            det_fn=det_fn,
            mask_distance=mask,
        )

    def sample_reference(self, count: int, seed: int = 0, margin: float = 0.0) -> np.ndarray:
        """Quasi-random (Halton) samples of the reference truncation box."""
        sampler = qmc.Halton(d=3, scramble=True, seed=seed)
        u = sampler.random(count)
        lo = np.array([b[0] + margin * (b[1] - b[0]) for b in self.reference_box])
        hi = np.array([b[1] - margin * (b[1] - b[0]) for b in self.reference_box])
        return lo + u * (hi - lo)


@dataclass
class PulledField:
    degree: int
    map: PiolaMap
    source: Callable

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        self.map.check_mask(pts)
        image = self.map.forward(pts)
        vals = np.asarray(self.source(image), dtype=float)
        if self.degree == 0:
            return vals
        if self.degree == 1:
            J = self.map.jacobian(pts)
            return np.einsum("...ji,...j->...i", J, vals)
        if self.degree == 2:
            return np.einsum("...ij,...j->...i", self.map.adjugate(pts), vals)
        return self.map.det(pts) * vals


def pullback(q: int, pmap: PiolaMap, field: Callable) -> PulledField:
    """Pull a field on the image domain back to the reference domain."""
    if q not in (0, 1, 2, 3):
        raise DerhamGapError("degree must be one of 0, 1, 2, 3")
    return PulledField(q, pmap, field)


# ----------------------------------------------------------------------
# built-in maps

def identity_map() -> PiolaMap:
    eye = np.eye(3)
    return PiolaMap(
        name="identity",
        forward=lambda pts: np.asarray(pts, dtype=float),
        inverse=lambda pts: np.asarray(pts, dtype=float),
        jacobian=lambda pts: np.broadcast_to(eye, np.shape(pts)[:-1] + (3, 3)).copy(),
        reference_box=((0.0, 1.0),) * 3,
        det_fn=lambda pts: np.ones(np.shape(pts)[:-1]),
    )


def affine_map(M, b=(0.0, 0.0, 0.0), reference_box=((0.0, 1.0),) * 3) -> PiolaMap:
    M = np.asarray(M, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.linalg.det(M) <= 0:
        raise DerhamGapError("affine map needs det > 0")
    Minv = np.linalg.inv(M)
    return PiolaMap(
        name="affine",
        forward=lambda pts: np.asarray(pts, dtype=float) @ M.T + b,
        inverse=lambda pts: (np.asarray(pts, dtype=float) - b) @ Minv.T,
        jacobian=lambda pts: np.broadcast_to(M, np.shape(pts)[:-1] + (3, 3)).copy(),
        reference_box=tuple(tuple(bb) for bb in reference_box),
        det_fn=lambda pts: np.full(np.shape(pts)[:-1], np.linalg.det(M)),
    )


def lpipe_map(half_length: float = 4.0) -> PiolaMap:
    """(r, t, s) -> (r, |r| + t, t + s): an infinite L-shaped pipe, det = 1."""

    def fwd(pts):
        pts = np.asarray(pts, dtype=float)
        out = np.empty_like(pts)
        out[..., 0] = pts[..., 0]
        out[..., 1] = np.abs(pts[..., 0]) + pts[..., 1]
        out[..., 2] = pts[..., 1] + pts[..., 2]
        return out

    def inv(pts):
        pts = np.asarray(pts, dtype=float)
        out = np.empty_like(pts)
        out[..., 0] = pts[..., 0]
        out[..., 1] = pts[..., 1] - np.abs(pts[..., 0])
        out[..., 2] = pts[..., 2] - pts[..., 1] + np.abs(pts[..., 0])
        return out

    def jac(pts):
        pts = np.asarray(pts, dtype=float)
        J = np.zeros(pts.shape[:-1] + (3, 3))
        J[..., 0, 0] = 1.0
        J[..., 1, 0] = np.sign(pts[..., 0])
        J[..., 1, 1] = 1.0
        J[..., 2, 1] = 1.0
        J[..., 2, 2] = 1.0
        return J

    return PiolaMap(
        name="lpipe",
        forward=fwd,
        inverse=inv,
        jacobian=jac,
        reference_box=((-half_length, half_length), (0.0, 1.0), (0.0, 1.0)),
        det_fn=lambda pts: np.ones(np.shape(pts)[:-1]),
        mask_distance=lambda pts: np.abs(np.asarray(pts, dtype=float)[..., 0]),
    )


_SNAIL_BOX = ((1.0, 1.0 + 2.0 * np.pi), (0.0, 2.0 * np.pi), (0.5, 1.0))


def _snail_forward(pts):
    pts = np.asarray(pts, dtype=float)
    phi, psi, r = pts[..., 0], pts[..., 1], pts[..., 2]
    tube = r * phi**1.4
    rho = phi**2 + tube * np.cos(psi)
    out = np.empty_like(pts)
    out[..., 0] = np.cos(phi) * rho
    out[..., 1] = np.sin(phi) * rho
    out[..., 2] = tube * np.sin(psi)
    return out


def _snail_jacobian(pts):
    pts = np.asarray(pts, dtype=float)
    phi, psi, r = pts[..., 0], pts[..., 1], pts[..., 2]
    c, s = np.cos(phi), np.sin(phi)
    cp, sp = np.cos(psi), np.sin(psi)
    tube = r * phi**1.4
    rho = phi**2 + tube * cp
    rho_phi = 2.0 * phi + 1.4 * r * phi**0.4 * cp
    rho_psi = -tube * sp
    rho_r = phi**1.4 * cp
    z_phi = 1.4 * r * phi**0.4 * sp
    z_psi = tube * cp
    z_r = phi**1.4 * sp
    J = np.empty(pts.shape[:-1] + (3, 3))
    J[..., 0, 0] = -s * rho + c * rho_phi
    J[..., 0, 1] = c * rho_psi
    J[..., 0, 2] = c * rho_r
    J[..., 1, 0] = c * rho + s * rho_phi
    J[..., 1, 1] = s * rho_psi
    J[..., 1, 2] = s * rho_r
    J[..., 2, 0] = z_phi
    J[..., 2, 1] = z_psi
    J[..., 2, 2] = z_r
    return J


def _snail_det(pts):
    pts = np.asarray(pts, dtype=float)
    phi, psi, r = pts[..., 0], pts[..., 1], pts[..., 2]
    rho = phi**2 + r * phi**1.4 * np.cos(psi)
    return rho * r * phi**2.8


_SNAIL_SENTINEL = np.array([0.5, 0.0, 2.0])  # outside the reference box, J finite


def _snail_inverse(pts, tol: float = 1e-13, maxiter: int = 60):
    """Vectorized Newton inversion with a branch-resolved geometric seed.

    Points without a preimage in the (extended) shell are mapped to a fixed
    sentinel outside the reference box, so compactly supported reference-side
    integrands vanish there instead of propagating NaNs.
    """
    pts = np.asarray(pts, dtype=float)
    flat = pts.reshape(-1, 3)
    R = np.linalg.norm(flat[:, :2], axis=1)
    phi_est = np.sqrt(np.maximum(R, 1e-12))
    theta = np.mod(np.arctan2(flat[:, 1], flat[:, 0]), 2.0 * np.pi)
    m = np.round((phi_est - theta) / (2.0 * np.pi))
    phi0 = np.clip(theta + 2.0 * np.pi * m, 0.2, 60.0)
    off = R - phi0**2
    psi0 = np.mod(np.arctan2(flat[:, 2], off), 2.0 * np.pi)
    r0 = np.clip(np.hypot(off, flat[:, 2]) / phi0**1.4, 0.4, 1.2)
    x = np.stack([phi0, psi0, r0], axis=1)
    scale = np.maximum(np.linalg.norm(flat, axis=1), 1.0)
    active = np.arange(flat.shape[0])
    for _ in range(maxiter):
        resid = _snail_forward(x[active]) - flat[active]
        err = np.linalg.norm(resid, axis=1) / scale[active]
        live = err >= tol
        active = active[live]
        if active.size == 0:
            break
        resid = resid[live]
        J = _snail_jacobian(x[active])
        ok = np.abs(np.linalg.det(J)) > 1e-12
        step = np.zeros_like(resid)
        step[ok] = np.linalg.solve(J[ok], resid[ok][..., None])[..., 0]
        x[active] = x[active] - step
        x[active, 0] = np.clip(x[active, 0], 0.2, 60.0)
        x[active, 2] = np.clip(x[active, 2], 1e-3, 10.0)
    resid = np.linalg.norm(_snail_forward(x) - flat, axis=1) / scale
    bad = resid > 1e-9
    if np.any(bad):
        x[bad] = _SNAIL_SENTINEL
    return x.reshape(pts.shape)


def snail_map() -> PiolaMap:
    """Growing snail shell, truncated to one turn for sampling.

    det J = (phi^2 + r phi^1.4 cos psi) * r * phi^2.8: the cylindrical-radius
    factor vanishes at the corner phi -> 1, psi -> pi, r -> 1, so the
    determinant has no uniform positive lower bound there even though it is
    positive throughout the open box.
    """
    return PiolaMap(
        name="snail",
        forward=_snail_forward,
        inverse=_snail_inverse,
        jacobian=_snail_jacobian,
        reference_box=_SNAIL_BOX,
        det_fn=_snail_det,
    )


def compose(outer: PiolaMap, inner: PiolaMap) -> PiolaMap:
    """outer o inner, with the chain-rule Jacobian; outer must be smooth."""
    if outer.mask_distance is not None:
        raise DerhamGapError("composition through a masked outer map is unsupported")

    def jac(pts):
        Ji = inner.jacobian(pts)
        Jo = outer.jacobian(inner.forward(pts))
        return np.einsum("...ij,...jk->...ik", Jo, Ji)

    return PiolaMap(
        name=f"{outer.name}*{inner.name}",
        forward=lambda pts: outer.forward(inner.forward(pts)),
        inverse=lambda pts: inner.inverse(outer.inverse(pts)),
        jacobian=jac,
        reference_box=inner.reference_box,
        mask_distance=inner.mask_distance,
    )


def user_map(name: str, forward, inverse, reference_box,
             fd_step: float = 1e-6) -> PiolaMap:
    """Wrap a user-supplied forward/inverse pair with a finite-difference
    Jacobian (reduced accuracy: O(fd_step^2) instead of analytic)."""
    return PiolaMap(
        name=name,
        forward=forward,
        inverse=inverse,
        jacobian=lambda pts: fd_jacobian(forward, pts, h=fd_step),
        reference_box=tuple(tuple(b) for b in reference_box),
    )


def map_registry(spec: str) -> PiolaMap:
    """Resolve 'identity', 'affine:<9+3 numbers>', 'lpipe' or 'snail'."""
    if spec == "identity":
        return identity_map()
    if spec == "lpipe":
        return lpipe_map()
    if spec == "snail":
        return snail_map()
    if spec.startswith("affine:"):
        vals = [float(v) for v in spec.split(":", 1)[1].split(",")]
        if len(vals) != 12:
            raise DerhamGapError("affine map needs 9 matrix + 3 offset numbers")
        return affine_map(np.array(vals[:9]).reshape(3, 3), vals[9:])
    raise DerhamGapError(f"unknown map {spec!r}")


# ----------------------------------------------------------------------
# verification operations

def _fd_grad(fn, pts, h):
    cols = []
    for ax in range(3):
        e = np.zeros(3)
        e[ax] = h
        cols.append((fn(pts + e) - fn(pts - e)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def commutation_residual(q: int, pmap: PiolaMap, field, h: float = 1e-4,
                         samples: np.ndarray | None = None, count: int = 200,
                         seed: int = 0) -> float:
    """Max mismatch between a finite-difference derivative of the pulled-back
    field and the pullback of the analytic derivative; O(h^2) for smooth maps.
    """
    if samples is None:
        samples = pmap.sample_reference(count, seed=seed, margin=0.05)
        if pmap.mask_distance is not None:
            samples = samples[pmap.mask_distance(samples) > 3.0 * h]
    pmap.check_mask(samples, min_distance=3.0 * h - 1e-15)
    if q == 0:
        low = pullback(0, pmap, field.value)
        high = pullback(1, pmap, field.grad)
        fd = _fd_grad(low, samples, h)
    elif q == 1:
        low = pullback(1, pmap, field.value)
        high = pullback(2, pmap, field.curl)
        J = _fd_grad(low, samples, h)  # J[..., i, j] = d(low_i)/dx_j
        fd = np.stack(
            [
                J[..., 2, 1] - J[..., 1, 2],
                J[..., 0, 2] - J[..., 2, 0],
                J[..., 1, 0] - J[..., 0, 1],
            ],
            axis=-1,
        )
    elif q == 2:
        low = pullback(2, pmap, field.value)
        high = pullback(3, pmap, field.div)
        J = _fd_grad(low, samples, h)
        fd = J[..., 0, 0] + J[..., 1, 1] + J[..., 2, 2]
    else:
        raise DerhamGapError("commutation defined for degrees 0, 1, 2")
    return float(np.max(np.abs(fd - high(samples))))


def _box_gauss(box, order):
    axes = [np.polynomial.legendre.leggauss(order) for _ in range(3)]
    xs, ws = [], []
    for (lo, hi), (x, w) in zip(box, axes):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        xs.append(mid + half * x)
        ws.append(half * w)
    X, Y, Z = np.meshgrid(*xs, indexing="ij")
    W = ws[0][:, None, None] * ws[1][None, :, None] * ws[2][None, None, :]
    return np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1), W.ravel()


def adjoint_residual(q: int, pmap: PiolaMap, E, Psi, theta_box=None,
                     omega_box=None, order: int = 40) -> float:
    """|<tau_q E, Psi>_Theta - <E, tau_{3-q} Psi along the inverse>_Omega|.

    E lives on the image domain, Psi on the reference domain; both should be
    supported inside the given integration boxes (smooth bumps).  The two
    integrals are computed on independent Gauss grids.
    """
    theta_box = theta_box or pmap.reference_box
    if omega_box is None:
        corners = np.array(
            [[b[i] for b, i in zip(theta_box, idx)]
             for idx in np.ndindex(2, 2, 2)]
        )
        images = pmap.forward(corners)
        omega_box = tuple((float(images[:, a].min()), float(images[:, a].max())) for a in range(3))
    lhs_pts, lhs_w = _box_gauss(theta_box, order)
    pulled = pullback(q, pmap, E)
    va = np.asarray(pulled(lhs_pts))
    vb = np.asarray(Psi(lhs_pts))
    prod = va * vb
    while prod.ndim > 1:
        prod = prod.sum(axis=-1)
    lhs = float(lhs_w @ prod)

    rhs_pts, rhs_w = _box_gauss(omega_box, order)
    back = pullback(3 - q, pmap.inverted(), Psi)
    wa = np.asarray(E(rhs_pts))
    wb = np.asarray(back(rhs_pts))
    prod2 = wa * wb
    while prod2.ndim > 1:
        prod2 = prod2.sum(axis=-1)
    rhs = float(rhs_w @ prod2)
    return abs(lhs - rhs)


def inverse_roundtrip(q: int, pmap: PiolaMap, field, samples: np.ndarray | None = None,
                      count: int = 300, seed: int = 0, mask_margin: float = 0.1) -> float:
    """Max pointwise |tau_q along Phi^{-1} of (tau_q along Phi of field) - field|."""
    if samples is None:
        samples = pmap.sample_reference(count, seed=seed, margin=0.02)
        if pmap.mask_distance is not None:
            samples = samples[pmap.mask_distance(samples) > mask_margin]
    image_pts = pmap.forward(samples)
    pulled = pullback(q, pmap, field)
    back = pullback(q, pmap.inverted(), pulled)
    return float(np.max(np.abs(back(image_pts) - np.asarray(field(image_pts)))))


def jacobian_fd_residual(pmap: PiolaMap, samples: np.ndarray, h: float = 1e-6) -> float:
    """Max difference between the analytic Jacobian and central differences."""
    J = pmap.jacobian(samples)
    Jfd = fd_jacobian(pmap.forward, samples, h=h)
    return float(np.max(np.abs(J - Jfd)))
