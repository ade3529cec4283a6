"""Integral identities: box integration by parts, ball identities with
curvature terms, the Gaffney equality on boxes, and the Hessian bound.

For vector fields E, F the identity

    <grad E, grad F> = <rot E, rot F> + <div E, div F> + boundary term

holds with a boundary term that is a pure surface integral.  On a box it
needs only in-face tangential derivatives; on the sphere, for fields with a
vanishing tangential or normal trace, it reduces to a curvature integral
(div nu = 2 and grad nu = I - nu nu^T on the unit sphere).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DerhamGapError
from .fields import TrigScalarField, TrigVectorField, VectorField
from .quadrature import FaceRule, QuadratureRule, box_rule, ball_rule, sphere_rule


@dataclass
class BoundaryTermReport:
    check: str
    grad_term: float
    rot_term: float
    div_term: float
    boundary_term: float

    @property
    def residual(self) -> float:
        return self.grad_term - self.rot_term - self.div_term - self.boundary_term

    def record(self, field: str = "", domain: str = "", bc: str = "") -> dict:
        return {
            "check": self.check,
            "field": field,
            "domain": domain,
            "bc": bc,
            "lhs": self.grad_term,
            "rhs_terms": [self.rot_term, self.div_term, self.boundary_term],
            "residual": self.residual,
        }


def _grad_rot_div_terms(E: VectorField, F: VectorField, rule: QuadratureRule):
    JE = E.jacobian(rule.points)
    JF = F.jacobian(rule.points)
    grad_term = float(rule.weights @ np.einsum("nij,nij->n", JE, JF))
    rot_term = float(rule.weights @ np.einsum("ni,ni->n", E.curl(rule.points), F.curl(rule.points)))
    div_term = float(rule.weights @ (E.div(rule.points) * F.div(rule.points)))
    return grad_term, rot_term, div_term


def cube_ibp_residual(
    E: VectorField,
    F: VectorField,
    lengths=(1.0, 1.0, 1.0),
    order: int = 24,
) -> BoundaryTermReport:
    """Box integration by parts with the flat-face boundary term.

    On the face with outward normal +/- e_k the boundary integrand is
    E_par . grad_par(+/-F_k) - (+/-E_k) div_par(F_par) where `par` collects
    the two in-face components and derivatives.
    """
    vol = box_rule(lengths, order)
    faces = FaceRule(tuple(lengths), order)
    grad_term, rot_term, div_term = _grad_rot_div_terms(E, F, vol)
    boundary = 0.0
    for axis, side, pts, W, normal in faces.faces:
        sgn = normal[axis]
        t1, t2 = (axis + 1) % 3, (axis + 2) % 3
        Ev = E.value(pts)
        Fv = F.value(pts)
        JF = F.jacobian(pts)
        term = sgn * (
            Ev[:, t1] * JF[:, axis, t1]
            + Ev[:, t2] * JF[:, axis, t2]
            - Ev[:, axis] * (JF[:, t1, t1] + JF[:, t2, t2])
        )
        boundary += float(W @ term)
    return BoundaryTermReport("cube_ibp", grad_term, rot_term, div_term, boundary)


def _sphere_trace_violation(E: VectorField, sphere: QuadratureRule, bc_class: str) -> float:
    pts = sphere.points
    vals = E.value(pts)
    if bc_class == "tangential_zero":
        cross = np.cross(pts, vals)
        return float(np.max(np.linalg.norm(cross, axis=-1)))
    normal = np.einsum("ni,ni->n", pts, vals)
    return float(np.max(np.abs(normal)))


def ball_ibp_residual(
    E: VectorField,
    bc_class: str,
    volume_order: int = 24,
    sphere_order: int = 24,
    trace_tol: float = 1e-8,
) -> BoundaryTermReport:
    """Unit-ball identity for a field with zero tangential or normal trace.

    tangential_zero:  |grad E|^2 = |rot E|^2 + |div E|^2 - int_S 2 |E_n|^2
    normal_zero:      |grad E|^2 = |rot E|^2 + |div E|^2 - int_S E.(I-nn^T)E
    """
    if bc_class not in ("tangential_zero", "normal_zero"):
        raise DerhamGapError("bc_class must be tangential_zero or normal_zero")
    vol = ball_rule(volume_order)
    sph = sphere_rule(sphere_order)
    violation = _sphere_trace_violation(E, sph, bc_class)
    if violation > trace_tol:
        raise DerhamGapError(
            f"field not in the admissible class: trace violation {violation:.3e}"
        )
    grad_term, rot_term, div_term = _grad_rot_div_terms(E, E, vol)
    pts = sph.points
    vals = E.value(pts)
    if bc_class == "tangential_zero":
        en = np.einsum("ni,ni->n", pts, vals)
        boundary = -2.0 * float(sph.weights @ en**2)
    else:
        en = np.einsum("ni,ni->n", pts, vals)
        et = vals - en[:, None] * pts
        # grad nu = I - nu nu^T on the unit sphere, applied to the tangent part
        boundary = -float(sph.weights @ np.einsum("ni,ni->n", et, et))
    return BoundaryTermReport("ball_ibp", grad_term, rot_term, div_term, boundary)


def _box_trace_violation(E: VectorField, lengths, bc_class: str, order: int = 12) -> float:
    faces = FaceRule(tuple(lengths), order)
    worst = 0.0
    for axis, side, pts, W, normal in faces.faces:
        vals = E.value(pts)
        if bc_class == "tangential_zero":
            t1, t2 = (axis + 1) % 3, (axis + 2) % 3
            worst = max(worst, float(np.max(np.abs(vals[:, [t1, t2]]))))
        else:
            worst = max(worst, float(np.max(np.abs(vals[:, axis]))))
    return worst


def gaffney_residual(
    E: VectorField,
    lengths=(1.0, 1.0, 1.0),
    bc_class: str = "tangential_zero",
    order: int = 24,
    trace_tol: float = 1e-10,
) -> float:
    """|grad E|^2 - |rot E|^2 - |div E|^2 over the box (exact for trig fields).

    Zero for fields with a clean tangential or normal trace on a box; the
    admissible class is enforced by sampling the faces.
    """
    if bc_class not in ("tangential_zero", "normal_zero"):
        raise DerhamGapError("bc_class must be tangential_zero or normal_zero")
    violation = _box_trace_violation(E, lengths, bc_class)
    if violation > trace_tol:
        raise DerhamGapError(
            f"field not in the admissible class: trace violation {violation:.3e}"
        )
    if isinstance(E, TrigVectorField):
        grad_term = E.grad_norm_sq()
        rot_term = E.curl_field().norm_sq()
        div_term = E.div_poly().norm_sq()
    else:
        vol = box_rule(lengths, order)
        grad_term, rot_term, div_term = _grad_rot_div_terms(E, E, vol)
    return grad_term - rot_term - div_term


def h2_bound_residual(u, lengths=(1.0, 1.0, 1.0), order: int = 24) -> float:
    """|laplacian u|^2 - |hessian u|^2 over the box; >= 0 for admissible u."""
    if isinstance(u, TrigScalarField):
        lap = u.laplacian_field().poly.norm_sq()
        hess = 0.0
        for i in range(3):
            for j in range(3):
                hess += u.poly.diff(i).diff(j).norm_sq()
        return lap - hess
    vol = box_rule(lengths, order)
    grad = u.grad_field() if hasattr(u, "grad_field") else None
    if grad is None:
        raise DerhamGapError("h2 residual needs a field with an analytic gradient")
    g, r, d = _grad_rot_div_terms(grad, grad, vol)
    # for a gradient field rot = 0, so |hessian|^2 = g and |lap|^2 = d
    return d - g
