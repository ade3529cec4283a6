"""Gauss quadrature rules on boxes, box faces, the unit ball and the sphere.

Each rule self-tests its declared polynomial exactness on monomials at build
time, so downstream residual checks can trust the integration error budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DerhamGapError


def _gauss_1d(lo: float, hi: float, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


@dataclass
class QuadratureRule:
    kind: str
    points: np.ndarray   # (n, 3)
    weights: np.ndarray  # (n,)
    region: str
    exact_degree: int

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise DerhamGapError("quadrature weights must be positive")

    def integrate(self, func) -> float:
        return float(self.weights @ np.asarray(func(self.points), dtype=float))

    def integrate_dot(self, fa, fb) -> float:
        va = np.asarray(fa(self.points), dtype=float)
        vb = np.asarray(fb(self.points), dtype=float)
        prod = va * vb
        while prod.ndim > 1:
            prod = prod.sum(axis=-1)
        return float(self.weights @ prod)


def box_rule(lengths, order: int = 24) -> QuadratureRule:
    """Tensor Gauss-Legendre rule over (0,l1) x (0,l2) x (0,l3)."""
    xs, ws = zip(*[_gauss_1d(0.0, L, order) for L in lengths])
    X, Y, Z = np.meshgrid(*xs, indexing="ij")
    W = ws[0][:, None, None] * ws[1][None, :, None] * ws[2][None, None, :]
    rule = QuadratureRule(
        "tensor_gauss",
        np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1),
        W.ravel(),
        region=f"box{tuple(lengths)}",
        exact_degree=2 * order - 1,
    )
    _self_test_box(rule, lengths)
    return rule


def _self_test_box(rule: QuadratureRule, lengths, max_power: int = 4):
    for p in range(max_power + 1):
        got = rule.integrate(lambda pts, p=p: pts[:, 0] ** p)
        want = lengths[0] ** (p + 1) / (p + 1) * lengths[1] * lengths[2]
        if abs(got - want) > 1e-13 * max(1.0, abs(want)):
            raise DerhamGapError(f"box rule failed monomial self-test at power {p}")


@dataclass
class FaceRule:
    """2-D Gauss rules on the six faces of a box, with outward normals."""

    lengths: tuple
    order: int

    def __post_init__(self):
        self.faces = []
        L = self.lengths
        for axis in range(3):
            t1, t2 = (axis + 1) % 3, (axis + 2) % 3
            x1, w1 = _gauss_1d(0.0, L[t1], self.order)
            x2, w2 = _gauss_1d(0.0, L[t2], self.order)
            A, B = np.meshgrid(x1, x2, indexing="ij")
            W = (w1[:, None] * w2[None, :]).ravel()
            for side, coord in ((0, 0.0), (1, L[axis])):
                pts = np.zeros((A.size, 3))
                pts[:, axis] = coord
                pts[:, t1] = A.ravel()
                pts[:, t2] = B.ravel()
                normal = np.zeros(3)
                normal[axis] = -1.0 if side == 0 else 1.0
                self.faces.append((axis, side, pts, W, normal))
        area = sum(float(np.sum(W)) for _, _, _, W, _ in self.faces)
        want = 2 * (L[0] * L[1] + L[1] * L[2] + L[0] * L[2])
        if abs(area - want) > 1e-12 * want:
            raise DerhamGapError("face rule failed area self-test")


def ball_rule(order: int = 24) -> QuadratureRule:
    """Product Gauss rule on the unit ball in spherical coordinates."""
    r, wr = _gauss_1d(0.0, 1.0, order)
    t, wt = _gauss_1d(0.0, np.pi, order)
    p, wp = _gauss_1d(0.0, 2.0 * np.pi, order)
    R, T, P = np.meshgrid(r, t, p, indexing="ij")
    pts = np.stack(
        [
            (R * np.sin(T) * np.cos(P)).ravel(),
            (R * np.sin(T) * np.sin(P)).ravel(),
            (R * np.cos(T)).ravel(),
        ],
        axis=-1,
    )
    W = (
        (wr * r**2)[:, None, None]
        * (wt * np.sin(t))[None, :, None]
        * wp[None, None, :]
    ).ravel()
    rule = QuadratureRule("sphere_product", pts, W, region="ball", exact_degree=order)
    vol = float(np.sum(W))
    if abs(vol - 4.0 * np.pi / 3.0) > 1e-10:
        raise DerhamGapError("ball rule failed volume self-test")
    return rule


def sphere_rule(order: int = 24) -> QuadratureRule:
    """Product Gauss rule on the unit sphere surface."""
    t, wt = _gauss_1d(0.0, np.pi, order)
    p, wp = _gauss_1d(0.0, 2.0 * np.pi, order)
    T, P = np.meshgrid(t, p, indexing="ij")
    pts = np.stack(
        [
            (np.sin(T) * np.cos(P)).ravel(),
            (np.sin(T) * np.sin(P)).ravel(),
            np.cos(T).ravel(),
        ],
        axis=-1,
    )
    W = ((wt * np.sin(t))[:, None] * wp[None, :]).ravel()
    rule = QuadratureRule("sphere_product", pts, W, region="sphere", exact_degree=order)
    if abs(float(np.sum(W)) - 4.0 * np.pi) > 1e-10:
        raise DerhamGapError("sphere rule failed area self-test")
    return rule
