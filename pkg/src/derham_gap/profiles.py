"""Trapezoid profile family and the fields built from it.

The profile ramps 0 -> 1 on [1, 2], holds 1 up to n, ramps back down on
[n, n+1] and vanishes elsewhere.  Fields assembled from it witness the loss
of closed-range inequalities on domains that are unbounded in too many
directions: their norms grow faster than the norms of their derivatives.
Norms are exact piecewise-polynomial integrals where possible and
breakpoint-respecting Gauss quadrature otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DerhamGapError

KINDS = ("grad_rn", "curl_db1", "curl_db0", "div_db2", "div_db1", "div_db0")


@dataclass(frozen=True)
class TrapezoidProfile:
    """Continuous piecewise-linear plateau profile with unit ramps."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DerhamGapError("profile needs n >= 2")

    @property
    def breakpoints(self) -> tuple[float, float, float, float]:
        return (1.0, 2.0, float(self.n), float(self.n) + 1.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = float(self.n)
        up = (t - 1.0) * ((t >= 1.0) & (t < 2.0))
        flat = 1.0 * ((t >= 2.0) & (t < n))
        down = (1.0 + n - t) * ((t >= n) & (t < n + 1.0))
        return up + flat + down

    def derivative(self, t):
        """a.e. derivative; on a breakpoint the right-sided value is returned."""
        t = np.asarray(t, dtype=float)
        n = float(self.n)
        return 1.0 * ((t >= 1.0) & (t < 2.0)) - 1.0 * ((t >= n) & (t < n + 1.0))

    def antiderivative(self, t):
        """Integral of the profile from 0 to t (piecewise quadratic)."""
        t = np.asarray(t, dtype=float)
        n = float(self.n)
        out = np.zeros_like(t)
        m = (t >= 1.0) & (t < 2.0)
        out[m] = 0.5 * (t[m] - 1.0) ** 2
        m = (t >= 2.0) & (t < n)
        out[m] = 0.5 + (t[m] - 2.0)
        m = (t >= n) & (t < n + 1.0)
        out[m] = 0.5 + (n - 2.0) + 0.5 - 0.5 * (1.0 + n - t[m]) ** 2
        out[t >= n + 1.0] = n - 1.0
        return out

    def on_breakpoint(self, t, tol: float = 0.0) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        mask = np.zeros(t.shape, dtype=bool)
        for b in self.breakpoints:
            mask |= np.abs(t - b) <= tol
        return mask


def profile(n: int) -> TrapezoidProfile:
    return TrapezoidProfile(n)


def profile_l2_squared(n: int) -> float:
    """Exact integral of the squared profile: two ramps at 1/3 plus the plateau."""
    if n < 2:
        raise DerhamGapError("profile needs n >= 2")
    return (n - 2.0) + 2.0 / 3.0


def _poly_piece_integral(coeffs, lo: float, hi: float) -> float:
    """Integral over [lo, hi] of sum coeffs[k] * r^k, exactly."""
    total = 0.0
    for k, c in enumerate(coeffs):
        total += c * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
    return total


def profile_sq_moment(n: int, p: int) -> float:
    """Exact integral of f^2 * r^p over the support."""
    nn = float(n)
    # (r-1)^2 r^p on [1,2]
    up = _poly_piece_integral([0.0] * p + [1.0, -2.0, 1.0], 1.0, 2.0)
    mid = _poly_piece_integral([0.0] * p + [1.0], 2.0, nn)
    c = nn + 1.0
    down = _poly_piece_integral([0.0] * p + [c * c, -2.0 * c, 1.0], nn, c)
    return up + mid + down


def profile_deriv_sq_moment(n: int, p: int) -> float:
    """Exact integral of (f')^2 * r^p: the two unit ramps."""
    nn = float(n)
    return _poly_piece_integral([0.0] * p + [1.0], 1.0, 2.0) + _poly_piece_integral(
        [0.0] * p + [1.0], nn, nn + 1.0
    )


def _radial_segments(prof: TrapezoidProfile) -> list[tuple[float, float]]:
    """Breakpoint pieces with the plateau split dyadically for quadrature."""
    segs = [(1.0, 2.0)]
    lo = 2.0
    while lo < prof.n:
        hi = min(2.0 * lo, float(prof.n))
        segs.append((lo, hi))
        lo = hi
    segs.append((float(prof.n), float(prof.n) + 1.0))
    return segs


def _gauss(lo: float, hi: float, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


class CounterexampleField:
    """One member of a family violating a closed-range inequality.

    `norm_sq` and `dnorm_sq` return the squared field norm and the squared
    norm of its relevant derivative (gradient or curl).  The ratio
    sqrt(norm_sq/dnorm_sq) diverges along n for every kind.
    """

    def __init__(self, kind: str, n: int, dim: int | None = None):
        if kind not in KINDS:
            raise DerhamGapError(f"unknown counterexample kind {kind!r}")
        self.kind = kind
        self.n = n
        self.profile = profile(n)
        if kind == "grad_rn":
            if dim not in (1, 2, 3):
                raise DerhamGapError("grad_rn needs dim in {1, 2, 3}")
            self.dim = dim
        else:
            self.dim = 3

    # ------------------------------------------------------------------
    # exact norms
    def norm_sq(self) -> float:
        n = self.n
        if self.kind == "grad_rn":
            surface = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}[self.dim]
            return surface * profile_sq_moment(n, self.dim - 1)
        if self.kind == "div_db0":
            return 4.0 * np.pi * profile_sq_moment(n, 2)
        if self.kind in ("div_db1", "curl_db1"):
            # slab of unit height, radial profile in the two unbounded axes
            return 2.0 * np.pi * profile_sq_moment(n, 1)
        if self.kind == "div_db2":
            return profile_l2_squared(n)
        # curl_db0: |E|^2 = f^2 sin^2(theta); angular factor 8 pi / 3
        return 8.0 * np.pi / 3.0 * profile_sq_moment(n, 2)

    def dnorm_sq(self) -> float:
        n = self.n
        if self.kind == "grad_rn":
            surface = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}[self.dim]
            return surface * profile_deriv_sq_moment(n, self.dim - 1)
        if self.kind == "div_db0":
            return 4.0 * np.pi * profile_deriv_sq_moment(n, 2)
        if self.kind in ("div_db1", "curl_db1"):
            return 2.0 * np.pi * profile_deriv_sq_moment(n, 1)
        if self.kind == "div_db2":
            return profile_deriv_sq_moment(n, 0)
        return self._curl_db0_rot_sq()

    def ratio(self) -> float:
        return math.sqrt(self.norm_sq() / self.dnorm_sq())

    def _curl_db0_rot_sq(self, radial_order: int = 24, theta_order: int = 24) -> float:
        """|rot E|^2 integrated in spherical coordinates, piecewise Gauss."""
        f, fp = self.profile, self.profile.derivative
        tt, tw = _gauss(0.0, np.pi, theta_order)
        s, c = np.sin(tt), np.cos(tt)
        total = 0.0
        for lo, hi in _radial_segments(self.profile):
            rr, rw = _gauss(lo, hi, radial_order)
            a = f(rr) / rr
            b = fp(rr)
            # integrand over (r, theta), phi integrated out to 2 pi
            ring = (b - a)[:, None] ** 2 * (s * c)[None, :] ** 2
            axial = (a[:, None] * (s**2 - 2.0)[None, :] - b[:, None] * (s**2)[None, :]) ** 2
            vals = (ring + axial) * (rr**2)[:, None] * s[None, :]
            total += 2.0 * np.pi * float(rw @ vals @ tw)
        return total

    def norm_sq_quadrature(self, radial_order: int = 24) -> float:
        """Same field norm by quadrature, for cross-checking the closed forms."""
        f = self.profile
        total = 0.0
        if self.kind == "curl_db0":
            p, angular = 2, 8.0 * np.pi / 3.0
        elif self.kind == "grad_rn":
            p = self.dim - 1
            angular = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}[self.dim]
        elif self.kind == "div_db0":
            p, angular = 2, 4.0 * np.pi
        elif self.kind == "div_db2":
            p, angular = 0, 1.0
        else:
            p, angular = 1, 2.0 * np.pi
        for lo, hi in _radial_segments(f):
            rr, rw = _gauss(lo, hi, radial_order)
            total += angular * float(rw @ (f(rr) ** 2 * rr**p))
        return total

    # ------------------------------------------------------------------
    # pointwise evaluators (3-D kinds)
    def value(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        f = self.profile
        if self.kind == "grad_rn":
            r = np.linalg.norm(pts[..., : self.dim], axis=-1)
            return f(r)
        if self.kind in ("div_db0",):
            return f(np.linalg.norm(pts, axis=-1))
        if self.kind == "div_db1":
            return f(np.linalg.norm(pts[..., :2], axis=-1))
        if self.kind == "div_db2":
            return f(pts[..., 2])
        if self.kind == "curl_db1":
            r = np.linalg.norm(pts[..., :2], axis=-1)
            out = np.zeros(pts.shape)
            out[..., 2] = f(r)
            return out
        # curl_db0
        r = np.maximum(np.linalg.norm(pts, axis=-1), 1e-300)
        g = f(r) / r
        out = np.zeros(pts.shape)
        out[..., 0] = g * pts[..., 1]
        out[..., 1] = -g * pts[..., 0]
        return out

    def curl(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        f, fp = self.profile, self.profile.derivative
        if self.kind == "curl_db1":
            r = np.maximum(np.linalg.norm(pts[..., :2], axis=-1), 1e-300)
            fac = fp(r) / r
            out = np.zeros(pts.shape)
            out[..., 0] = fac * pts[..., 1]
            out[..., 1] = -fac * pts[..., 0]
            return out
        if self.kind == "curl_db0":
            r = np.maximum(np.linalg.norm(pts, axis=-1), 1e-300)
            a = f(r) / r
            gp_r = (fp(r) - a) / r**2  # g'(r)/r with g = f/r
            out = np.zeros(pts.shape)
            out[..., 0] = gp_r * pts[..., 0] * pts[..., 2]
            out[..., 1] = gp_r * pts[..., 1] * pts[..., 2]
            rho_sq = pts[..., 0] ** 2 + pts[..., 1] ** 2
            out[..., 2] = -2.0 * a - gp_r * rho_sq
            return out
        raise DerhamGapError(f"kind {self.kind!r} has no curl evaluator")

    def grad(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        fp = self.profile.derivative
        if self.kind == "grad_rn" or self.kind == "div_db0":
            d = self.dim if self.kind == "grad_rn" else 3
            r = np.maximum(np.linalg.norm(pts[..., :d], axis=-1), 1e-300)
            out = np.zeros(pts.shape[:-1] + (3,))
            out[..., :d] = (fp(r) / r)[..., None] * pts[..., :d]
            return out
        if self.kind == "div_db1":
            r = np.maximum(np.linalg.norm(pts[..., :2], axis=-1), 1e-300)
            out = np.zeros(pts.shape[:-1] + (3,))
            out[..., :2] = (fp(r) / r)[..., None] * pts[..., :2]
            return out
        if self.kind == "div_db2":
            out = np.zeros(pts.shape[:-1] + (3,))
            out[..., 2] = fp(pts[..., 2])
            return out
        raise DerhamGapError(f"kind {self.kind!r} has no gradient evaluator")

    def breakpoint_mask(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.kind == "grad_rn":
            r = np.linalg.norm(pts[..., : self.dim], axis=-1)
        elif self.kind in ("div_db1", "curl_db1"):
            r = np.linalg.norm(pts[..., :2], axis=-1)
        elif self.kind == "div_db2":
            r = pts[..., 2]
        else:
            r = np.linalg.norm(pts, axis=-1)
        return self.profile.on_breakpoint(r, tol)


def counterexample(kind: str, n: int, dim: int | None = None) -> CounterexampleField:
    return CounterexampleField(kind, n, dim)


def scaling_table(kind: str, ns, dim: int | None = None) -> dict:
    """norm/derivative-norm growth along n, ready for slope fitting."""
    rows = []
    for n in ns:
        fld = counterexample(kind, int(n), dim)
        rows.append(
            {
                "kind": kind if dim is None else f"{kind}{dim}",
                "n": int(n),
                "norm_sq": fld.norm_sq(),
                "dnorm_sq": fld.dnorm_sq(),
                "ratio": fld.ratio(),
            }
        )
    return {"kind": rows[0]["kind"], "rows": rows}
