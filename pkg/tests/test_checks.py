import numpy as np
import pytest

from derham_gap.checks import (
    BoundaryTermReport,
    ball_ibp_residual,
    cube_ibp_residual,
    gaffney_residual,
    h2_bound_residual,
)
from derham_gap.errors import DerhamGapError
from derham_gap.fields import (
    COS,
    SIN,
    LinearVector,
    PolyVector,
    TrigPoly,
    TrigScalarField,
    identity_field,
)
from derham_gap.modes import ModeIndex, list_eigenvalues, mode_field
from derham_gap.quadrature import ball_rule, box_rule, sphere_rule


def test_quadrature_self_tests_pass():
    box_rule((1.0, 2.0, 0.5), order=8)
    ball_rule(order=10)
    sphere_rule(order=10)


def test_pointwise_key_identity_random_polynomials():
    """rot.rot + div.div = gradE:gradF - sum_kl (dE_k/dx_l dF_l/dx_k - dE_k/dx_k dF_l/dx_l)."""
    rng = np.random.default_rng(0)
    E = PolyVector.random(rng, degree=3)
    F = PolyVector.random(rng, degree=3)
    pts = rng.uniform(-1.0, 1.0, size=(1000, 3))
    JE, JF = E.jacobian(pts), F.jacobian(pts)
    lhs = np.einsum("ni,ni->n", E.curl(pts), F.curl(pts)) + E.div(pts) * F.div(pts)
    frob = np.einsum("nij,nij->n", JE, JF)
    corr = np.einsum("nkl,nlk->n", JE, JF) - E.div(pts) * F.div(pts)
    scale = np.max(np.abs(frob)) + 1.0
    assert np.max(np.abs(lhs - (frob - corr))) < 1e-12 * scale


def test_cube_ibp_constant_field():
    E = LinearVector(np.zeros((3, 3)), b=(1.0, 2.0, -0.5))
    rep = cube_ibp_residual(E, E)
    for val in (rep.grad_term, rep.rot_term, rep.div_term, rep.boundary_term, rep.residual):
        assert abs(val) < 1e-13


def test_cube_ibp_identity_field():
    E = identity_field()
    rep = cube_ibp_residual(E, E)
    assert rep.grad_term == pytest.approx(3.0, abs=1e-12)
    assert rep.rot_term == pytest.approx(0.0, abs=1e-12)
    assert rep.div_term == pytest.approx(9.0, abs=1e-12)
    assert rep.boundary_term == pytest.approx(-6.0, abs=1e-12)
    assert abs(rep.residual) < 1e-12


def test_cube_ibp_random_polynomials():
    rng = np.random.default_rng(1)
    for _ in range(3):
        E = PolyVector.random(rng, degree=2)
        F = PolyVector.random(rng, degree=2)
        rep = cube_ibp_residual(E, F)
        scale = abs(rep.grad_term) + abs(rep.div_term) + 1.0
        assert abs(rep.residual) < 1e-10 * scale


def test_cube_ibp_cavity_mode_boundary_term_vanishes():
    E = mode_field(ModeIndex("maxwell_cavity", (0, 1, 1), (1.0, 1.0, 1.0)))
    rep = cube_ibp_residual(E, E)
    assert abs(rep.boundary_term) < 1e-10
    assert abs(rep.residual) < 1e-10
    # Gaffney equality emerges
    assert rep.grad_term == pytest.approx(rep.rot_term + rep.div_term, abs=1e-10)


def test_ball_identity_for_identity_field():
    """E = id: 3|B| = 9|B| - 2|S|, i.e. the sphere area is 3x the ball volume."""
    E = identity_field()
    rep = ball_ibp_residual(E, "tangential_zero")
    vol = 4.0 * np.pi / 3.0
    assert rep.grad_term == pytest.approx(3.0 * vol, rel=1e-10)
    assert rep.div_term == pytest.approx(9.0 * vol, rel=1e-10)
    assert rep.boundary_term == pytest.approx(-2.0 * (4.0 * np.pi), rel=1e-10)
    assert abs(rep.residual) < 1e-6


def test_ball_identity_tangent_field():
    E = LinearVector(np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))
    rep = ball_ibp_residual(E, "normal_zero")
    vol = 4.0 * np.pi / 3.0
    assert rep.grad_term == pytest.approx(2.0 * vol, rel=1e-10)
    assert rep.rot_term == pytest.approx(4.0 * vol, rel=1e-10)
    assert rep.boundary_term == pytest.approx(-8.0 * np.pi / 3.0, rel=1e-8)
    assert abs(rep.residual) < 1e-6


def test_ball_zero_field():
    E = LinearVector(np.zeros((3, 3)))
    rep = ball_ibp_residual(E, "tangential_zero")
    assert rep.grad_term == rep.rot_term == rep.div_term == rep.boundary_term == 0.0


def test_ball_rejects_inadmissible_field():
    E = LinearVector(np.zeros((3, 3)), b=(1.0, 0.0, 0.0))
    with pytest.raises(DerhamGapError):
        ball_ibp_residual(E, "tangential_zero")


def test_gaffney_exact_for_cavity_modes():
    E = mode_field(ModeIndex("maxwell_cavity", (0, 1, 1), (1.0, 1.0, 1.0)))
    assert abs(gaffney_residual(E, (1.0, 1.0, 1.0), "tangential_zero")) < 1e-10


def test_gaffney_exact_for_gradient_of_dirichlet_mode():
    u = mode_field(ModeIndex("dirichlet_scalar", (1, 2, 1), (1.0, 1.0, 1.0)))
    E = u.grad_field()
    assert abs(gaffney_residual(E, (1.0, 1.0, 1.0), "tangential_zero")) < 1e-10


def test_gaffney_constant_field_free():
    E = LinearVector(np.zeros((3, 3)), b=(0.0, 0.0, 0.0))
    assert gaffney_residual(E, (1.0, 1.0, 1.0), "tangential_zero") == pytest.approx(0.0)


def test_gaffney_rejects_wrong_trace():
    E = identity_field()  # tangential trace nonzero on box faces
    with pytest.raises(DerhamGapError):
        gaffney_residual(E, (1.0, 1.0, 1.0), "tangential_zero")


def test_gaffney_never_positive_across_mode_library():
    lengths = (2.0, 1.0, 1.0)
    for lam, m in list_eigenvalues("maxwell_cavity", lengths, 10):
        E = mode_field(m)
        r = gaffney_residual(E, lengths, "tangential_zero")
        assert r <= 1e-10
    for lam, m in list_eigenvalues("neumann_scalar", lengths, 10):
        E = mode_field(m).grad_field()
        r = gaffney_residual(E, lengths, "normal_zero")
        assert r <= 1e-10


def test_h2_equality_dirichlet_mode():
    u = TrigScalarField(TrigPoly.term((1.0, 1.0, 1.0), 1.0, (SIN, SIN, SIN), (1, 1, 1)))
    res = h2_bound_residual(u)
    hess = sum(u.poly.diff(i).diff(j).norm_sq() for i in range(3) for j in range(3))
    assert hess == pytest.approx(9.0 * np.pi**4 / 8.0, rel=1e-12)
    assert abs(res) < 1e-10


def test_h2_equality_neumann_mode():
    u = TrigScalarField(TrigPoly.term((1.0, 1.0, 1.0), 1.0, (COS, COS, COS), (1, 0, 0)))
    hess = sum(u.poly.diff(i).diff(j).norm_sq() for i in range(3) for j in range(3))
    assert hess == pytest.approx(np.pi**4 / 2.0, rel=1e-12)
    assert abs(h2_bound_residual(u)) < 1e-10


def test_h2_affine_both_sides_zero():
    u = TrigScalarField(TrigPoly.term((1.0, 1.0, 1.0), 1.0, (COS, COS, COS), (0, 0, 0)))
    assert h2_bound_residual(u) == pytest.approx(0.0, abs=1e-14)


def test_report_record_schema():
    rep = BoundaryTermReport("cube_ibp", 1.0, 0.25, 0.25, 0.5)
    rec = rep.record(field="demo", domain="cube", bc="free")
    assert set(rec) == {"check", "field", "domain", "bc", "lhs", "rhs_terms", "residual"}
    assert rec["residual"] == pytest.approx(0.0)
