import numpy as np
import pytest

from derham_gap.errors import DerhamGapError, MaskViolationError
from derham_gap.fields import (
    COS,
    SIN,
    BumpScalar,
    BumpVector,
    GaussianBump,
    GaussianBumpVector,
    TrigPoly,
    TrigScalarField,
    TrigVectorField,
)
from derham_gap.piola import (
    adjoint_residual,
    affine_map,
    commutation_residual,
    compose,
    identity_map,
    inverse_roundtrip,
    jacobian_fd_residual,
    lpipe_map,
    map_registry,
    pullback,
    snail_map,
)


def trig_vector():
    L = (20.0, 20.0, 20.0)  # long periods: smooth, non-trivial on all maps
    return TrigVectorField(
        [
            TrigPoly.term(L, 1.0, (COS, SIN, SIN), (1, 1, 2)),
            TrigPoly.term(L, -0.6, (SIN, COS, SIN), (2, 1, 1)),
            TrigPoly.term(L, 0.4, (SIN, SIN, COS), (1, 2, 1)),
        ]
    )


def trig_scalar():
    return TrigScalarField(TrigPoly.term((20.0, 20.0, 20.0), 1.0, (SIN, COS, SIN), (1, 2, 1)))


MAPS = {
    "identity": identity_map(),
    "affine": affine_map([[2.0, 0.3, 0.0], [0.0, 1.0, 0.1], [0.2, 0.0, 1.5]], (0.5, -1.0, 2.0)),
    "lpipe": lpipe_map(),
    "snail": snail_map(),
}


@pytest.mark.parametrize("name", list(MAPS))
def test_forward_inverse_roundtrip(name):
    pmap = MAPS[name]
    pts = pmap.sample_reference(200, seed=1, margin=0.02)
    if pmap.mask_distance is not None:
        pts = pts[pmap.mask_distance(pts) > 0.1]
    back = pmap.inverse(pmap.forward(pts))
    assert np.max(np.abs(back - pts)) < 1e-10


@pytest.mark.parametrize("name", list(MAPS))
def test_jacobian_matches_fd(name):
    pmap = MAPS[name]
    pts = pmap.sample_reference(100, seed=2, margin=0.05)
    if pmap.mask_distance is not None:
        pts = pts[pmap.mask_distance(pts) > 0.1]
    assert jacobian_fd_residual(pmap, pts) < 5e-5


@pytest.mark.parametrize("name", list(MAPS))
def test_det_positive_and_adjugate_identities(name):
    pmap = MAPS[name]
    pts = pmap.sample_reference(300, seed=3, margin=0.02)
    if pmap.mask_distance is not None:
        pts = pts[pmap.mask_distance(pts) > 0.1]
    det = pmap.det(pts)
    assert np.all(det > 0.0)
    J = pmap.jacobian(pts)
    adj = pmap.adjugate(pts)
    assert np.max(np.abs(np.linalg.det(adj) - det**2) / det**2) < 1e-10
    prod = np.einsum("...ij,...jk->...ik", adj, J)
    eye = det[..., None, None] * np.eye(3)
    assert np.max(np.abs(prod - eye) / det[..., None, None]) < 1e-10


def test_det_fn_matches_jacobian_det():
    for name in ("lpipe", "snail"):
        pmap = MAPS[name]
        pts = pmap.sample_reference(200, seed=4, margin=0.02)
        if pmap.mask_distance is not None:
            pts = pts[pmap.mask_distance(pts) > 0.05]
        assert np.max(np.abs(pmap.det(pts) - np.linalg.det(pmap.jacobian(pts)))) < 1e-8 * np.max(pmap.det(pts))


def test_lpipe_det_exactly_one():
    pmap = MAPS["lpipe"]
    pts = pmap.sample_reference(500, seed=5)
    pts = pts[pmap.mask_distance(pts) > 1e-6]
    assert np.all(pmap.det(pts) == 1.0)


def test_snail_det_has_no_half_lower_bound():
    """The cylindrical-radius factor kills the determinant near the pinch."""
    pmap = MAPS["snail"]
    corner = np.array([[1.02, np.pi, 0.98]])
    assert pmap.det(corner)[0] < 0.5
    # but it is large away from the seam
    away = np.array([[3.0, 0.5, 0.75]])
    assert pmap.det(away)[0] > 1.0


def test_pullback_identity_map_all_degrees():
    pmap = MAPS["identity"]
    E = trig_vector()
    pts = np.random.default_rng(0).uniform(0.1, 0.9, size=(50, 3))
    for q, src in ((0, trig_scalar().value), (1, E.value), (2, E.value), (3, trig_scalar().value)):
        pb = pullback(q, pmap, src)
        assert np.max(np.abs(pb(pts) - np.asarray(src(pts)))) < 1e-14


def test_pullback_affine_degree3_constant():
    M = np.diag([2.0, 1.0, 1.0])
    pmap = affine_map(M)
    pb = pullback(3, pmap, lambda pts: np.ones(np.shape(pts)[:-1]))
    pts = np.random.default_rng(1).uniform(0, 1, size=(20, 3))
    assert np.allclose(pb(pts), 2.0)


def test_pullback_lpipe_degree3_constant_one():
    pmap = MAPS["lpipe"]
    pts = pmap.sample_reference(100, seed=6)
    pts = pts[pmap.mask_distance(pts) > 0.05]
    pb = pullback(3, pmap, lambda p: np.ones(np.shape(p)[:-1]))
    assert np.allclose(pb(pts), 1.0)


def test_pullback_mask_violation():
    pmap = MAPS["lpipe"]
    pb = pullback(1, pmap, trig_vector().value)
    with pytest.raises(MaskViolationError):
        pb(np.array([[0.0, 0.5, 0.5]]))


def test_commutation_identity_map_fd_convergence():
    pmap = MAPS["identity"]
    E = trig_vector()
    r1 = commutation_residual(1, pmap, E, h=2e-3)
    r2 = commutation_residual(1, pmap, E, h=1e-3)
    assert 3.5 < r1 / r2 < 4.5


def test_commutation_snail_second_order():
    pmap = MAPS["snail"]
    for q, field in ((0, trig_scalar()), (1, trig_vector()), (2, trig_vector())):
        r1 = commutation_residual(q, pmap, field, h=2e-3, seed=q)
        r2 = commutation_residual(q, pmap, field, h=1e-3, seed=q)
        assert 3.3 < r1 / r2 < 4.7, (q, r1, r2)


def test_commutation_lpipe_piecewise_affine():
    pmap = MAPS["lpipe"]
    samples = pmap.sample_reference(200, seed=7)
    samples = samples[np.abs(samples[:, 0]) > 0.1]
    r = commutation_residual(1, pmap, trig_vector(), h=1e-3, samples=samples)
    assert r < 1e-6


def test_adjoint_identity_map():
    pmap = MAPS["identity"]
    E = BumpVector([(0.2, 0.8)] * 3, direction=(1.0, 0.5, -0.25))
    Psi = BumpVector([(0.3, 0.9)] * 3, direction=(0.5, 1.0, 0.5))
    r = adjoint_residual(1, pmap, E.value, Psi.value, theta_box=((0.0, 1.0),) * 3, order=30)
    assert r < 1e-8


def test_adjoint_affine_hand_integral():
    """Constants on the unit box, det M = 2, degree 0: both pairings equal
    the bump mass computed on the image box."""
    M = np.diag([2.0, 1.0, 1.0])
    pmap = affine_map(M)
    Psi = BumpScalar([(0.1, 0.9)] * 3)
    one = lambda pts: np.ones(np.shape(pts)[:-1])
    r = adjoint_residual(0, pmap, one, Psi.value, theta_box=((0.0, 1.0),) * 3, order=36)
    assert r < 1e-8


def test_adjoint_snail_bumps():
    """Smooth bumps whose variation scales match the map's stretch (~|J|)."""
    pmap = MAPS["snail"]
    center = pmap.forward(np.array([3.0, 2.0, 0.75]))
    omega_box = tuple((float(c) - 2.5, float(c) + 2.5) for c in center)
    E = GaussianBumpVector(omega_box, direction=(0.3, 1.0, 0.5))
    w = GaussianBump(tuple((float(c) - 2.0, float(c) + 2.0) for c in center))
    direction = np.array([1.0, -0.5, 0.25])

    def Psi(pts):  # reference-side bump, image-domain length scales
        return w.value(pmap.forward(pts))[..., None] * direction

    # integrate the reference side over the preimage footprint of supp E
    corners = np.array([[b[i] for b, i in zip(omega_box, idx)] for idx in np.ndindex(2, 2, 2)])
    pre = pmap.inverse(corners)
    spread = pre.max(axis=0) - pre.min(axis=0)
    foot = tuple(
        (float(a), float(b))
        for a, b in zip(pre.min(axis=0) - 0.3 * spread, pre.max(axis=0) + 0.3 * spread)
    )
    r = adjoint_residual(1, pmap, E.value, Psi, theta_box=foot, omega_box=omega_box, order=64)
    assert r < 1e-6


def test_inverse_roundtrip_all_maps():
    E = trig_vector()
    u = trig_scalar()
    for name, pmap in MAPS.items():
        for q, fld in ((0, u.value), (1, E.value), (2, E.value), (3, u.value)):
            r = inverse_roundtrip(q, pmap, fld, count=100, seed=q)
            assert r < 1e-9, (name, q, r)


def test_composition_law():
    """Pullback along outer o inner equals pulling back in two stages."""
    A = affine_map([[1.5, 0.2, 0.0], [0.0, 1.0, 0.0], [0.0, 0.1, 2.0]], (0.3, 0.0, -0.5))
    B = affine_map([[1.0, 0.0, 0.4], [0.2, 2.0, 0.0], [0.0, 0.0, 1.0]], (0.0, 1.0, 0.0))
    E = trig_vector()
    for inner in (B, snail_map()):
        comp = compose(A, inner)
        pts = inner.sample_reference(100, seed=8, margin=0.05)
        for q in (0, 1, 2, 3):
            src = E.value if q in (1, 2) else trig_scalar().value
            direct = pullback(q, comp, src)(pts)
            staged = pullback(q, inner, pullback(q, A, src))(pts)
            assert np.max(np.abs(direct - staged)) < 1e-9 * max(1.0, np.max(np.abs(direct)))


def test_user_map_fd_jacobian():
    from derham_gap.piola import user_map

    pm = user_map(
        "squash",
        forward=lambda p: np.stack([p[..., 0] ** 3 / 3.0 + p[..., 0], p[..., 1], p[..., 2]], axis=-1),
        inverse=None,
        reference_box=((0.0, 1.0),) * 3,
    )
    pts = pm.sample_reference(50, seed=0, margin=0.05)
    det = pm.det(pts)
    assert np.allclose(det, pts[:, 0] ** 2 + 1.0, atol=1e-7)
    pb = pullback(3, pm, lambda p: np.ones(np.shape(p)[:-1]))
    assert np.allclose(pb(pts), det, atol=1e-12)


def test_map_registry():
    assert map_registry("identity").name == "identity"
    assert map_registry("lpipe").name == "lpipe"
    assert map_registry("snail").name == "snail"
    m = map_registry("affine:2,0,0,0,1,0,0,0,1,0.5,0,0")
    pts = np.array([[1.0, 1.0, 1.0]])
    assert np.allclose(m.forward(pts), [[2.5, 1.0, 1.0]])
    with pytest.raises(DerhamGapError):
        map_registry("moebius")
    with pytest.raises(DerhamGapError):
        map_registry("affine:1,2,3")
