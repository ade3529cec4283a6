import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from derham_gap.diagnostics import loglog_slope
from derham_gap.errors import DerhamGapError
from derham_gap.fields import fd_jacobian
from derham_gap.profiles import (
    CounterexampleField,
    counterexample,
    profile,
    profile_deriv_sq_moment,
    profile_l2_squared,
    profile_sq_moment,
)

NS = (8, 16, 32, 64, 128)


def test_profile_pointwise_values():
    f = profile(4)
    assert f(1.5) == pytest.approx(0.5)
    assert f(3.0) == pytest.approx(1.0)
    assert f(6.0) == 0.0
    assert f(0.5) == 0.0
    assert f.breakpoints == (1.0, 2.0, 4.0, 5.0)


def test_profile_rejects_small_n():
    with pytest.raises(DerhamGapError):
        profile(1)


@given(st.integers(2, 60))
@settings(max_examples=30, deadline=None)
def test_profile_bounds_and_support(n):
    f = profile(n)
    t = np.linspace(-1.0, n + 3.0, 700)
    v = f(t)
    assert np.all((v >= 0.0) & (v <= 1.0))
    assert np.all(v[(t < 1.0) | (t >= n + 1.0)] == 0.0)
    assert np.all(np.abs(f.derivative(t)) <= 1.0)


def test_profile_l2_squared_exact_values():
    assert profile_l2_squared(4) == pytest.approx(8.0 / 3.0, abs=1e-14)
    assert profile_l2_squared(2) == pytest.approx(2.0 / 3.0, abs=1e-14)
    assert profile_l2_squared(1000) / 1000.0 == pytest.approx(1.0, rel=2e-3)


@given(st.integers(2, 40), st.integers(0, 2))
@settings(max_examples=25, deadline=None)
def test_moments_match_adaptive_quadrature(n, p):
    f = profile(n)
    exact = profile_sq_moment(n, p)
    approx = sum(
        quad(lambda r: f(r) ** 2 * r**p, lo, hi, limit=200)[0]
        for lo, hi in zip(f.breakpoints, f.breakpoints[1:])
    )
    assert exact == pytest.approx(approx, rel=1e-10)
    exact_d = profile_deriv_sq_moment(n, p)
    approx_d = sum(
        quad(lambda r: f.derivative(r) ** 2 * r**p, lo, hi, limit=200)[0]
        for lo, hi in zip(f.breakpoints, f.breakpoints[1:])
    )
    assert exact_d == pytest.approx(approx_d, rel=1e-10)


def test_antiderivative_matches_quadrature():
    f = profile(6)
    for t in (0.5, 1.5, 3.0, 6.5, 8.0):
        approx = quad(f, 0.0, t, limit=200, points=[1, 2, 6, 7])[0]
        assert f.antiderivative(t) == pytest.approx(approx, abs=1e-10)


def test_closed_form_norms_match_quadrature():
    for kind, dim in [("grad_rn", 3), ("curl_db0", None), ("curl_db1", None), ("div_db1", None)]:
        fld = counterexample(kind, 16, dim)
        assert fld.norm_sq() == pytest.approx(fld.norm_sq_quadrature(), rel=1e-8)


def test_grad_rn_slopes():
    for dim, expect_u, expect_g in [(1, 1.0, 0.0), (2, 2.0, 1.0), (3, 3.0, 2.0)]:
        u = np.array([counterexample("grad_rn", n, dim).norm_sq() for n in NS])
        g = np.array([counterexample("grad_rn", n, dim).dnorm_sq() for n in NS])
        assert abs(loglog_slope(NS, u) - expect_u) < 0.1
        if expect_g == 0.0:
            assert np.allclose(g, g[0])  # two unit ramps, n-independent
        else:
            assert abs(loglog_slope(NS, g) - expect_g) < 0.1


def test_curl_db0_slopes_and_ratio_floor():
    e = np.array([counterexample("curl_db0", n).norm_sq() for n in NS])
    r = np.array([counterexample("curl_db0", n).dnorm_sq() for n in NS])
    assert abs(loglog_slope(NS, e) - 3.0) < 0.1
    assert loglog_slope(NS, r) <= 2.1
    fld8 = counterexample("curl_db0", 8)
    assert fld8.ratio() >= 0.5 * np.sqrt(8.0)


def test_all_ratio_slopes_diverge():
    for kind, dim in [
        ("grad_rn", 1),
        ("grad_rn", 2),
        ("grad_rn", 3),
        ("curl_db1", None),
        ("curl_db0", None),
        ("div_db2", None),
        ("div_db1", None),
        ("div_db0", None),
    ]:
        ratios = [counterexample(kind, n, dim).ratio() for n in NS]
        assert loglog_slope(NS, ratios) >= 0.4, (kind, dim)


def test_curl_fields_divergence_free_and_curl_matches_fd():
    rng = np.random.default_rng(0)
    for kind in ("curl_db1", "curl_db0"):
        fld = counterexample(kind, 8)
        # sample away from breakpoint spheres/cylinders
        pts = rng.uniform(-6.0, 6.0, size=(400, 3))
        pts = pts[~fld.breakpoint_mask(pts, tol=0.05)][:100]
        J = fd_jacobian(fld.value, pts, h=1e-6)
        div_fd = J[..., 0, 0] + J[..., 1, 1] + J[..., 2, 2]
        assert np.max(np.abs(div_fd)) < 1e-6
        curl_fd = np.stack(
            [
                J[..., 2, 1] - J[..., 1, 2],
                J[..., 0, 2] - J[..., 2, 0],
                J[..., 1, 0] - J[..., 0, 1],
            ],
            axis=-1,
        )
        assert np.max(np.abs(curl_fd - fld.curl(pts))) < 1e-5


def test_grad_fields_match_fd():
    rng = np.random.default_rng(1)
    for kind, dim in [("grad_rn", 3), ("div_db1", None), ("div_db2", None)]:
        fld = counterexample(kind, 8, dim)
        pts = rng.uniform(-6.0, 6.0, size=(400, 3))
        pts = pts[~fld.breakpoint_mask(pts, tol=0.05)][:100]
        g_fd = np.stack(
            [
                (fld.value(pts + h_e) - fld.value(pts - h_e)) / 2e-6
                for h_e in 1e-6 * np.eye(3)
            ],
            axis=-1,
        )
        assert np.max(np.abs(g_fd - fld.grad(pts))) < 1e-5


def test_breakpoint_flagging():
    fld = counterexample("grad_rn", 8, 3)
    pts = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.5, 0.5, 0.5]])
    mask = fld.breakpoint_mask(pts, tol=1e-9)
    assert mask.tolist() == [True, True, False]
    # a.e. value at the breakpoint is the right-sided one
    assert fld.value(np.array([2.0, 0.0, 0.0])) == pytest.approx(1.0)
