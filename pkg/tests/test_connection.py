"""Connection forms: pullback, gauge transformation, curvature."""

import numpy as np
import pytest

from holonomy.connection import (
    check_linearity,
    constant_form,
    curvature,
    dphi,
    gauge_transform,
    identity_gauge,
    monopole_form,
    phase_poly_gauge,
    poly2d,
    poly2d_grad,
    polynomial_form,
    pullback_1form,
    pure_gauge_form,
    su2_exp_poly_gauge,
    su2_product_gauge,
    zero_form,
)
from holonomy.errors import OutOfDomain
from holonomy.geometry import (
    Manifold,
    latitude_path,
    meridian_path,
    segment_path,
    sphere_dphi,
    sphere_dtheta,
    sphere_point,
    time_warp_deriv,
    two_caps_cover,
    plane_grid_cover,
)
from holonomy.groups import GroupSpec, adjoint, GroupElement, opnorm

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)

PLANE = Manifold("PlaneR2")
CAPS = two_caps_cover()


def north_points(rng, n=40, zmin=-0.2):
    pts = Manifold("SphereS2").project(rng.standard_normal((4 * n, 3)))
    pts = pts[pts[:, 2] > zmin]
    return pts[:n]


class TestPullback:
    def test_zero_form(self):
        A = zero_form(GroupSpec.su2())
        a = pullback_1form(A, segment_path([0.0, 0.0], [1.0, 0.0]))
        ts = np.linspace(0, 1, 33)
        assert np.abs(a(ts)).max() == 0.0

    def test_constant_form_on_segment(self):
        X = 0.7j * SX
        A = constant_form(GroupSpec.su2(), [X, np.zeros((2, 2))])
        gamma = segment_path([0.0, 0.0], [1.0, 0.0])
        a = pullback_1form(A, gamma)
        for t in [0.25, 0.5, 0.8]:
            expected = X * time_warp_deriv(t)
            assert opnorm(a(np.array([t]))[0] - expected) < 1e-9

    def test_monopole_along_latitude(self):
        k, theta0 = 2, np.pi / 3
        A = monopole_form(k, "north")
        gamma = latitude_path(theta0)
        a = pullback_1form(A, gamma)
        for t in [0.2, 0.5, 0.75]:
            speed = 2 * np.pi * time_warp_deriv(t)
            expected = 0.5j * k * (1 - np.cos(theta0)) * speed
            assert abs(a(np.array([t]))[0, 0, 0] - expected) < 1e-7

    def test_vanishes_in_collars(self):
        A = monopole_form(1, "north")
        a = pullback_1form(A, latitude_path(0.8))
        ts = np.array([0.0, 0.05, 0.96, 1.0])
        assert np.abs(a(ts)).max() == 0.0

    def test_out_of_domain(self):
        A = monopole_form(1, "north", domain=CAPS.by_id("north"))
        with pytest.raises(OutOfDomain):
            pullback_1form(A, meridian_path())


class TestLinearity:
    def test_presets_linear_in_tangent(self):
        rng = np.random.default_rng(3)
        pts3 = north_points(rng)
        assert check_linearity(monopole_form(1, "north"), pts3, rng) < 1e-9
        pts2 = rng.uniform(-1, 1, size=(40, 2))
        terms = [(0.3j * SX, 0, 1, 0), (0.2j * SY, 1, 0, 1)]
        assert check_linearity(polynomial_form(GroupSpec.su2(), terms), pts2, rng) < 1e-9
        assert check_linearity(pure_gauge_form([(0.5, 1, 0)], [(0.4, 0, 1)]), pts2, rng) < 1e-9


class TestGaugeTransform:
    def test_identity_gauge_is_identity(self):
        rng = np.random.default_rng(5)
        terms = [(0.4j * SX, 0, 0, 0), (0.3j * SY, 1, 1, 0)]
        A = polynomial_form(GroupSpec.su2(), terms)
        Ap = gauge_transform(A, identity_gauge(GroupSpec.su2()))
        pts = rng.uniform(-1, 1, size=(30, 2))
        vs = rng.standard_normal((30, 2))
        assert np.abs(Ap.eval(pts, vs) - A.eval(pts, vs)).max() < 1e-12

    def test_constant_gauge_is_conjugation(self):
        from holonomy.connection import constant_gauge
        from holonomy.groups import AlgebraElement, exp_map

        g = exp_map(AlgebraElement(GroupSpec.su2(), 0.6j * SY))
        A = constant_form(GroupSpec.su2(), [0.5j * SX, 0.2j * SY])
        Ap = gauge_transform(A, constant_gauge(g))
        p = np.array([[0.3, -0.2]])
        v = np.array([[1.0, 0.5]])
        expected = g.mat @ A.eval(p, v)[0] @ g.mat.conj().T
        assert opnorm(Ap.eval(p, v)[0] - expected) < 1e-10

    def test_u1_abelian_formula(self):
        # g = e^{i q}: A' = A - i dq
        q = [(0.7, 1, 0), (-0.4, 0, 1), (0.3, 1, 1)]
        A = polynomial_form(GroupSpec.u1(), [(np.array([[0.25j]]), 0, 0, 1)])
        Ap = gauge_transform(A, phase_poly_gauge(q))
        rng = np.random.default_rng(8)
        pts = rng.uniform(-1, 1, size=(25, 2))
        vs = rng.standard_normal((25, 2))
        dq = (poly2d_grad(q, pts) * vs).sum(-1)
        expected = A.eval(pts, vs)[:, 0, 0] - 1j * dq
        assert np.abs(Ap.eval(pts, vs)[:, 0, 0] - expected).max() < 1e-9

    def test_gauge_composition(self):
        # transforming by g then by h equals transforming by h g
        spec = GroupSpec.su2()
        A = polynomial_form(spec, [(0.4j * SX, 0, 0, 0), (0.25j * SY, 1, 1, 0)])
        g = su2_exp_poly_gauge([(0.5, 1, 0), (0.2, 0, 1)], "y")
        hgf = su2_exp_poly_gauge([(0.3, 0, 1)], "x")
        lhs = gauge_transform(gauge_transform(A, g), hgf)
        rhs = gauge_transform(A, hgf @ g)
        rng = np.random.default_rng(13)
        pts = rng.uniform(-0.8, 0.8, size=(20, 2))
        vs = rng.standard_normal((20, 2))
        assert np.abs(lhs.eval(pts, vs) - rhs.eval(pts, vs)).max() < 1e-6


class TestCurvature:
    def test_zero_form(self):
        north = CAPS.by_id("north")
        p = sphere_point(0.7, 0.3)
        K = curvature(zero_form(GroupSpec.u1()), north, p,
                      sphere_dtheta(p), sphere_dphi(p))
        assert K.norm() < 1e-12

    def test_monopole_closed_form(self):
        for k in (1, 3):
            A = monopole_form(k, "north")
            north = CAPS.by_id("north")
            for theta0 in (0.6, np.pi / 2, 1.7):
                p = sphere_point(theta0, 0.8)
                K = curvature(A, north, p, sphere_dtheta(p), sphere_dphi(p))
                expected = 0.5j * k * np.sin(theta0)
                assert abs(K.mat[0, 0] - expected) < 1e-6

    def test_south_form_same_curvature(self):
        A = monopole_form(1, "south")
        south = CAPS.by_id("south")
        p = sphere_point(2.3, -0.4)
        K = curvature(A, south, p, sphere_dtheta(p), sphere_dphi(p))
        assert abs(K.mat[0, 0] - 0.5j * np.sin(2.3)) < 1e-6

    def test_pure_gauge_is_flat(self):
        cover = plane_grid_cover()
        A = pure_gauge_form([(0.6, 1, 0), (0.3, 0, 1)], [(0.5, 0, 1), (-0.2, 1, 0)])
        cset = cover.by_id("ne")
        rng = np.random.default_rng(2)
        for _ in range(5):
            p = rng.uniform(0.2, 1.0, size=2)
            K = curvature(A, cset, p, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
            assert K.norm() < 1e-5

    def test_out_of_domain(self):
        north = CAPS.by_id("north")
        p = sphere_point(3.0, 0.0)  # deep south
        with pytest.raises(OutOfDomain):
            curvature(monopole_form(1, "north"), north, p,
                      sphere_dtheta(p), sphere_dphi(p))

    def test_gauge_covariance_of_curvature(self):
        cover = plane_grid_cover()
        cset = cover.by_id("ne")
        spec = GroupSpec.su2()
        A = polynomial_form(spec, [(0.5j * SX, 0, 0, 1), (0.3j * SY, 1, 2, 0)])
        g = su2_exp_poly_gauge([(0.4, 1, 0), (0.3, 0, 1)], "y")
        Ap = gauge_transform(A, g)
        rng = np.random.default_rng(4)
        v, w = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        for _ in range(4):
            p = rng.uniform(0.2, 1.0, size=2)
            Kp = curvature(Ap, cset, p, v, w)
            K = curvature(A, cset, p, v, w)
            gp = GroupElement(spec, g.eval(p[None, :])[0])
            expected = adjoint(gp, K)
            assert opnorm(Kp.mat - expected.mat) < 1e-5


def test_dphi_closed_form():
    p = sphere_point(np.pi / 2, 0.3)
    v = sphere_dphi(p)
    assert abs(dphi(p[None], v[None])[0] - 1.0) < 1e-12


def test_poly2d_matches_manual():
    coeffs = [(2.0, 1, 0), (3.0, 0, 2)]
    p = np.array([[1.5, 2.0]])
    assert abs(poly2d(coeffs, p)[0] - (3.0 + 12.0)) < 1e-14


def test_su2_product_gauge_is_unitary():
    g = su2_product_gauge([(0.5, 1, 0)], [(0.3, 0, 1)])
    rng = np.random.default_rng(6)
    pts = rng.uniform(-1, 1, size=(20, 2))
    m = g.eval(pts)
    defect = np.abs(m @ np.swapaxes(m, -1, -2).conj() - np.eye(2)).max()
    assert defect < 1e-14
