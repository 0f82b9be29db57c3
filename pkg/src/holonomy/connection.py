"""Lie-algebra valued 1-forms on cover sets.

A local connection form is an evaluator (point, ambient tangent) -> algebra
matrix, linear in the tangent slot; a gauge function is a group-valued map on
a set.  Both are vectorized: points of shape (m, d) and tangents of shape
(m, d) give matrices of shape (m, n, n).

The gauge transformation acts by A' = Ad_g(A) - (dg) g^{-1}, with the
derivative of g realized as a 5-point directional stencil along the ambient
ray through the point.  Curvature K(v, w) = D_v A(w) - D_w A(v) + [A(v), A(w)]
is evaluated through the chart of the owning cover set, extending v and w as
chart-constant coefficient fields so their bracket vanishes; the directional
derivatives use central differences with one Richardson refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import OutOfDomain
from .geometry import CoverSet, Manifold, Path, path_velocity, require_inside
from .groups import AlgebraElement, GroupElement, GroupSpec, project_to_algebra

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

FD_STEP = 1e-4


@dataclass(frozen=True)
class LocalConnectionForm:
    """A 1-form on a cover set with values in the Lie algebra."""

    set_id: str
    spec: GroupSpec
    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    domain: CoverSet | None = None

    def at(self, p, v) -> AlgebraElement:
        """Scalar evaluation returning an AlgebraElement."""
        out = self.eval(np.asarray(p, dtype=float)[None, :],
                        np.asarray(v, dtype=float)[None, :])
        return AlgebraElement(self.spec, out[0])


@dataclass(frozen=True)
class GaugeFunction:
    """A group-valued function on a cover set or on the whole manifold."""

    spec: GroupSpec
    eval: Callable[[np.ndarray], np.ndarray]
    domain: CoverSet | None = None

    def at(self, p) -> GroupElement:
        out = self.eval(np.asarray(p, dtype=float)[None, :])
        return GroupElement(self.spec, out[0])

    def inverse(self) -> "GaugeFunction":
        spec = self.spec

        def ev(p):
            m = self.eval(p)
            if spec.unitary or spec.kind == "SO3":
                return np.swapaxes(m, -1, -2).conj()
            return np.linalg.inv(m)

        return GaugeFunction(spec, ev, self.domain)

    def __matmul__(self, other: "GaugeFunction") -> "GaugeFunction":
        """Pointwise product (self * other)."""
        return GaugeFunction(
            self.spec, lambda p: self.eval(p) @ other.eval(p), self.domain
        )


class AlgebraCurve:
    """Vectorized map t -> algebra matrix, consumed by the transport solver."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], spec: GroupSpec):
        self.func = func
        self.spec = spec

    def __call__(self, ts) -> np.ndarray:
        return self.func(np.atleast_1d(np.asarray(ts, dtype=float)))

    def at(self, t: float) -> AlgebraElement:
        return AlgebraElement(self.spec, self(np.array([t]))[0])


# ---------------------------------------------------------------------------
# constructors


def zero_form(spec: GroupSpec, set_id: str = "", domain=None) -> LocalConnectionForm:
    def ev(p, v):
        p = np.asarray(p, dtype=float)
        return np.zeros(p.shape[:-1] + (spec.n, spec.n), dtype=complex)

    return LocalConnectionForm(set_id, spec, ev, domain)


def constant_form(spec: GroupSpec, mats: Sequence, set_id: str = "",
                  domain=None) -> LocalConnectionForm:
    """A = sum_k M_k dx_k with constant algebra coefficients M_k."""
    mats = [np.asarray(m, dtype=complex) for m in mats]

    def ev(p, v):
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape[:-1] + (spec.n, spec.n), dtype=complex)
        for k, m in enumerate(mats):
            out += v[..., k, None, None] * m
        return out

    return LocalConnectionForm(set_id, spec, ev, domain)


def dphi(p, v) -> np.ndarray:
    """The longitude 1-form (x dy - y dx)/(x^2 + y^2) around the z-axis.

    Returns 0 on the axis itself, where the numerator of every evaluation
    used here vanishes as well.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    rho2 = p[..., 0] ** 2 + p[..., 1] ** 2
    num = p[..., 0] * v[..., 1] - p[..., 1] * v[..., 0]
    return np.where(rho2 > 0.0, num / np.where(rho2 > 0.0, rho2, 1.0), 0.0)


def monopole_form(k: float, hemisphere: str, set_id: str = "",
                  domain=None) -> LocalConnectionForm:
    """Charge-k monopole potential on a polar cap of the unit sphere.

    North: A = i (k/2) (1 - cos theta) dphi, regular at the north pole.
    South: A = -i (k/2) (1 + cos theta) dphi, regular at the south pole.
    """
    if hemisphere not in ("north", "south"):
        raise ValueError("hemisphere must be 'north' or 'south'")
    spec = GroupSpec.u1()
    sign = 1.0 if hemisphere == "north" else -1.0

    def ev(p, v):
        # on the unit sphere (1 -+ z) dphi = (x dy - y dx)/(1 +- z), which is
        # regular at the cap's own pole
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        num = p[..., 0] * v[..., 1] - p[..., 1] * v[..., 0]
        coeff = 0.5j * k * sign * num / (1.0 + sign * p[..., 2])
        return coeff[..., None, None]

    return LocalConnectionForm(set_id, spec, ev, domain)


def poly2d(coeffs: Sequence, p) -> np.ndarray:
    """Evaluate sum_j c_j x^px_j y^py_j for triples (c, px, py)."""
    p = np.asarray(p, dtype=float)
    out = np.zeros(p.shape[:-1])
    for c, px, py in coeffs:
        out = out + float(c) * p[..., 0] ** int(px) * p[..., 1] ** int(py)
    return out


def poly2d_grad(coeffs: Sequence, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    gx = np.zeros(p.shape[:-1])
    gy = np.zeros(p.shape[:-1])
    for c, px, py in coeffs:
        c, px, py = float(c), int(px), int(py)
        if px > 0:
            gx = gx + c * px * p[..., 0] ** (px - 1) * p[..., 1] ** py
        if py > 0:
            gy = gy + c * py * p[..., 0] ** px * p[..., 1] ** (py - 1)
    return np.stack([gx, gy], axis=-1)


def polynomial_form(spec: GroupSpec, terms: Sequence, set_id: str = "",
                    domain=None) -> LocalConnectionForm:
    """A = sum_j M_j x^px_j y^py_j dx_{dir_j} on the plane.

    Each term is (mat, dir, px, py) with dir 0 for dx, 1 for dy.
    """
    prepared = [
        (np.asarray(m, dtype=complex), int(d), int(px), int(py))
        for m, d, px, py in terms
    ]

    def ev(p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.zeros(p.shape[:-1] + (spec.n, spec.n), dtype=complex)
        for m, d, px, py in prepared:
            coeff = p[..., 0] ** px * p[..., 1] ** py * v[..., d]
            out += coeff[..., None, None] * m
        return out

    return LocalConnectionForm(set_id, spec, ev, domain)


def su2_product_gauge(a_coeffs: Sequence, b_coeffs: Sequence,
                      domain=None) -> GaugeFunction:
    """g(p) = exp(a(p) i sigma_x) exp(b(p) i sigma_y) on the plane."""
    spec = GroupSpec.su2()

    def ev(p):
        a = poly2d(a_coeffs, p)
        b = poly2d(b_coeffs, p)
        eye = np.eye(2, dtype=complex)
        ga = np.cos(a)[..., None, None] * eye + 1j * np.sin(a)[..., None, None] * _PAULI_X
        gb = np.cos(b)[..., None, None] * eye + 1j * np.sin(b)[..., None, None] * _PAULI_Y
        return ga @ gb

    return GaugeFunction(spec, ev, domain)


def pure_gauge_form(a_coeffs: Sequence, b_coeffs: Sequence, set_id: str = "",
                    domain=None) -> LocalConnectionForm:
    """A = -(dg) g^{-1} for g = exp(a i sigma_x) exp(b i sigma_y), closed form.

    (dg) g^{-1} = i sigma_x da + (cos 2a i sigma_y - sin 2a i sigma_z) db,
    so the form is exactly flat and genuinely non-abelian for non-constant a.
    """
    spec = GroupSpec.su2()

    def ev(p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        a = poly2d(a_coeffs, p)
        da = (poly2d_grad(a_coeffs, p) * v[..., :2]).sum(-1)
        db = (poly2d_grad(b_coeffs, p) * v[..., :2]).sum(-1)
        out = (
            da[..., None, None] * (1j * _PAULI_X)
            + (db * np.cos(2 * a))[..., None, None] * (1j * _PAULI_Y)
            - (db * np.sin(2 * a))[..., None, None] * (1j * _PAULI_Z)
        )
        return -out

    return LocalConnectionForm(set_id, spec, ev, domain)


def identity_gauge(spec: GroupSpec, domain=None) -> GaugeFunction:
    def ev(p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(
            np.eye(spec.n, dtype=complex), p.shape[:-1] + (spec.n, spec.n)
        ).copy()

    return GaugeFunction(spec, ev, domain)


def constant_gauge(g: GroupElement, domain=None) -> GaugeFunction:
    def ev(p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(g.mat, p.shape[:-1] + g.mat.shape).copy()

    return GaugeFunction(g.spec, ev, domain)


def phase_gauge(k: float, domain=None) -> GaugeFunction:
    """U(1) transition e^{i k phi} around the z-axis."""
    spec = GroupSpec.u1()

    def ev(p):
        p = np.asarray(p, dtype=float)
        phi = np.arctan2(p[..., 1], p[..., 0])
        return np.exp(1j * k * phi)[..., None, None]

    return GaugeFunction(spec, ev, domain)


def phase_poly_gauge(coeffs: Sequence, domain=None) -> GaugeFunction:
    """U(1) gauge e^{i q(p)} with polynomial angle q on the plane."""
    spec = GroupSpec.u1()

    def ev(p):
        return np.exp(1j * poly2d(coeffs, p))[..., None, None]

    return GaugeFunction(spec, ev, domain)


def su2_exp_poly_gauge(coeffs: Sequence, direction: str = "y",
                       domain=None) -> GaugeFunction:
    """g(p) = exp(q(p) i sigma_dir) with polynomial q on the plane."""
    spec = GroupSpec.su2()
    sigma = {"x": _PAULI_X, "y": _PAULI_Y, "z": _PAULI_Z}[direction]

    def ev(p):
        q = poly2d(coeffs, p)
        eye = np.eye(2, dtype=complex)
        return np.cos(q)[..., None, None] * eye + 1j * np.sin(q)[..., None, None] * sigma

    return GaugeFunction(spec, ev, domain)


# ---------------------------------------------------------------------------
# operations


def pullback_1form(A: LocalConnectionForm, gamma: Path,
                   check_domain: bool = True) -> AlgebraCurve:
    """The pulled-back 1-form t -> A(gamma(t), gamma'(t)).

    Vanishes identically inside the sitting collars because the velocity does.
    """
    if check_domain and A.domain is not None:
        require_inside(gamma, A.domain)

    def func(ts):
        pts = gamma(ts)
        vel = path_velocity(gamma, ts)
        return A.eval(pts, vel)

    return AlgebraCurve(func, A.spec)


def gauge_derivative_term(g: GaugeFunction, p: np.ndarray, v: np.ndarray,
                          h: float = FD_STEP) -> np.ndarray:
    """(D_v g)(p) g(p)^{-1} by a 5-point stencil along the ambient ray."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    speed = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(speed == 0.0, 1.0, speed)
    vh = v / safe

    def gm(s):
        return g.eval(p + s * h * vh)

    d = (-gm(2.0) + 8.0 * gm(1.0) - 8.0 * gm(-1.0) + gm(-2.0)) / (12.0 * h)
    g0 = g.eval(p)
    if g.spec.unitary or g.spec.kind == "SO3":
        ginv = np.swapaxes(g0, -1, -2).conj()
    else:
        ginv = np.linalg.inv(g0)
    out = d @ ginv
    return out * speed[..., None]


def gauge_transform(A: LocalConnectionForm, g: GaugeFunction,
                    h: float = FD_STEP) -> LocalConnectionForm:
    """A' = Ad_g(A) - (dg) g^{-1}, returned as a new form on the same set."""
    if A.spec != g.spec:
        raise ValueError("form and gauge function carry different groups")
    spec = A.spec

    def ev(p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        gm = g.eval(p)
        if spec.unitary or spec.kind == "SO3":
            ginv = np.swapaxes(gm, -1, -2).conj()
        else:
            ginv = np.linalg.inv(gm)
        ad = gm @ A.eval(p, v) @ ginv
        out = ad - gauge_derivative_term(g, p, v, h)
        if spec.unitary:
            out = 0.5 * (out - np.swapaxes(out, -1, -2).conj())
            if spec.special:
                tr = np.trace(out, axis1=-2, axis2=-1)
                out = out - (tr / spec.n)[..., None, None] * np.eye(spec.n)
        return out

    return LocalConnectionForm(A.set_id, spec, ev, A.domain)


def _chart_form_value(A: LocalConnectionForm, cset: CoverSet, u: np.ndarray,
                      ec: np.ndarray) -> np.ndarray:
    """A evaluated at chart point u along the chart-constant field ec."""
    p = cset.chart_inverse(u)
    return A.eval(p, cset.push_chart_vector(u, ec))


def _chart_directional(A, cset, u0, dire, ec, h):
    """Richardson-refined derivative of u -> A(u, ec) along chart direction dire."""

    def diff(step):
        return (
            _chart_form_value(A, cset, u0 + step * dire, ec)
            - _chart_form_value(A, cset, u0 - step * dire, ec)
        ) / (2.0 * step)

    return (4.0 * diff(h / 2.0) - diff(h)) / 3.0


def curvature_batch(A: LocalConnectionForm, cset: CoverSet, p, v, w,
                    h: float = FD_STEP) -> np.ndarray:
    """K(v, w) at many points, computed through the chart of `cset`."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    u0 = cset.chart(p)
    vc = cset.to_chart_vector(p, v)
    wc = cset.to_chart_vector(p, w)
    term_v = _chart_directional(A, cset, u0, vc, wc, h)
    term_w = _chart_directional(A, cset, u0, wc, vc, h)
    av = A.eval(p, v)
    aw = A.eval(p, w)
    return term_v - term_w + av @ aw - aw @ av


def curvature(A: LocalConnectionForm, cset: CoverSet, p, v, w,
              h: float = FD_STEP) -> AlgebraElement:
    """Curvature K(v, w) = D_v A(w) - D_w A(v) + [A(v), A(w)] at one point."""
    p = np.asarray(p, dtype=float)
    if float(cset.clearance(p)) <= 0.0:
        raise OutOfDomain(f"point not interior to cover set {cset.id!r}")
    out = curvature_batch(A, cset, p[None, :], np.asarray(v, dtype=float)[None, :],
                          np.asarray(w, dtype=float)[None, :], h)[0]
    return project_to_algebra(out, A.spec)


def check_linearity(A: LocalConnectionForm, pts: np.ndarray,
                    rng: np.random.Generator) -> float:
    """Max deviation from linearity of the tangent slot on random samples."""
    pts = np.asarray(pts, dtype=float)
    v = rng.standard_normal(pts.shape)
    w = rng.standard_normal(pts.shape)
    a = rng.uniform(-2, 2, size=pts.shape[:-1] + (1,))
    b = rng.uniform(-2, 2, size=pts.shape[:-1] + (1,))
    lhs = A.eval(pts, a * v + b * w)
    rhs = a[..., None] * A.eval(pts, v) + b[..., None] * A.eval(pts, w)
    return float(np.abs(lhs - rhs).max())
