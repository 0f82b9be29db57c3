"""Matrix Lie groups and Lie algebras.

Supported structure groups: U(1), SU(2), SO(3), U(n) and GL(n, C), all
realized as small dense complex matrices (U(1) as 1x1 matrices so a single
matrix backend serves every group).  The module provides the exponential and
principal logarithm, the adjoint action, the right Maurer-Cartan form
(dg) g^{-1} of a group-valued curve, and a polar-projection repair that pulls
numerically drifted matrices back onto the group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import OutOfRadius, TooFarFromGroup

_FIXED_DIMS = {"U1": 1, "SU2": 2, "SO3": 3}
_KINDS = ("U1", "SU2", "SO3", "Un", "GLn")

#: invariant tolerances for group / algebra membership
GROUP_TOL = 1e-8
ALGEBRA_TOL = 1e-8
REPAIR_RADIUS = 1e-2


@dataclass(frozen=True)
class GroupSpec:
    """Names a structure group and fixes its matrix dimension."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        fixed = _FIXED_DIMS.get(self.kind)
        if fixed is not None and self.n != fixed:
            raise ValueError(f"{self.kind} requires n={fixed}, got n={self.n}")
        if self.n < 1:
            raise ValueError("matrix dimension must be positive")

    @property
    def unitary(self) -> bool:
        return self.kind in ("U1", "SU2", "Un")

    @property
    def special(self) -> bool:
        """Determinant pinned to 1."""
        return self.kind in ("SU2", "SO3")

    @property
    def real(self) -> bool:
        return self.kind == "SO3"

    @staticmethod
    def u1() -> "GroupSpec":
        return GroupSpec("U1", 1)

    @staticmethod
    def su2() -> "GroupSpec":
        return GroupSpec("SU2", 2)

    @staticmethod
    def so3() -> "GroupSpec":
        return GroupSpec("SO3", 3)

    @staticmethod
    def un(n: int) -> "GroupSpec":
        return GroupSpec("Un", n)

    @staticmethod
    def gln(n: int) -> "GroupSpec":
        return GroupSpec("GLn", n)

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}

    @staticmethod
    def from_json(obj: dict) -> "GroupSpec":
        return GroupSpec(str(obj["kind"]), int(obj["n"]))


def _as_matrix(mat, n: int) -> np.ndarray:
    m = np.array(mat, dtype=complex)
    if m.shape != (n, n):
        raise ValueError(f"expected {n}x{n} matrix, got shape {m.shape}")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class GroupElement:
    """A group value: n x n complex matrix satisfying the membership laws."""

    spec: GroupSpec
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _as_matrix(self.mat, self.spec.n))

    @staticmethod
    def identity(spec: GroupSpec) -> "GroupElement":
        return GroupElement(spec, np.eye(spec.n, dtype=complex))

    def inverse(self) -> "GroupElement":
        if self.spec.unitary or self.spec.kind == "SO3":
            return GroupElement(self.spec, self.mat.conj().T)
        return GroupElement(self.spec, np.linalg.inv(self.mat))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if other.spec != self.spec:
            raise ValueError("group product across different specs")
        return GroupElement(self.spec, self.mat @ other.mat)

    def defect(self) -> float:
        return group_defect(self.mat, self.spec)


@dataclass(frozen=True)
class AlgebraElement:
    """A Lie algebra value: n x n complex matrix in the tangent space at 1."""

    spec: GroupSpec
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _as_matrix(self.mat, self.spec.n))

    @staticmethod
    def zero(spec: GroupSpec) -> "AlgebraElement":
        return AlgebraElement(spec, np.zeros((spec.n, spec.n), dtype=complex))

    def norm(self) -> float:
        return float(np.linalg.norm(self.mat, 2))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.spec, self.mat + other.mat)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.spec, self.mat - other.mat)

    def __mul__(self, c) -> "AlgebraElement":
        return AlgebraElement(self.spec, self.mat * c)

    __rmul__ = __mul__

    def defect(self) -> float:
        return algebra_defect(self.mat, self.spec)


def opnorm(m: np.ndarray) -> float:
    """Spectral (operator 2-) norm, closed form for 1x1 and 2x2."""
    n = m.shape[0]
    if n == 1:
        return float(abs(m[0, 0]))
    if n == 2:
        # largest eigenvalue of m^+ m from trace and determinant
        h00 = abs(m[0, 0]) ** 2 + abs(m[1, 0]) ** 2
        h11 = abs(m[0, 1]) ** 2 + abs(m[1, 1]) ** 2
        h01 = np.conj(m[0, 0]) * m[0, 1] + np.conj(m[1, 0]) * m[1, 1]
        t = h00 + h11
        disc = np.sqrt(max((h00 - h11) ** 2 + 4.0 * abs(h01) ** 2, 0.0))
        return float(np.sqrt(max(0.5 * (t + disc), 0.0)))
    return float(np.linalg.norm(m, 2))


def _polar_2x2(m: np.ndarray) -> np.ndarray:
    """Unitary polar factor of an invertible 2x2 matrix, closed form.

    U = m (m^+ m)^{-1/2}; the Hermitian square root comes from the
    Cayley-Hamilton identity sqrt(H) = (H + sqrt(det H) I) / sqrt(tr H + 2 sqrt(det H)).
    """
    h = m.conj().T @ m
    det_h = (h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]).real
    d = np.sqrt(max(det_h, 0.0))
    t = max(h[0, 0].real + h[1, 1].real + 2.0 * d, 1e-300)
    r = 1.0 / np.sqrt(t)
    s00 = (h[0, 0] + d) * r
    s01 = h[0, 1] * r
    s10 = h[1, 0] * r
    s11 = (h[1, 1] + d) * r
    det_s = s00 * s11 - s01 * s10
    inv_sqrt = np.array([[s11, -s01], [-s10, s00]]) / det_s
    return m @ inv_sqrt


def group_defect(m: np.ndarray, spec: GroupSpec) -> float:
    """Largest violation of the membership constraints of `spec`."""
    n = spec.n
    eye = np.eye(n)
    d = 0.0
    if spec.unitary or spec.kind == "SO3":
        d = max(d, opnorm(m @ m.conj().T - eye))
    if spec.special:
        d = max(d, abs(np.linalg.det(m) - 1.0))
    if spec.real:
        d = max(d, float(np.abs(m.imag).max(initial=0.0)))
    if spec.kind == "GLn":
        smin = np.linalg.svd(m, compute_uv=False)[-1]
        d = max(d, 0.0 if smin > 1e-12 else 1.0)
    return d


def algebra_defect(m: np.ndarray, spec: GroupSpec) -> float:
    """Largest violation of the Lie algebra constraints of `spec`."""
    d = 0.0
    if spec.unitary or spec.kind == "SO3":
        d = max(d, opnorm(m + m.conj().T))
    if spec.special:
        d = max(d, abs(np.trace(m)))
    if spec.real:
        d = max(d, float(np.abs(m.imag).max(initial=0.0)))
    return d


def project_to_algebra(m: np.ndarray, spec: GroupSpec) -> AlgebraElement:
    """Orthogonal projection of a matrix onto the Lie algebra of `spec`."""
    x = np.array(m, dtype=complex)
    if spec.unitary:
        x = 0.5 * (x - x.conj().T)
        if spec.special:
            x = x - (np.trace(x) / spec.n) * np.eye(spec.n)
    elif spec.kind == "SO3":
        x = 0.5 * (x.real - x.real.T).astype(complex)
    return AlgebraElement(spec, x)


def repair_to_group(m: np.ndarray, spec: GroupSpec) -> GroupElement:
    """Project a drifted matrix onto the nearest group element.

    Unitary and orthogonal kinds use the polar decomposition m = U P and keep
    the orthogonal factor U (with a determinant phase fix for SU2/SO3).  GLn
    is an open subset of all matrices, so any invertible matrix is already in
    the group and is returned unchanged.  Raises TooFarFromGroup when m is
    more than REPAIR_RADIUS away from the group in operator norm.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (spec.n, spec.n):
        raise ValueError("matrix shape does not match spec")
    if spec.kind == "GLn":
        smin = np.linalg.svd(m, compute_uv=False)[-1]
        if smin <= 1e-12:
            raise TooFarFromGroup("matrix is numerically singular")
        return GroupElement(spec, m)

    if spec.kind == "SO3":
        u, _, vt = np.linalg.svd(m.real)
        if np.linalg.det(u @ vt) < 0:
            u = u.copy()
            u[:, -1] = -u[:, -1]
        g = (u @ vt).astype(complex)
    elif spec.n == 1:
        z = m[0, 0]
        if z == 0:
            raise TooFarFromGroup("zero matrix cannot be repaired")
        g = np.array([[z / abs(z)]])
    else:
        if spec.n == 2:
            g = _polar_2x2(m)
            if spec.special:
                phase = np.angle(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])
                g = g * np.exp(-0.5j * phase)
        else:
            u, _, vh = np.linalg.svd(m)
            g = u @ vh
            if spec.special:
                phase = np.angle(np.linalg.det(g))
                g = g * np.exp(-1j * phase / spec.n)

    if opnorm(m - g) > REPAIR_RADIUS:
        raise TooFarFromGroup(
            f"distance {opnorm(m - g):.3e} exceeds repair radius {REPAIR_RADIUS}"
        )
    return GroupElement(spec, g)


def _is_normal(m: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, opnorm(m) ** 2)
    return opnorm(m @ m.conj().T - m.conj().T @ m) <= tol * scale


def exp_map(x: AlgebraElement) -> GroupElement:
    """Matrix exponential of an algebra element, repaired onto the group.

    Anti-Hermitian inputs (all unitary/orthogonal kinds) go through an exact
    eigendecomposition; the general case falls back to Pade scaling and
    squaring.
    """
    spec = x.spec
    m = x.mat
    if spec.n <= 3 and _is_normal(m) and algebra_defect(m, spec) <= 1e-10:
        # m anti-Hermitian: -i m is Hermitian, exp(m) = V e^{i w} V^+
        w, v = np.linalg.eigh(-1j * m)
        g = (v * np.exp(1j * w)) @ v.conj().T
    else:
        g = scipy.linalg.expm(m)
    return repair_to_group(g, spec)


def log_map(g: GroupElement) -> AlgebraElement:
    """Principal matrix logarithm, valid within the injectivity radius.

    Requires |g - 1| < 1 in operator norm; eigenvalues then stay off the
    negative real axis and the principal branch is well defined.
    """
    spec = g.spec
    m = g.mat
    if opnorm(m - np.eye(spec.n)) >= 1.0:
        raise OutOfRadius("element outside the injectivity radius of exp")
    if _is_normal(m):
        # Schur form of a normal matrix is diagonal.
        t, z = scipy.linalg.schur(m, output="complex")
        x = (z * np.log(np.diag(t))) @ z.conj().T
    else:
        x = scipy.linalg.logm(m)
    return project_to_algebra(x, spec)


def adjoint(g: GroupElement, x: AlgebraElement) -> AlgebraElement:
    """Adjoint action g x g^{-1}."""
    if g.spec != x.spec:
        raise ValueError("adjoint across different specs")
    ginv = g.inverse().mat
    return AlgebraElement(g.spec, g.mat @ x.mat @ ginv)


def commutator(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.spec, x.mat @ y.mat - y.mat @ x.mat)


def _curve_matrix(value) -> np.ndarray:
    if isinstance(value, GroupElement):
        return value.mat
    return np.asarray(value, dtype=complex)


def right_maurer_cartan(
    g_curve: Callable[[float], GroupElement | np.ndarray],
    t: float,
    spec: GroupSpec,
    h: float = 1e-4,
    derivative: Callable[[float], np.ndarray] | None = None,
) -> AlgebraElement:
    """Right Maurer-Cartan value (dg/dt) g(t)^{-1} of a group-valued curve.

    The derivative is a 5-point central difference with step `h` unless an
    exact derivative is supplied.  The result is projected back onto the
    algebra to strip finite-difference noise.
    """
    g0 = _curve_matrix(g_curve(t))
    if derivative is not None:
        dg = np.asarray(derivative(t), dtype=complex)
    else:
        gp2 = _curve_matrix(g_curve(t + 2 * h))
        gp1 = _curve_matrix(g_curve(t + h))
        gm1 = _curve_matrix(g_curve(t - h))
        gm2 = _curve_matrix(g_curve(t - 2 * h))
        dg = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h)
    val = dg @ np.linalg.inv(g0)
    return project_to_algebra(val, spec)


def random_algebra_element(
    spec: GroupSpec, rng: np.random.Generator, scale: float = 1.0
) -> AlgebraElement:
    """Deterministic random algebra element, used by tests and benchmarks."""
    n = spec.n
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    x = project_to_algebra(raw, spec).mat
    if spec.kind == "GLn":
        x = raw
    nrm = opnorm(x)
    if nrm > 0:
        x = x * (scale / nrm)
    return AlgebraElement(spec, x)
