"""Base manifolds, open covers and paths.

Manifolds are embedded presets (plane, 2-sphere, torus, circle); points are
ambient vectors satisfying the membership equation.  An open cover plays the
role of the projection from the disjoint union of its sets down to the
manifold: each set carries a chart to R^2, a signed clearance function, a
basepoint and a contraction path onto that basepoint.

Paths are smooth curves [0,1] -> M that are constant on a collar near each
endpoint (a "sitting instant"), so that concatenation stays smooth.  Every
user-supplied core curve is wrapped in a C^3 polynomial smoothstep of order 7
with collar width 0.1.  Curve callables are vectorized: they accept an array
of parameters and return an array of ambient points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EndpointMismatch, InvalidReparam, NoCoveringSet, OutOfDomain

SITTING_EPS = 0.1
#: margin used when cutting paths at cover-set boundaries
CLEARANCE_MARGIN = 1e-3
_SCAN_STEP = 1e-3
_BISECT_TOL = 1e-6


def smoothstep7(u):
    """Order-7 smoothstep: first three derivatives vanish at 0 and 1."""
    u = np.clip(u, 0.0, 1.0)
    return u**4 * (35.0 - 84.0 * u + 70.0 * u**2 - 20.0 * u**3)


def smoothstep7_deriv(u):
    u = np.asarray(u, dtype=float)
    inside = (u > 0.0) & (u < 1.0)
    uu = np.clip(u, 0.0, 1.0)
    d = 140.0 * uu**3 * (1.0 - uu) ** 3
    return np.where(inside, d, 0.0)


def time_warp(t, eps: float = SITTING_EPS):
    """Collar-clamped smoothstep mapping [eps, 1-eps] onto [0, 1]."""
    t = np.asarray(t, dtype=float)
    return smoothstep7((t - eps) / (1.0 - 2.0 * eps))


def time_warp_deriv(t, eps: float = SITTING_EPS):
    t = np.asarray(t, dtype=float)
    return smoothstep7_deriv((t - eps) / (1.0 - 2.0 * eps)) / (1.0 - 2.0 * eps)


# ---------------------------------------------------------------------------
# manifolds


@dataclass(frozen=True)
class Manifold:
    """Embedded preset manifold; points are ambient vectors."""

    kind: str  # PlaneR2 | SphereS2 | TorusT2 | CircleS1

    _AMBIENT = {"PlaneR2": 2, "SphereS2": 3, "TorusT2": 3, "CircleS1": 2}
    # embedded torus radii
    TORUS_R = 2.0
    TORUS_r = 1.0
    # bounded working window used to probe coverage of the (infinite) plane
    PLANE_WINDOW = 1.5

    def __post_init__(self):
        if self.kind not in self._AMBIENT:
            raise ValueError(f"unknown manifold kind {self.kind!r}")

    @property
    def ambient_dim(self) -> int:
        return self._AMBIENT[self.kind]

    def membership_residual(self, p) -> np.ndarray:
        """|membership equation| at each point; 0 on the manifold."""
        p = np.asarray(p, dtype=float)
        if self.kind == "PlaneR2":
            return np.zeros(p.shape[:-1])
        if self.kind == "SphereS2":
            return np.abs(np.linalg.norm(p, axis=-1) - 1.0)
        if self.kind == "CircleS1":
            return np.abs(np.linalg.norm(p, axis=-1) - 1.0)
        rho = np.hypot(p[..., 0], p[..., 1])
        return np.abs((rho - self.TORUS_R) ** 2 + p[..., 2] ** 2 - self.TORUS_r**2)

    def project(self, p) -> np.ndarray:
        """Closest-point projection onto the manifold."""
        p = np.asarray(p, dtype=float)
        if self.kind == "PlaneR2":
            return p
        if self.kind in ("SphereS2", "CircleS1"):
            return p / np.linalg.norm(p, axis=-1, keepdims=True)
        rho = np.hypot(p[..., 0], p[..., 1])
        rho = np.where(rho == 0.0, 1e-12, rho)
        cx = self.TORUS_R * p[..., 0] / rho
        cy = self.TORUS_R * p[..., 1] / rho
        dx, dy, dz = p[..., 0] - cx, p[..., 1] - cy, p[..., 2]
        dr = np.sqrt(dx**2 + dy**2 + dz**2)
        dr = np.where(dr == 0.0, 1e-12, dr)
        s = self.TORUS_r / dr
        return np.stack([cx + s * dx, cy + s * dy, s * dz], axis=-1)

    def probe_grid(self, n: int = 10000) -> np.ndarray:
        """Dense deterministic sample of points used to test cover coverage."""
        m = int(np.ceil(np.sqrt(n)))
        if self.kind == "PlaneR2":
            w = self.PLANE_WINDOW
            xs = np.linspace(-w, w, m)
            gx, gy = np.meshgrid(xs, xs, indexing="ij")
            return np.stack([gx.ravel(), gy.ravel()], axis=-1)
        if self.kind == "SphereS2":
            th = np.linspace(0.0, np.pi, m)
            ph = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
            gt, gp = np.meshgrid(th, ph, indexing="ij")
            return sphere_point(gt.ravel(), gp.ravel())
        if self.kind == "CircleS1":
            a = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
            return np.stack([np.cos(a), np.sin(a)], axis=-1)
        th = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
        ph = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
        gt, gp = np.meshgrid(th, ph, indexing="ij")
        rho = self.TORUS_R + self.TORUS_r * np.cos(gt.ravel())
        return np.stack(
            [
                rho * np.cos(gp.ravel()),
                rho * np.sin(gp.ravel()),
                self.TORUS_r * np.sin(gt.ravel()),
            ],
            axis=-1,
        )

    def to_json(self) -> dict:
        return {"kind": self.kind}

    @staticmethod
    def from_json(obj: dict) -> "Manifold":
        return Manifold(str(obj["kind"]))


def sphere_point(theta, phi) -> np.ndarray:
    """Unit-sphere point from colatitude theta and longitude phi."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def sphere_theta_phi(p):
    p = np.asarray(p, dtype=float)
    theta = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    phi = np.arctan2(p[..., 1], p[..., 0])
    return theta, phi


def sphere_dtheta(p) -> np.ndarray:
    """Ambient realization of the coordinate field d/dtheta."""
    theta, phi = sphere_theta_phi(p)
    return np.stack(
        [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta)],
        axis=-1,
    )


def sphere_dphi(p) -> np.ndarray:
    """Ambient realization of the coordinate field d/dphi (length sin theta)."""
    p = np.asarray(p, dtype=float)
    return np.stack([-p[..., 1], p[..., 0], np.zeros(p.shape[:-1])], axis=-1)


# ---------------------------------------------------------------------------
# cover sets


@dataclass(frozen=True)
class CoverSet:
    """One open set of a cover: clearance, chart, basepoint, contraction.

    `clearance` is a signed margin, positive inside the set.  `chart` maps
    set points to R^2 and `chart_inverse` goes back; both are vectorized.
    `contraction` returns a path from a given point to the basepoint that
    stays inside the set (every shipped set is star-shaped in its chart).
    """

    id: str
    manifold: Manifold
    clearance: Callable[[np.ndarray], np.ndarray]
    chart: Callable[[np.ndarray], np.ndarray]
    chart_inverse: Callable[[np.ndarray], np.ndarray]
    basepoint: np.ndarray
    # exact Jacobian of chart_inverse, (..., 2) -> (..., d, 2); finite
    # differences are used when absent
    chart_inverse_jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    # chart bounding box ((x0, x1), (y0, y1)) enclosing the set, used by
    # rejection sampling and stencil grids
    chart_box: tuple | None = None

    def contains(self, p, margin: float = 0.0):
        return self.clearance(np.asarray(p, dtype=float)) > margin

    def contraction(self, p) -> "Path":
        """Chart-linear path from p to the basepoint, wrapped with collars."""
        p = np.asarray(p, dtype=float)
        u0 = self.chart(p)
        u1 = self.chart(self.basepoint)

        def core(s):
            s = np.asarray(s, dtype=float)[..., None]
            return self.chart_inverse(u0 * (1.0 - s) + u1 * s)

        return Path.from_core(core, self.manifold)

    def push_chart_vector(self, u, ec, delta: float = 1e-6) -> np.ndarray:
        """Derivative of chart_inverse at chart point u along chart vector ec."""
        u = np.asarray(u, dtype=float)
        ec = np.asarray(ec, dtype=float)
        if self.chart_inverse_jacobian is not None:
            jac = self.chart_inverse_jacobian(u)
            return (jac * ec[..., None, :]).sum(-1)
        return (self.chart_inverse(u + delta * ec)
                - self.chart_inverse(u - delta * ec)) / (2.0 * delta)

    def chart_frame(self, p, delta: float = 1e-6) -> np.ndarray:
        """Ambient realizations of the chart basis fields at p, shape (...,2,d).

        Row k is the derivative of chart_inverse along chart direction k.
        """
        p = np.asarray(p, dtype=float)
        u = self.chart(p)
        if self.chart_inverse_jacobian is not None:
            return np.swapaxes(self.chart_inverse_jacobian(u), -1, -2)
        frames = []
        for k in range(2):
            e = np.zeros(2)
            e[k] = delta
            frames.append(
                (self.chart_inverse(u + e) - self.chart_inverse(u - e)) / (2 * delta)
            )
        return np.stack(frames, axis=-2)

    def to_chart_vector(self, p, v) -> np.ndarray:
        """Chart coefficients of an ambient tangent vector at p."""
        frame = self.chart_frame(p)  # (...,2,d)
        gram = frame @ np.swapaxes(frame, -1, -2)  # (...,2,2)
        rhs = (frame * np.asarray(v, dtype=float)[..., None, :]).sum(-1)
        return np.linalg.solve(gram, rhs[..., None])[..., 0]

    def from_chart_vector(self, p, vc) -> np.ndarray:
        frame = self.chart_frame(p)
        return (np.asarray(vc, dtype=float)[..., :, None] * frame).sum(-2)


@dataclass(frozen=True)
class Cover:
    """Finite open cover of a manifold."""

    manifold: Manifold
    sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))

    def by_id(self, set_id: str) -> CoverSet:
        for s in self.sets:
            if s.id == set_id:
                return s
        raise KeyError(f"no cover set {set_id!r}")

    @property
    def ids(self):
        return [s.id for s in self.sets]

    def clearances(self, p) -> np.ndarray:
        """Stacked clearances, shape (n_sets, ...)."""
        p = np.asarray(p, dtype=float)
        return np.stack([s.clearance(p) for s in self.sets], axis=0)

    def best_set(self, p) -> CoverSet:
        """Highest-clearance set at p (first wins on ties)."""
        c = self.clearances(p)
        return self.sets[int(np.argmax(c))]

    def check_covers(self, n_probe: int = 10000) -> float:
        """Minimum over probe points of the best clearance (must be > 0)."""
        pts = self.manifold.probe_grid(n_probe)
        return float(self.clearances(pts).max(axis=0).min())


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Path:
    """Smooth curve [0,1] -> M, constant on end collars of width sitting_epsilon."""

    curve: Callable[[np.ndarray], np.ndarray]
    sitting_epsilon: float
    manifold: Manifold
    n_samples: int = 1024

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = self.curve(np.atleast_1d(t))
        return out[0] if scalar else out

    @property
    def start(self) -> np.ndarray:
        return self(0.0)

    @property
    def end(self) -> np.ndarray:
        return self(1.0)

    @staticmethod
    def from_core(core, manifold: Manifold, eps: float = SITTING_EPS,
                  n_samples: int = 1024) -> "Path":
        """Wrap a core curve with the order-7 smoothstep collar."""

        def curve(t):
            return core(time_warp(t, eps))

        return Path(curve, eps, manifold, n_samples)

    def is_loop(self, tol: float = 1e-10) -> bool:
        return bool(np.linalg.norm(self.start - self.end) <= tol)

    def check_sitting(self, n: int = 100, tol: float = 1e-12) -> float:
        """Largest deviation from constancy inside both collars."""
        eps = self.sitting_epsilon
        t0 = np.linspace(0.0, eps, n)
        t1 = np.linspace(1.0 - eps, 1.0, n)
        d0 = np.linalg.norm(self(t0) - self.start, axis=-1).max()
        d1 = np.linalg.norm(self(t1) - self.end, axis=-1).max()
        return float(max(d0, d1))

    def check_membership(self, tol: float = 1e-10) -> float:
        ts = np.linspace(0.0, 1.0, self.n_samples)
        return float(self.manifold.membership_residual(self(ts)).max())

    def subpath(self, t0: float, t1: float) -> "Path":
        """Restriction to [t0, t1], reparameterized to [0,1] with fresh collars.

        Transport along the result equals transport along the restriction
        (line integrals are reparameterization invariant).
        """

        def core(s):
            return self(t0 + (t1 - t0) * np.asarray(s, dtype=float))

        return Path.from_core(core, self.manifold, n_samples=self.n_samples)


def constant_path(point, manifold: Manifold) -> Path:
    point = np.asarray(point, dtype=float)

    def curve(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(point, t.shape + point.shape).copy()

    return Path(curve, SITTING_EPS, manifold)


def compose_paths(gamma1: Path, gamma2: Path) -> Path:
    """Concatenation: gamma1 on [0, 1/2], gamma2 on [1/2, 1]."""
    if gamma1.manifold != gamma2.manifold:
        raise EndpointMismatch("paths live on different manifolds")
    gap = np.linalg.norm(gamma1.end - gamma2.start)
    if gap > 1e-10:
        raise EndpointMismatch(f"end/start gap {gap:.3e} exceeds 1e-10")

    def curve(t):
        t = np.asarray(t, dtype=float)
        a = gamma1.curve(np.clip(2.0 * t, 0.0, 1.0))
        b = gamma2.curve(np.clip(2.0 * t - 1.0, 0.0, 1.0))
        return np.where((t < 0.5)[..., None], a, b)

    eps = min(gamma1.sitting_epsilon, gamma2.sitting_epsilon) / 2.0
    return Path(curve, eps, gamma1.manifold,
                max(gamma1.n_samples, gamma2.n_samples))


def invert_path(gamma: Path) -> Path:
    """Time reversal t -> gamma(1-t)."""

    def curve(t):
        return gamma.curve(1.0 - np.asarray(t, dtype=float))

    return Path(curve, gamma.sitting_epsilon, gamma.manifold, gamma.n_samples)


@dataclass(frozen=True)
class Reparam:
    """Endpoint-fixing weakly increasing time change with its own collars."""

    func: Callable[[np.ndarray], np.ndarray]
    sitting_epsilon: float

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))


def identity_reparam() -> Reparam:
    return Reparam(lambda t: time_warp(t), SITTING_EPS)


def smoothstep_reparam() -> Reparam:
    return Reparam(lambda t: smoothstep7(time_warp(t)), SITTING_EPS)


def square_reparam() -> Reparam:
    return Reparam(lambda t: time_warp(t) ** 2, SITTING_EPS)


def reparam_family():
    """The three time changes used by the invariance tests."""
    return [identity_reparam(), smoothstep_reparam(), square_reparam()]


def reparameterize(gamma: Path, beta: Reparam) -> Path:
    """Precompose with a time change; transport along the result is unchanged."""
    ts = np.linspace(0.0, 1.0, 257)
    vals = np.atleast_1d(beta(ts))
    if abs(vals[0]) > 1e-12 or abs(vals[-1] - 1.0) > 1e-12:
        raise InvalidReparam("time change must fix the endpoints")
    if np.any(np.diff(vals) < -1e-12):
        raise InvalidReparam("time change must be weakly increasing")

    def curve(t):
        return gamma.curve(np.clip(beta(t), 0.0, 1.0))

    return Path(curve, beta.sitting_epsilon, gamma.manifold, gamma.n_samples)


def tangent(gamma: Path, t: float, h: float = 1e-5) -> np.ndarray:
    """Velocity of the path by a 5-point central difference.

    Returns exact zero inside the sitting collars; one-sided stencils are
    used next to the parameter boundary.
    """
    t = float(t)
    eps = gamma.sitting_epsilon
    if t <= eps or t >= 1.0 - eps:
        return np.zeros(gamma.manifold.ambient_dim)
    return path_velocity(gamma, np.array([t]), h)[0]


def path_velocity(gamma: Path, ts: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Vectorized 5-point velocity at many parameters, zero inside collars."""
    ts = np.asarray(ts, dtype=float)
    lo, hi = 2 * h, 1.0 - 2 * h
    tc = np.clip(ts, lo, hi)
    d = (
        -gamma(tc + 2 * h)
        + 8.0 * gamma(tc + h)
        - 8.0 * gamma(tc - h)
        + gamma(tc - 2 * h)
    ) / (12.0 * h)
    eps = gamma.sitting_epsilon
    inside = (ts > eps) & (ts < 1.0 - eps)
    return np.where(inside[..., None], d, 0.0)


# ---------------------------------------------------------------------------
# decomposition over a cover


@dataclass(frozen=True)
class PathPartition:
    """Breakpoints 0 = t_0 < ... < t_n = 1 with one cover set per piece."""

    breakpoints: tuple
    set_ids: tuple

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "set_ids", tuple(self.set_ids))
        if len(self.breakpoints) != len(self.set_ids) + 1:
            raise ValueError("need exactly one set per piece")

    @property
    def n_pieces(self) -> int:
        return len(self.set_ids)


def _bisect_margin(gamma: Path, cset: CoverSet, t_ok: float, t_bad: float,
                   margin: float) -> float:
    """Largest t in [t_ok, t_bad] with clearance still above the margin."""
    while t_bad - t_ok > _BISECT_TOL:
        mid = 0.5 * (t_ok + t_bad)
        if float(cset.clearance(gamma(mid))) > margin:
            t_ok = mid
        else:
            t_bad = mid
    return t_ok


def decompose_path(gamma: Path, cover: Cover,
                   margin: float = CLEARANCE_MARGIN) -> PathPartition:
    """Greedy cover decomposition of a path.

    Starting from the highest-clearance set, each piece is extended while
    that set's clearance stays above the margin on a fine parameter grid;
    the cut is then bisected to 1e-6 and the next piece starts in the set
    with the highest clearance there.
    """
    ts = np.arange(0.0, 1.0 + _SCAN_STEP / 2, _SCAN_STEP)
    ts[-1] = 1.0
    pts = gamma(ts)
    clear = cover.clearances(pts)  # (n_sets, n_grid)
    ok = clear > margin  # False also for non-finite clearances
    uncovered = ~np.any(ok, axis=0)
    if np.any(uncovered):
        bad = ts[int(np.argmax(uncovered))]
        raise NoCoveringSet(f"no set has clearance > {margin} near t={bad:.4f}")

    breakpoints = [0.0]
    set_ids = []
    i = 0
    current = int(np.argmax(clear[:, 0]))
    while True:
        j = i
        while j + 1 < len(ts) and ok[current, j + 1]:
            j += 1
        if j + 1 == len(ts):
            breakpoints.append(1.0)
            set_ids.append(cover.sets[current].id)
            break
        lo = max(ts[j], breakpoints[-1])
        t_cut = _bisect_margin(gamma, cover.sets[current], lo, ts[j + 1], margin)
        if t_cut <= breakpoints[-1] + _BISECT_TOL:
            raise NoCoveringSet(
                f"cannot advance past t={breakpoints[-1]:.6f}; overlap thinner "
                f"than the margin {margin}"
            )
        breakpoints.append(t_cut)
        set_ids.append(cover.sets[current].id)
        nxt = int(np.argmax(cover.clearances(gamma(t_cut))))
        if not float(cover.sets[nxt].clearance(gamma(t_cut))) > margin:
            raise NoCoveringSet(f"no set has clearance > {margin} at cut t={t_cut:.6f}")
        current = nxt
        i = j
    return PathPartition(tuple(breakpoints), tuple(set_ids))


def check_partition(gamma: Path, cover: Cover, part: PathPartition,
                    samples_per_piece: int = 64) -> float:
    """Minimum clearance of each piece inside its assigned set."""
    worst = np.inf
    for k in range(part.n_pieces):
        t0, t1 = part.breakpoints[k], part.breakpoints[k + 1]
        cset = cover.by_id(part.set_ids[k])
        ts = np.linspace(t0, t1, samples_per_piece)
        worst = min(worst, float(cset.clearance(gamma(ts)).min()))
    return worst


def require_inside(gamma: Path, cset: CoverSet, n: int = 256):
    """Raise OutOfDomain unless the whole image lies in the set."""
    ts = np.linspace(0.0, 1.0, n)
    c = cset.clearance(gamma(ts))
    if float(c.min()) <= 0.0:
        raise OutOfDomain(
            f"path leaves cover set {cset.id!r} (min clearance {c.min():.3e})"
        )


# ---------------------------------------------------------------------------
# preset covers and paths


def _plane_chart(center):
    center = np.asarray(center, dtype=float)

    def chart(p):
        return np.asarray(p, dtype=float) - center

    def chart_inv(u):
        return np.asarray(u, dtype=float) + center

    def jac(u):
        u = np.asarray(u, dtype=float)
        return np.broadcast_to(np.eye(2), u.shape[:-1] + (2, 2)).copy()

    return chart, chart_inv, jac


def plane_grid_cover(window: float = 1.6, overlap: float = 0.8) -> Cover:
    """Four overlapping rectangles covering the plane working window."""
    manifold = Manifold("PlaneR2")
    half = window
    lo, hi = -half, half
    mid = overlap / 2.0
    boxes = {
        "sw": (lo, mid, lo, mid),
        "se": (-mid, hi, lo, mid),
        "nw": (lo, mid, -mid, hi),
        "ne": (-mid, hi, -mid, hi),
    }
    sets = []
    for sid, (x0, x1, y0, y1) in boxes.items():
        center = np.array([(x0 + x1) / 2.0, (y0 + y1) / 2.0])
        chart, chart_inv, jac = _plane_chart(center)

        def clearance(p, x0=x0, x1=x1, y0=y0, y1=y1):
            p = np.asarray(p, dtype=float)
            return np.minimum.reduce(
                [p[..., 0] - x0, x1 - p[..., 0], p[..., 1] - y0, y1 - p[..., 1]]
            )

        box = ((x0 - center[0], x1 - center[0]), (y0 - center[1], y1 - center[1]))
        sets.append(
            CoverSet(sid, manifold, clearance, chart, chart_inv, center, jac, box)
        )
    return Cover(manifold, tuple(sets))


def single_set_plane_cover(window: float = 4.0) -> Cover:
    """One rectangle covering the whole working window (trivial descent)."""
    manifold = Manifold("PlaneR2")
    chart, chart_inv, jac = _plane_chart([0.0, 0.0])

    def clearance(p):
        p = np.asarray(p, dtype=float)
        return window - np.maximum(np.abs(p[..., 0]), np.abs(p[..., 1]))

    box = ((-window, window), (-window, window))
    return Cover(
        manifold,
        (CoverSet("all", manifold, clearance, chart, chart_inv,
                  np.array([0.0, 0.0]), jac, box),),
    )


def two_caps_cover(overlap_z: float = 0.3) -> Cover:
    """Two polar caps on the unit sphere, overlapping on |z| < overlap_z.

    The north cap {z > -overlap_z} uses the stereographic chart from the
    south pole, the south cap the chart from the north pole; both charts are
    disks, star-shaped around the pole.
    """
    manifold = Manifold("SphereS2")

    def chart_n(p):
        p = np.asarray(p, dtype=float)
        w = 1.0 + p[..., 2]
        safe = np.where(w == 0.0, np.nan, w)
        return np.stack([p[..., 0] / safe, p[..., 1] / safe], axis=-1)

    def chart_n_inv(u):
        u = np.asarray(u, dtype=float)
        r2 = (u**2).sum(axis=-1)
        z = (1.0 - r2) / (1.0 + r2)
        w = 1.0 + z
        return np.stack([u[..., 0] * w, u[..., 1] * w, z], axis=-1)

    def chart_s(p):
        p = np.asarray(p, dtype=float)
        w = 1.0 - p[..., 2]
        safe = np.where(w == 0.0, np.nan, w)
        return np.stack([p[..., 0] / safe, p[..., 1] / safe], axis=-1)

    def chart_s_inv(u):
        u = np.asarray(u, dtype=float)
        r2 = (u**2).sum(axis=-1)
        z = (r2 - 1.0) / (1.0 + r2)
        w = 1.0 - z
        return np.stack([u[..., 0] * w, u[..., 1] * w, z], axis=-1)

    def _stereo_jac(u, zsign):
        # x = 2X/w, y = 2Y/w, z = zsign (1 - rho^2)/w with w = 1 + rho^2
        u = np.asarray(u, dtype=float)
        x_, y_ = u[..., 0], u[..., 1]
        w = 1.0 + x_**2 + y_**2
        jxx = 2.0 / w - 4.0 * x_**2 / w**2
        jxy = -4.0 * x_ * y_ / w**2
        jyy = 2.0 / w - 4.0 * y_**2 / w**2
        jzx = -zsign * 4.0 * x_ / w**2
        jzy = -zsign * 4.0 * y_ / w**2
        row_x = np.stack([jxx, jxy], axis=-1)
        row_y = np.stack([jxy, jyy], axis=-1)
        row_z = np.stack([jzx, jzy], axis=-1)
        return np.stack([row_x, row_y, row_z], axis=-2)

    def jac_n(u):
        return _stereo_jac(u, +1.0)

    def jac_s(u):
        return _stereo_jac(u, -1.0)

    def clearance_n(p):
        return np.asarray(p, dtype=float)[..., 2] + overlap_z

    def clearance_s(p):
        return overlap_z - np.asarray(p, dtype=float)[..., 2]

    r_max = np.sqrt((1.0 + overlap_z) / (1.0 - overlap_z))
    box = ((-r_max, r_max), (-r_max, r_max))
    north = CoverSet("north", manifold, clearance_n, chart_n, chart_n_inv,
                     np.array([0.0, 0.0, 1.0]), jac_n, box)
    south = CoverSet("south", manifold, clearance_s, chart_s, chart_s_inv,
                     np.array([0.0, 0.0, -1.0]), jac_s, box)
    return Cover(manifold, (north, south))


def latitude_path(theta0: float, phi0: float = 0.0, turns: float = 1.0) -> Path:
    """Latitude loop at colatitude theta0, unit angular speed core."""
    manifold = Manifold("SphereS2")

    def core(s):
        s = np.asarray(s, dtype=float)
        return sphere_point(np.full_like(s, theta0), phi0 + 2 * np.pi * turns * s)

    return Path.from_core(core, manifold)


def equator_path() -> Path:
    return latitude_path(np.pi / 2.0)


def meridian_path(phi0: float = 0.0) -> Path:
    """Great-circle arc from the north to the south pole at longitude phi0."""
    manifold = Manifold("SphereS2")

    def core(s):
        s = np.asarray(s, dtype=float)
        return sphere_point(np.pi * s, np.full_like(s, phi0))

    return Path.from_core(core, manifold)


def segment_path(a, b, manifold: Manifold | None = None) -> Path:
    """Straight segment, projected onto the manifold when one is given."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    manifold = manifold or Manifold("PlaneR2")

    def core(s):
        s = np.asarray(s, dtype=float)[..., None]
        pts = a * (1.0 - s) + b * s
        return manifold.project(pts)

    return Path.from_core(core, manifold)


def circle_path(center, radius: float, manifold: Manifold | None = None,
                turns: float = 1.0) -> Path:
    center = np.asarray(center, dtype=float)
    manifold = manifold or Manifold("PlaneR2")

    def core(s):
        a = 2 * np.pi * turns * np.asarray(s, dtype=float)
        pts = np.stack(
            [center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)],
            axis=-1,
        )
        return manifold.project(pts)

    return Path.from_core(core, manifold)


def waypoint_path(points: Sequence, manifold: Manifold) -> Path:
    """Cubic spline through waypoints, projected onto the manifold."""
    from scipy.interpolate import CubicSpline

    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise ValueError("need at least two waypoints")
    s_knots = np.linspace(0.0, 1.0, len(pts))
    closed = np.linalg.norm(pts[0] - pts[-1]) < 1e-12
    spline = CubicSpline(s_knots, pts, axis=0,
                         bc_type="periodic" if closed else "natural")

    def core(s):
        return manifold.project(spline(np.asarray(s, dtype=float)))

    return Path.from_core(core, manifold)


def random_waypoint_path(rng: np.random.Generator, start, end,
                         manifold: Manifold, n_interior: int = 3,
                         spread: float = 0.8) -> Path:
    """Seeded random smooth path between fixed endpoints (plane window)."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    interior = rng.uniform(-spread, spread, size=(n_interior, start.size))
    pts = np.vstack([start, interior, end])
    return waypoint_path(pts, manifold)
