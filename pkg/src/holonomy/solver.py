"""Path-ordered exponentials: the transport ODE and its inverse.

Sign convention, used everywhere in this package: transport along a curve
solves

    u'(t) = -a(t) u(t),        u(t0) = 1,

where a(t) is the pulled-back connection evaluated on the velocity.  For an
abelian group this integrates to exp(-integral of A along the curve).

The integrator is fixed-step classical RK4.  For the linear equation above
each step is a precomputed transfer matrix, so a run of N steps is one
batched evaluation of a(t) on the half-step grid followed by an ordered
product of N small matrices; the error estimate is Richardson step doubling
between N and 2N steps.  The running product is repaired onto the group
every 16 steps and at the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import (
    AlgebraCurve,
    GaugeFunction,
    LocalConnectionForm,
    gauge_transform,
    pullback_1form,
)
from .errors import ToleranceNotReached
from .geometry import Path
from .groups import (
    GroupElement,
    GroupSpec,
    _polar_2x2,
    opnorm,
    project_to_algebra,
    repair_to_group,
)

_REPAIR_EVERY = 16


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step RK4 configuration with a step-doubling error target."""

    base_steps: int = 256
    tol: float = 1e-9
    max_refinements: int = 8

    def __post_init__(self):
        if self.base_steps < 16:
            raise ValueError("base_steps must be at least 16")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class TransportResult:
    """Transport value with its step-doubling error estimate."""

    value: GroupElement
    estimated_error: float
    steps_used: int


def _transfer_matrices(avals: np.ndarray, h: float) -> np.ndarray:
    """RK4 transfer matrices for u' = -a(t) u from a on the half-step grid.

    avals has shape (2N+1, n, n): values at t0, t0+h/2, t0+h, ...  Returns
    S of shape (N, n, n) with u_{k+1} = S_k u_k.
    """
    n = avals.shape[-1]
    a1 = avals[0:-1:2]
    am = avals[1::2]
    a4 = avals[2::2]
    am2 = am @ am
    eye = np.eye(n, dtype=complex)
    s = (
        eye
        - (h / 6.0) * (a1 + 4.0 * am + a4)
        + (h**2 / 6.0) * (am @ a1 + am2 + a4 @ am)
        - (h**3 / 12.0) * (am2 @ a1 + a4 @ am2)
        + (h**4 / 24.0) * (a4 @ am2 @ a1)
    )
    return s


def _chunk_products(s: np.ndarray, chunk: int) -> np.ndarray:
    """Time-ordered products over consecutive chunks, vectorized across chunks.

    Chunks are padded with identities at the late end, so the chunk size is a
    power of two and the tree reduction needs no odd-count handling.
    """
    n_steps, n, _ = s.shape
    n_chunks = -(-n_steps // chunk)
    pad = n_chunks * chunk - n_steps
    if pad:
        eye = np.broadcast_to(np.eye(n, dtype=complex), (pad, n, n))
        s = np.concatenate([s, eye], axis=0)
    s = s.reshape(n_chunks, chunk, n, n)
    while s.shape[1] > 1:
        s = s[:, 1::2] @ s[:, 0::2]
    return s[:, 0]


def _fast_repair(u: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Drift repair for the integrator's running product (no distance gate)."""
    if spec.kind == "U1":
        return u / abs(u[0, 0])
    if spec.kind == "GLn":
        return u
    if spec.n == 2:
        g = _polar_2x2(u)
        if spec.special:
            phase = np.angle(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])
            g = g * np.exp(-0.5j * phase)
        return g
    return repair_to_group(u, spec).mat


def _integrate_fixed(a, t0: float, t1: float, n_steps: int,
                     spec: GroupSpec) -> np.ndarray:
    """Ordered product of RK4 transfer matrices over n_steps, with repair."""
    h = (t1 - t0) / n_steps
    ts = t0 + 0.5 * h * np.arange(2 * n_steps + 1)
    avals = np.asarray(a(ts), dtype=complex)
    if avals.shape != (2 * n_steps + 1, spec.n, spec.n):
        raise ValueError(
            f"algebra curve returned shape {avals.shape}, "
            f"expected {(2 * n_steps + 1, spec.n, spec.n)}"
        )
    s = _transfer_matrices(avals, h)
    u = np.eye(spec.n, dtype=complex)
    for q in _chunk_products(s, _REPAIR_EVERY):
        u = q @ u
        u = _fast_repair(u, spec)
    return u


def integrate_fixed(a, t0: float, t1: float, n_steps: int,
                    spec: GroupSpec) -> GroupElement:
    """Single fixed-step RK4 run without error control (benchmark hook)."""
    return GroupElement(spec, _integrate_fixed(a, t0, t1, n_steps, spec))


def path_ordered_exp(a, t0: float, t1: float,
                     cfg: SolverConfig | None = None,
                     spec: GroupSpec | None = None) -> TransportResult:
    """Solve u' = -a(t) u, u(t0) = 1 and return u(t1) with an error estimate.

    `a` is a vectorized algebra curve (an AlgebraCurve or any callable taking
    an array of times and returning (m, n, n) matrices).  Reverse integration
    (t0 > t1) is allowed.  Raises ToleranceNotReached after max_refinements
    doublings.
    """
    cfg = cfg or SolverConfig()
    if spec is None:
        if not isinstance(a, AlgebraCurve):
            raise ValueError("pass spec explicitly for plain callables")
        spec = a.spec
    if t0 == t1:
        return TransportResult(GroupElement.identity(spec), 0.0, 0)

    n = cfg.base_steps
    coarse = _integrate_fixed(a, t0, t1, n, spec)
    for _ in range(cfg.max_refinements + 1):
        fine = _integrate_fixed(a, t0, t1, 2 * n, spec)
        # RK4 is order 4: the fine solution error is ~ |fine - coarse| / 15
        est = opnorm(fine - coarse) / 15.0
        if est <= cfg.tol:
            return TransportResult(repair_to_group(fine, spec), est, 2 * n)
        coarse = fine
        n *= 2
    raise ToleranceNotReached(
        f"estimate {est:.3e} above tol {cfg.tol:.3e} after "
        f"{cfg.max_refinements} refinements"
    )


def transport_local(A: LocalConnectionForm, gamma: Path,
                    cfg: SolverConfig | None = None) -> TransportResult:
    """Local transport along a path lying inside the form's set."""
    return path_ordered_exp(pullback_1form(A, gamma), 0.0, 1.0, cfg)


def check_cocycle_identity(a, x: float, y: float, z: float,
                           cfg: SolverConfig | None = None,
                           spec: GroupSpec | None = None) -> float:
    """Deviation |f(y,z) f(x,y) - f(x,z)| of the two-parameter solution."""
    fyz = path_ordered_exp(a, y, z, cfg, spec).value.mat
    fxy = path_ordered_exp(a, x, y, cfg, spec).value.mat
    fxz = path_ordered_exp(a, x, z, cfg, spec).value.mat
    return opnorm(fyz @ fxy - fxz)


def check_gauge_covariance(A: LocalConnectionForm, g: GaugeFunction,
                           gamma: Path,
                           cfg: SolverConfig | None = None) -> float:
    """Deviation |g(end) k_A - k_{A'} g(start)| for A' the gauge transform."""
    ka = transport_local(A, gamma, cfg).value.mat
    kap = transport_local(gauge_transform(A, g), gamma, cfg).value.mat
    g0 = g.eval(gamma.start[None, :])[0]
    g1 = g.eval(gamma.end[None, :])[0]
    return opnorm(g1 @ ka - kap @ g0)


def recover_form(F, p, v, subpath_family, spec: GroupSpec,
                 h: float = 1e-3) -> "np.ndarray":
    """Recover the connection value A(p, v) from a transport oracle.

    `subpath_family(t)` must return a path from p to a curve point Gamma(t)
    with Gamma(0) = p and Gamma'(0) = v, for small |t| of either sign; `F`
    maps such paths to GroupElements.  The transport of a short piece is
    1 - t A(p, v) + O(t^2), so a central difference of -F recovers A:

        A(p, v) = -(F(h) - F(-h)) / (2h) + O(h^2),

    projected onto the algebra.  The value does not depend on the curve
    representative through (p, v).
    """
    wp = F(subpath_family(h)).mat
    wm = F(subpath_family(-h)).mat
    raw = -(wp - wm) / (2.0 * h)
    return project_to_algebra(raw, spec)


def chart_line_family(cset, p, v, manifold=None):
    """Default short-path family: straight chart lines through p along v."""
    from .geometry import Path as _Path

    manifold = manifold or cset.manifold
    p = np.asarray(p, dtype=float)
    u0 = cset.chart(p)
    vc = cset.to_chart_vector(p, v)

    def family(t: float):
        def core(s):
            s = np.asarray(s, dtype=float)[..., None]
            return cset.chart_inverse(u0 + (t * s) * vc)

        return _Path.from_core(core, manifold)

    return family
