"""Wilson lines, holonomy, associated transport and curvature integrals.

Wilson lines are global transports reported in the anchor trivialization at
the endpoints; holonomy values around based loops therefore carry the usual
basepoint-conjugation ambiguity, which is documented rather than quotiented
away.  The small-loop operation estimates curvature from the holonomy of a
small chart rectangle (the rectangle is centered on the evaluation point,
which upgrades the estimate from first to second order in the edge length).
The Chern number integrates the curvature 2-form over the sphere on a fixed
(theta, phi) product grid, choosing the evaluating cap per point by
clearance and summing with compensated accumulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .connection import curvature_batch
from .descent import AnchorChoice, DifferentialCocycle, factor_path, reconstruct_transport
from .errors import (
    BasepointMismatch,
    DimensionMismatch,
    MissingSample,
    OutOfRadius,
    UnsupportedGroup,
)
from .geometry import Manifold, Path, sphere_dphi, sphere_dtheta, sphere_point
from .groups import AlgebraElement, GroupElement, GroupSpec, log_map, opnorm
from .solver import SolverConfig, transport_local


@dataclass(frozen=True)
class Representation:
    """A linear action of the structure group on C^dim."""

    spec: GroupSpec
    dim: int
    apply: Callable[[GroupElement, np.ndarray], np.ndarray]

    @staticmethod
    def defining(spec: GroupSpec) -> "Representation":
        def apply(g: GroupElement, v: np.ndarray) -> np.ndarray:
            return g.mat @ np.asarray(v, dtype=complex)

        return Representation(spec, spec.n, apply)


class SectionSample:
    """Fibre vectors at sample points, expressed in the anchor trivialization."""

    def __init__(self, dim: int):
        self.dim = dim
        self._data: dict = {}

    @staticmethod
    def _key(p) -> bytes:
        r = np.round(np.asarray(p, dtype=float), 10) + 0.0  # -0.0 -> +0.0
        return r.tobytes()

    def set(self, p, v) -> "SectionSample":
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"expected vectors of length {self.dim}")
        self._data[self._key(p)] = v
        return self

    def get(self, p) -> np.ndarray:
        try:
            return self._data[self._key(p)]
        except KeyError:
            raise MissingSample(f"no section sample at {np.asarray(p)}")


def wilson_line(c: DifferentialCocycle, gamma: Path, anchors: AnchorChoice,
                cfg: SolverConfig | None = None) -> GroupElement:
    """Global transport along gamma in the anchor trivialization."""
    return reconstruct_transport(factor_path(gamma, c, anchors), c, cfg).value


@dataclass(frozen=True)
class HolonomyResult:
    values: tuple  # GroupElement per loop
    homomorphism_deviation: float


def holonomy_map(c: DifferentialCocycle, loops: Sequence[Path],
                 anchors: AnchorChoice,
                 cfg: SolverConfig | None = None) -> HolonomyResult:
    """Wilson lines of based loops, with a composition cross-check.

    All loops must start and end at the common basepoint.  Consecutive loop
    pairs are composed and transported once more; the largest deviation from
    the product of the individual values is reported alongside.
    """
    loops = list(loops)
    if not loops:
        return HolonomyResult((), 0.0)
    base = loops[0](0.0)
    for ell in loops:
        if not ell.is_loop() or np.linalg.norm(ell(0.0) - base) > 1e-10:
            raise BasepointMismatch("loops must be based at a common point")
    values = tuple(wilson_line(c, ell, anchors, cfg) for ell in loops)

    from .geometry import compose_paths

    dev = 0.0
    for k in range(len(loops) - 1):
        both = wilson_line(c, compose_paths(loops[k], loops[k + 1]), anchors, cfg)
        dev = max(dev, opnorm(both.mat - values[k + 1].mat @ values[k].mat))
    return HolonomyResult(values, dev)


def transport_vector(c: DifferentialCocycle, rep: Representation, gamma: Path,
                     v, anchors: AnchorChoice,
                     cfg: SolverConfig | None = None) -> np.ndarray:
    """Associated-bundle transport of a fibre vector along gamma."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (rep.dim,):
        raise DimensionMismatch(
            f"vector of length {v.shape} does not match dim {rep.dim}"
        )
    return rep.apply(wilson_line(c, gamma, anchors, cfg), v)


@dataclass(frozen=True)
class FlatSectionReport:
    max_deviation: float
    n_paths: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "n_paths": self.n_paths,
            "pass": self.passed,
        }


def check_flat_section(c: DifferentialCocycle, rep: Representation,
                       s: SectionSample, paths: Sequence[Path],
                       anchors: AnchorChoice, cfg: SolverConfig | None = None,
                       tol: float = 1e-6) -> FlatSectionReport:
    """Is the sampled section invariant under transport along the paths?"""
    worst = 0.0
    for gamma in paths:
        moved = transport_vector(c, rep, gamma, s.get(gamma(0.0)), anchors, cfg)
        worst = max(worst, float(np.linalg.norm(moved - s.get(gamma(1.0)))))
    return FlatSectionReport(worst, len(paths), worst <= tol)


@dataclass(frozen=True)
class SmallLoopResult:
    """Curvature estimate from a small rectangle holonomy.

    `value` is -log(W)/eps^2 conjugated back to the rectangle center;
    `corner_transport` is the adjoint factor used (transport from the center
    to the loop's corner), reported alongside because the raw holonomy lives
    at the corner.
    """

    value: AlgebraElement
    corner_transport: GroupElement
    eps: float


def small_loop_curvature(c: DifferentialCocycle, set_id: str, p, v, w,
                         eps: float, anchors: AnchorChoice | None = None,
                         cfg: SolverConfig | None = None) -> SmallLoopResult:
    """Estimate K(v, w) from the holonomy around a small chart rectangle.

    The rectangle is built in the chart of `set_id`, centered on p and
    spanned by eps*v and eps*w; its transport is computed inside that single
    set, so the anchor choice only fixes degenerate boundary jumps.  The
    leading term of -log(holonomy)/eps^2 is K(v, w) up to the adjoint action
    of the center-to-corner transport, which is applied before returning.
    Raises OutOfRadius if eps is too large for the matrix logarithm.
    """
    cset = c.cover.by_id(set_id)
    A = c.form(set_id)
    cfg = cfg or SolverConfig()
    p = np.asarray(p, dtype=float)
    u0 = cset.chart(p)
    vc = cset.to_chart_vector(p, v) * eps
    wc = cset.to_chart_vector(p, w) * eps

    corners = [
        u0 - 0.5 * (vc + wc),
        u0 + 0.5 * (vc - wc),
        u0 + 0.5 * (vc + wc),
        u0 - 0.5 * (vc - wc),
    ]

    def chart_segment(ua, ub) -> Path:
        def core(s):
            s = np.asarray(s, dtype=float)[..., None]
            return cset.chart_inverse(ua * (1.0 - s) + ub * s)

        return Path.from_core(core, cset.manifold)

    value = np.eye(c.spec.n, dtype=complex)
    for k in range(4):
        res = transport_local(A, chart_segment(corners[k], corners[(k + 1) % 4]), cfg)
        value = res.value.mat @ value
    hol = GroupElement(c.spec, value)

    # adjoint factor: transport from the center to the starting corner
    corner_tr = transport_local(A, chart_segment(u0, corners[0]), cfg).value
    raw = log_map(hol)
    tinv = corner_tr.inverse().mat
    centered = AlgebraElement(c.spec, tinv @ raw.mat @ corner_tr.mat)
    estimate = AlgebraElement(c.spec, -centered.mat / eps**2)
    return SmallLoopResult(estimate, corner_tr, eps)


def chern_number(c: DifferentialCocycle, cfg: SolverConfig | None = None,
                 n_theta: int = 200, n_phi: int = 400) -> float:
    """(1/2 pi i) times the integral of the curvature 2-form over the sphere.

    Requires a U(1) cocycle on the two-cap sphere cover.  The curvature is
    evaluated on a midpoint (theta, phi) product grid through the cap of
    highest clearance at each node; the integral is an integer exactly when
    the local forms glue into a genuine global connection.
    """
    if c.spec.kind != "U1":
        raise UnsupportedGroup("Chern integral implemented for U(1) only")
    if c.cover.manifold.kind != "SphereS2" or len(c.cover.sets) != 2:
        raise UnsupportedGroup("Chern integral needs the two-cap sphere cover")
    del cfg  # quadrature only; no transport solves involved

    dth = np.pi / n_theta
    dph = 2.0 * np.pi / n_phi
    th = (np.arange(n_theta) + 0.5) * dth
    ph = (np.arange(n_phi) + 0.5) * dph
    gt, gp = np.meshgrid(th, ph, indexing="ij")
    pts = sphere_point(gt.ravel(), gp.ravel())
    v = sphere_dtheta(pts)
    w = sphere_dphi(pts)

    clear = c.cover.clearances(pts)
    choice = np.argmax(clear, axis=0)
    kvals = np.zeros(len(pts), dtype=complex)
    for idx, cset in enumerate(c.cover.sets):
        mask = choice == idx
        if not np.any(mask):
            continue
        kv = curvature_batch(c.form(cset.id), cset, pts[mask], v[mask], w[mask])
        kvals[mask] = kv[:, 0, 0]

    cell = dth * dph
    total = complex(
        math.fsum(kvals.real) * cell, math.fsum(kvals.imag) * cell
    )
    return float((total / (2.0j * np.pi)).real)
