"""Descent data over a cover: cocycles, reconstruction, extraction.

A differential cocycle is a local connection form per cover set plus
transition functions g_ij on the overlaps obeying

    g_ik = g_jk g_ij            (triple condition, repeated indices allowed)
    A_j  = Ad_{g_ij}(A_i) - (dg_ij) g_ij^{-1}    (compatibility)

A morphism h: (g, A) -> (g', A') is a per-set gauge function with
A'_i = Ad_{h_i}(A_i) - (dh_i) h_i^{-1} and h_j g_ij = g'_ij h_i.

Global transport along a path is reconstructed by factoring the path into
in-set pieces joined by jumps and taking the ordered product

    g(jump_n) k_{A_n}(piece_n) ... k_{A_1}(piece_1) g(jump_0),

with anchor jumps at both ends fixing the trivialization in which the value
is reported.  Conversely, descent data is extracted from any transport
oracle by trivializing through the contraction paths of each set and
differentiating short transports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .connection import (
    GaugeFunction,
    LocalConnectionForm,
    gauge_transform,
    identity_gauge,
)
from .errors import CoverMismatch, JumpOutsideOverlap, NoCoveringSet
from .geometry import (
    CLEARANCE_MARGIN,
    Cover,
    CoverSet,
    Path,
    decompose_path,
)
from .groups import GroupElement, GroupSpec, repair_to_group
from .solver import (
    SolverConfig,
    TransportResult,
    chart_line_family,
    recover_form,
    transport_local,
)

_REJECTION_BUDGET = 100_000


@dataclass(frozen=True)
class AnchorChoice:
    """A chosen cover set per point; fixes the reporting trivialization."""

    cover: Cover
    select: Callable[[np.ndarray], str]

    def __call__(self, p) -> str:
        sid = self.select(np.asarray(p, dtype=float))
        cset = self.cover.by_id(sid)
        if float(cset.clearance(p)) <= 0.0:
            raise NoCoveringSet(f"anchor set {sid!r} does not contain the point")
        return sid

    @staticmethod
    def by_clearance(cover: Cover) -> "AnchorChoice":
        return AnchorChoice(cover, lambda p: cover.best_set(p).id)

    @staticmethod
    def fixed(cover: Cover, set_id: str) -> "AnchorChoice":
        cover.by_id(set_id)
        return AnchorChoice(cover, lambda p: set_id)


@dataclass(frozen=True)
class DifferentialCocycle:
    """Cover + per-set forms + transition functions."""

    cover: Cover
    spec: GroupSpec
    forms: Mapping[str, LocalConnectionForm]
    transitions: Mapping[tuple, GaugeFunction]

    def transition(self, i: str, j: str) -> GaugeFunction:
        if i == j:
            return self.transitions.get((i, j)) or identity_gauge(self.spec)
        try:
            return self.transitions[(i, j)]
        except KeyError:
            raise KeyError(f"no transition function for pair ({i!r}, {j!r})")

    def form(self, set_id: str) -> LocalConnectionForm:
        return self.forms[set_id]


def complete_transitions(spec: GroupSpec, pairs: Mapping[tuple, GaugeFunction],
                         ids) -> dict:
    """Fill inverses and identity transitions from a generating set."""
    out = dict(pairs)
    for (i, j), g in list(pairs.items()):
        out.setdefault((j, i), g.inverse())
    for i in ids:
        out.setdefault((i, i), identity_gauge(spec))
    return out


@dataclass(frozen=True)
class CocycleMorphism:
    """Per-set gauge functions h_i relating two cocycles over one cover."""

    h: Mapping[str, GaugeFunction]

    def component(self, set_id: str) -> GaugeFunction:
        return self.h[set_id]


def transform_cocycle(c: DifferentialCocycle,
                      m: CocycleMorphism) -> DifferentialCocycle:
    """The cocycle obtained by regauging each set: A'_i = Ad_{h_i}(A_i) - dh_i h_i^{-1},
    g'_ij = h_j g_ij h_i^{-1}.  By construction m is a morphism c -> c'."""
    forms = {
        sid: gauge_transform(c.form(sid), m.component(sid)) for sid in c.cover.ids
    }
    transitions = {}
    for i in c.cover.ids:
        for j in c.cover.ids:
            transitions[(i, j)] = (
                m.component(j) @ c.transition(i, j) @ m.component(i).inverse()
            )
    return DifferentialCocycle(c.cover, c.spec, forms, transitions)


@dataclass(frozen=True)
class FactoredPath:
    """Alternating jumps and in-set pieces; jumps[k] sits between pieces."""

    pieces: tuple  # ((set_id, Path), ...)
    jumps: tuple  # ((from_id, to_id, point), ...), len = len(pieces) + 1

    def __post_init__(self):
        if len(self.jumps) != len(self.pieces) + 1:
            raise ValueError("need one jump more than pieces")
        chain_tol = 1e-10
        for k, (_, piece) in enumerate(self.pieces):
            p_in = np.asarray(self.jumps[k][2], dtype=float)
            p_out = np.asarray(self.jumps[k + 1][2], dtype=float)
            if np.linalg.norm(piece.start - p_in) > chain_tol:
                raise ValueError(f"jump {k} does not chain into piece {k}")
            if np.linalg.norm(piece.end - p_out) > chain_tol:
                raise ValueError(f"piece {k} does not chain into jump {k + 1}")


# ---------------------------------------------------------------------------
# sampling


def sample_region(rng: np.random.Generator, sets: list, n: int,
                  margin: float = CLEARANCE_MARGIN):
    """Rejection-sample points lying in every given set with clearance > margin.

    Draws from the chart box of the first set.  Returns (points, exhausted)
    where exhausted means the budget ran out before n samples were found.
    """
    primary = sets[0]
    if primary.chart_box is None:
        raise ValueError(f"cover set {primary.id!r} has no chart box to sample")
    (x0, x1), (y0, y1) = primary.chart_box
    found = []
    drawn = 0
    chunk = max(4 * n, 256)
    while len(found) < n and drawn < _REJECTION_BUDGET:
        u = np.stack(
            [rng.uniform(x0, x1, size=chunk), rng.uniform(y0, y1, size=chunk)],
            axis=-1,
        )
        drawn += chunk
        p = primary.chart_inverse(u)
        ok = np.ones(chunk, dtype=bool)
        for s in sets:
            ok &= s.clearance(p) > margin
        found.extend(p[ok])
    pts = np.asarray(found[:n])
    return pts, len(found) < n


def _batch_opnorm(mats: np.ndarray) -> np.ndarray:
    return np.linalg.svd(mats, compute_uv=False)[..., 0]


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class CocycleReport:
    max_triple: float
    max_compat: float
    n_samples: int
    seed: int
    passed: bool
    empty_overlaps: tuple = ()

    def to_json(self) -> dict:
        return {
            "max_triple": self.max_triple,
            "max_compat": self.max_compat,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "pass": self.passed,
            "empty_overlaps": ["|".join(o) for o in self.empty_overlaps],
        }


def verify_cocycle(c: DifferentialCocycle, n_samples: int = 200,
                   seed: int = 0, triple_tol: float = 1e-8,
                   compat_tol: float = 1e-6) -> CocycleReport:
    """Sampled check of the triple condition and the compatibility law.

    Triples run over ordered index triples with repeats, so g_ii = 1 and
    g_ji = g_ij^{-1} are covered as special cases.  Deterministic given the
    seed; overlaps where rejection sampling fails are flagged, not fatal.
    """
    rng = np.random.default_rng(seed)
    ids = c.cover.ids
    empty = []
    max_triple = 0.0
    max_compat = 0.0

    for i in ids:
        for j in ids:
            for k in ids:
                sets = [c.cover.by_id(s) for s in dict.fromkeys((i, j, k))]
                pts, exhausted = sample_region(rng, sets, n_samples)
                if exhausted and len(pts) == 0:
                    empty.append((i, j, k))
                    continue
                gij = c.transition(i, j).eval(pts)
                gjk = c.transition(j, k).eval(pts)
                gik = c.transition(i, k).eval(pts)
                dev = _batch_opnorm(gik - gjk @ gij).max()
                max_triple = max(max_triple, float(dev))

    for i in ids:
        for j in ids:
            if i == j:
                continue
            si, sj = c.cover.by_id(i), c.cover.by_id(j)
            pts, exhausted = sample_region(rng, [si, sj], n_samples)
            if exhausted and len(pts) == 0:
                empty.append((i, j))
                continue
            transformed = gauge_transform(c.form(i), c.transition(i, j))
            frame = si.chart_frame(pts)  # (m, 2, d)
            for k in range(2):
                e = frame[:, k, :]
                resid = c.form(j).eval(pts, e) - transformed.eval(pts, e)
                max_compat = max(max_compat, float(_batch_opnorm(resid).max()))

    # empty overlaps are flagged but not fatal; the verdict depends on the maxima
    passed = max_triple <= triple_tol and max_compat <= compat_tol
    return CocycleReport(max_triple, max_compat, n_samples, seed, passed,
                         tuple(empty))


@dataclass(frozen=True)
class MorphismReport:
    max_form: float
    max_transition: float
    n_samples: int
    seed: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "max_form": self.max_form,
            "max_transition": self.max_transition,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "pass": self.passed,
        }


def verify_morphism(h: CocycleMorphism, c: DifferentialCocycle,
                    cprime: DifferentialCocycle, n_samples: int = 100,
                    seed: int = 0, form_tol: float = 1e-6,
                    transition_tol: float = 1e-8) -> MorphismReport:
    """Sampled check that h is a morphism from c to c'."""
    if c.cover.ids != cprime.cover.ids or c.spec != cprime.spec:
        raise CoverMismatch("morphism endpoints live over different covers")
    rng = np.random.default_rng(seed)
    ids = c.cover.ids
    max_form = 0.0
    max_tr = 0.0

    for i in ids:
        si = c.cover.by_id(i)
        pts, _ = sample_region(rng, [si], n_samples)
        transformed = gauge_transform(c.form(i), h.component(i))
        frame = si.chart_frame(pts)
        for k in range(2):
            e = frame[:, k, :]
            resid = cprime.form(i).eval(pts, e) - transformed.eval(pts, e)
            max_form = max(max_form, float(_batch_opnorm(resid).max()))

    for i in ids:
        for j in ids:
            if i == j:
                continue
            si, sj = c.cover.by_id(i), c.cover.by_id(j)
            pts, exhausted = sample_region(rng, [si, sj], n_samples)
            if exhausted and len(pts) == 0:
                continue
            lhs = h.component(j).eval(pts) @ c.transition(i, j).eval(pts)
            rhs = cprime.transition(i, j).eval(pts) @ h.component(i).eval(pts)
            max_tr = max(max_tr, float(_batch_opnorm(lhs - rhs).max()))

    passed = max_form <= form_tol and max_tr <= transition_tol
    return MorphismReport(max_form, max_tr, n_samples, seed, passed)


# ---------------------------------------------------------------------------
# factoring and reconstruction


def factor_path(gamma: Path, c: DifferentialCocycle,
                anchors: AnchorChoice) -> FactoredPath:
    """Decompose a path over the cover and attach anchor/interior jumps."""
    part = decompose_path(gamma, c.cover)
    pieces = []
    for k in range(part.n_pieces):
        t0, t1 = part.breakpoints[k], part.breakpoints[k + 1]
        pieces.append((part.set_ids[k], gamma.subpath(t0, t1)))

    jumps = [(anchors(gamma.start), part.set_ids[0], gamma.start)]
    for k in range(part.n_pieces - 1):
        point = gamma(part.breakpoints[k + 1])
        jumps.append((part.set_ids[k], part.set_ids[k + 1], point))
    jumps.append((part.set_ids[-1], anchors(gamma.end), gamma.end))
    return FactoredPath(tuple(pieces), tuple(jumps))


def _jump_value(c: DifferentialCocycle, jump) -> np.ndarray:
    i, j, point = jump
    point = np.asarray(point, dtype=float)
    if i == j:
        return np.eye(c.spec.n, dtype=complex)
    for sid in (i, j):
        if float(c.cover.by_id(sid).clearance(point)) <= 0.0:
            raise JumpOutsideOverlap(
                f"jump point not inside cover set {sid!r}"
            )
    return c.transition(i, j).eval(point[None, :])[0]


def reconstruct_transport(fp: FactoredPath, c: DifferentialCocycle,
                          cfg: SolverConfig | None = None) -> TransportResult:
    """Ordered product of transition jumps and in-set transports."""
    cfg = cfg or SolverConfig()
    value = _jump_value(c, fp.jumps[0])
    err = 0.0
    steps = 0
    for k, (sid, piece) in enumerate(fp.pieces):
        res = transport_local(c.form(sid), piece, cfg)
        value = res.value.mat @ value
        err += res.estimated_error
        steps += res.steps_used
        value = _jump_value(c, fp.jumps[k + 1]) @ value
    return TransportResult(repair_to_group(value, c.spec), err, steps)


def reconstruction_oracle(c: DifferentialCocycle, anchors: AnchorChoice,
                          cfg: SolverConfig | None = None):
    """Transport oracle Path -> GroupElement from a cocycle."""

    def F(gamma: Path) -> GroupElement:
        return reconstruct_transport(factor_path(gamma, c, anchors), c, cfg).value

    return F


# ---------------------------------------------------------------------------
# extraction


class TransportOracle:
    """Wraps a transport oracle with memoized contraction transports."""

    def __init__(self, func: Callable[[Path], GroupElement]):
        self.func = func
        self._memo: dict = {}

    def __call__(self, path: Path) -> GroupElement:
        return self.func(path)

    def contraction_transport(self, cset: CoverSet, p) -> GroupElement:
        p = np.asarray(p, dtype=float)
        key = (cset.id, np.round(p, 12).tobytes())
        hit = self._memo.get(key)
        if hit is None:
            hit = self.func(cset.contraction(p))
            self._memo[key] = hit
        return hit


def stencil_points(cset: CoverSet, n: int = 21,
                   margin: float = 5e-3) -> np.ndarray:
    """Deterministic n x n chart-grid sample of a cover set's interior."""
    if cset.chart_box is None:
        raise ValueError(f"cover set {cset.id!r} has no chart box")
    (x0, x1), (y0, y1) = cset.chart_box
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    u = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    p = cset.chart_inverse(u)
    return p[cset.clearance(p) > margin]


def _trivialized_oracle(F: TransportOracle, cset: CoverSet):
    """Transport conjugated into the constant fibre at the set basepoint."""

    def triv(gamma: Path) -> GroupElement:
        t_end = F.contraction_transport(cset, gamma.end)
        t_start = F.contraction_transport(cset, gamma.start)
        return t_end @ F(gamma) @ t_start.inverse()

    return triv


def extract_descent(F, cover: Cover, spec: GroupSpec,
                    cfg: SolverConfig | None = None,
                    fd_step: float = 1e-3) -> DifferentialCocycle:
    """Extract a differential cocycle from a transport oracle.

    Per set, the oracle is trivialized through the contraction paths; the
    local form evaluates on demand as the symmetric derivative of short
    trivialized transports, and a transition g_ij(x) compares the two
    trivializations at x.  The extracted data reproduces the oracle's
    transport and is unique up to a cocycle morphism (the contraction gauge).
    """
    if not isinstance(F, TransportOracle):
        F = TransportOracle(F)
    del cfg  # the oracle fixes its own accuracy

    forms = {}
    for cset in cover.sets:
        triv = _trivialized_oracle(F, cset)

        def ev(p, v, cset=cset, triv=triv):
            p2 = np.atleast_2d(np.asarray(p, dtype=float))
            v2 = np.atleast_2d(np.asarray(v, dtype=float))
            out = np.empty(p2.shape[:-1] + (spec.n, spec.n), dtype=complex)
            for r in range(p2.shape[0]):
                fam = chart_line_family(cset, p2[r], v2[r])
                out[r] = recover_form(triv, p2[r], v2[r], fam, spec,
                                      h=fd_step).mat
            if np.asarray(p, dtype=float).ndim == 1:
                return out[0]
            return out

        forms[cset.id] = LocalConnectionForm(cset.id, spec, ev, cset)

    transitions = {}
    for si in cover.sets:
        for sj in cover.sets:
            if si.id == sj.id:
                continue

            def ev(p, si=si, sj=sj):
                p2 = np.atleast_2d(np.asarray(p, dtype=float))
                out = np.empty(p2.shape[:-1] + (spec.n, spec.n), dtype=complex)
                for r in range(p2.shape[0]):
                    tj = F.contraction_transport(sj, p2[r])
                    ti = F.contraction_transport(si, p2[r])
                    out[r] = (tj @ ti.inverse()).mat
                if np.asarray(p, dtype=float).ndim == 1:
                    return out[0]
                return out

            transitions[(si.id, sj.id)] = GaugeFunction(spec, ev)

    transitions = complete_transitions(spec, transitions, cover.ids)
    return DifferentialCocycle(cover, spec, forms, transitions)


def extraction_morphism(F, c: DifferentialCocycle,
                        anchors: AnchorChoice) -> CocycleMorphism:
    """The canonical morphism from a source cocycle to its extraction.

    With F the reconstruction oracle of c under the given anchors, the
    component at x in set i is h_i(x) = F(r_i(x)) g_{a(x), i}(x)^{-1}: the
    anchor transition cancels F's boundary factor, leaving the smooth
    contraction transport that regauges A_i onto the extracted form.
    """
    if not isinstance(F, TransportOracle):
        F = TransportOracle(F)
    h = {}
    for cset in c.cover.sets:

        def ev(p, cset=cset):
            p2 = np.atleast_2d(np.asarray(p, dtype=float))
            out = np.empty(p2.shape[:-1] + (c.spec.n, c.spec.n), dtype=complex)
            for r in range(p2.shape[0]):
                tr = F.contraction_transport(cset, p2[r])
                a = anchors(p2[r])
                g_ai = c.transition(a, cset.id).eval(p2[r][None, :])[0]
                out[r] = tr.mat @ np.linalg.inv(g_ai)
            if np.asarray(p, dtype=float).ndim == 1:
                return out[0]
            return out

        h[cset.id] = GaugeFunction(c.spec, ev)
    return CocycleMorphism(h)
