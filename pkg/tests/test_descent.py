"""Cocycle verification, path factoring, reconstruction and extraction."""

import numpy as np
import pytest

from holonomy.connection import GaugeFunction, identity_gauge
from holonomy.descent import (
    AnchorChoice,
    CocycleMorphism,
    DifferentialCocycle,
    FactoredPath,
    extract_descent,
    extraction_morphism,
    factor_path,
    reconstruct_transport,
    reconstruction_oracle,
    stencil_points,
    transform_cocycle,
    verify_cocycle,
    verify_morphism,
)
from holonomy.errors import CoverMismatch, JumpOutsideOverlap
from holonomy.geometry import (
    constant_path,
    equator_path,
    latitude_path,
    meridian_path,
    segment_path,
    sphere_point,
)
from holonomy.groups import GroupElement, GroupSpec, opnorm, project_to_algebra
from holonomy.scenes import load_scene
from holonomy.solver import SolverConfig

CFG = SolverConfig(tol=1e-10)
# extraction drives many short solves through the oracle; a looser target is
# still far below the 1e-4 round-trip tolerance
EXT_CFG = SolverConfig(base_steps=64, tol=1e-8)


def north_anchor(scene):
    return AnchorChoice.fixed(scene.cover, "north")


class TestVerifyCocycle:
    def test_one_set_trivial(self):
        from holonomy.connection import zero_form
        from holonomy.geometry import single_set_plane_cover

        cover = single_set_plane_cover()
        spec = GroupSpec.u1()
        c = DifferentialCocycle(
            cover, spec, {"all": zero_form(spec, "all", cover.by_id("all"))},
            {("all", "all"): identity_gauge(spec)},
        )
        rep = verify_cocycle(c, n_samples=50, seed=1)
        assert rep.passed
        assert rep.max_triple == 0.0
        assert rep.max_compat == 0.0

    def test_monopole_passes(self, monopole_k1):
        rep = verify_cocycle(monopole_k1.cocycle, n_samples=200, seed=42)
        assert rep.passed
        assert rep.max_triple < 1e-9
        assert rep.max_compat < 1e-9

    def test_monopole_k3_passes(self, monopole_k3):
        rep = verify_cocycle(monopole_k3.cocycle, n_samples=100, seed=42)
        assert rep.passed

    def test_corrupt_fails_by_half_dphi(self, monopole_corrupt):
        rep = verify_cocycle(monopole_corrupt.cocycle, n_samples=200, seed=42)
        assert not rep.passed
        assert rep.max_compat > 0.1
        assert rep.max_triple < 1e-9  # transitions themselves are consistent

    def test_deterministic_given_seed(self, monopole_k1):
        r1 = verify_cocycle(monopole_k1.cocycle, n_samples=60, seed=7)
        r2 = verify_cocycle(monopole_k1.cocycle, n_samples=60, seed=7)
        assert r1 == r2


def _global_u1_gauge():
    spec = GroupSpec.u1()

    def ev(p):
        p = np.asarray(p, dtype=float)
        return np.exp(0.7j * p[..., 2])[..., None, None]

    return GaugeFunction(spec, ev)


class TestVerifyMorphism:
    def test_identity_morphism(self, monopole_k1):
        c = monopole_k1.cocycle
        h = CocycleMorphism({sid: identity_gauge(c.spec) for sid in c.cover.ids})
        rep = verify_morphism(h, c, c, n_samples=60, seed=3)
        assert rep.passed
        assert rep.max_form < 1e-12
        assert rep.max_transition < 1e-12

    def test_gauge_transformed_cocycle(self, monopole_k1):
        c = monopole_k1.cocycle
        g = _global_u1_gauge()
        h = CocycleMorphism({sid: g for sid in c.cover.ids})
        cprime = transform_cocycle(c, h)
        rep = verify_morphism(h, c, cprime, n_samples=60, seed=5)
        assert rep.passed

    def test_identity_between_k1_k2_fails(self, monopole_k1, monopole_k2):
        c1, c2 = monopole_k1.cocycle, monopole_k2.cocycle
        h = CocycleMorphism({sid: identity_gauge(c1.spec) for sid in c1.cover.ids})
        # rebuild c2 over c1's cover object so only the data differs
        c2b = DifferentialCocycle(c1.cover, c1.spec, c2.forms, c2.transitions)
        rep = verify_morphism(h, c1, c2b, n_samples=60, seed=5)
        assert not rep.passed
        assert rep.max_form > 0.1

    def test_cover_mismatch(self, monopole_k1, su2_bench):
        h = CocycleMorphism({})
        with pytest.raises(CoverMismatch):
            verify_morphism(h, monopole_k1.cocycle, su2_bench.cocycle)


class TestFactorPath:
    def test_single_piece_trivial_jumps(self, monopole_k1):
        anchors = north_anchor(monopole_k1)
        gamma = latitude_path(np.pi / 6)
        fp = factor_path(gamma, monopole_k1.cocycle, anchors)
        assert len(fp.pieces) == 1
        assert fp.jumps[0][:2] == ("north", "north")
        assert fp.jumps[-1][:2] == ("north", "north")

    def test_meridian_jump_chain(self, monopole_k1):
        anchors = AnchorChoice.by_clearance(monopole_k1.cover)
        fp = factor_path(meridian_path(), monopole_k1.cocycle, anchors)
        assert [sid for sid, _ in fp.pieces] == ["north", "south"]
        assert fp.jumps[0][:2] == ("north", "north")
        assert fp.jumps[1][:2] == ("north", "south")
        assert fp.jumps[2][:2] == ("south", "south")

    def test_equator_anchored_north(self, monopole_k1):
        fp = factor_path(equator_path(), monopole_k1.cocycle,
                         north_anchor(monopole_k1))
        assert len(fp.pieces) == 1
        assert all(j[:2] == ("north", "north") for j in fp.jumps)


class TestReconstruct:
    def test_single_piece_equals_local(self, su2_bench):
        c = su2_bench.cocycle
        anchors = AnchorChoice.by_clearance(c.cover)
        gamma = segment_path([0.5, 0.5], [1.0, 0.9])  # inside "ne"
        fp = factor_path(gamma, c, anchors)
        assert len(fp.pieces) == 1
        from holonomy.solver import transport_local

        res = reconstruct_transport(fp, c, CFG)
        loc = transport_local(c.form(fp.pieces[0][0]), fp.pieces[0][1], CFG)
        assert opnorm(res.value.mat - loc.value.mat) < 1e-9

    def test_equator_minus_one(self, monopole_k1):
        fp = factor_path(equator_path(), monopole_k1.cocycle,
                         north_anchor(monopole_k1))
        res = reconstruct_transport(fp, monopole_k1.cocycle, CFG)
        assert abs(res.value.mat[0, 0] - (-1.0)) < 1e-6

    def test_forced_north_south_split_same_value(self, monopole_k1):
        c = monopole_k1.cocycle
        gamma = equator_path()
        mid = gamma(0.5)
        pieces = (("north", gamma.subpath(0.0, 0.5)),
                  ("south", gamma.subpath(0.5, 1.0)))
        jumps = (("north", "north", gamma.start),
                 ("north", "south", mid),
                 ("south", "north", gamma.end))
        fp = FactoredPath(pieces, jumps)
        res = reconstruct_transport(fp, c, CFG)
        assert abs(res.value.mat[0, 0] - (-1.0)) < 1e-6

    def test_refinement_independence(self, monopole_k1):
        c = monopole_k1.cocycle
        gamma = equator_path()
        base = reconstruct_transport(
            factor_path(gamma, c, north_anchor(monopole_k1)), c, CFG
        ).value.mat
        pieces = (("north", gamma.subpath(0.0, 0.37)),
                  ("north", gamma.subpath(0.37, 1.0)))
        jumps = (("north", "north", gamma.start),
                 ("north", "north", gamma(0.37)),
                 ("north", "north", gamma.end))
        refined = reconstruct_transport(FactoredPath(pieces, jumps), c, CFG).value.mat
        assert opnorm(refined - base) < 1e-9

    def test_reassignment_independence(self, monopole_k1):
        # the equator lies in both caps; assigning it to the south cap must
        # give the same anchored value through the transition factors
        c = monopole_k1.cocycle
        gamma = equator_path()
        base = reconstruct_transport(
            factor_path(gamma, c, north_anchor(monopole_k1)), c, CFG
        ).value.mat
        pieces = (("south", gamma),)
        jumps = (("north", "south", gamma.start), ("south", "north", gamma.end))
        other = reconstruct_transport(FactoredPath(pieces, jumps), c, CFG).value.mat
        assert opnorm(other - base) < 1e-8

    def test_back_and_forth_jump_independence(self, monopole_k1):
        c = monopole_k1.cocycle
        gamma = equator_path()
        base = reconstruct_transport(
            factor_path(gamma, c, north_anchor(monopole_k1)), c, CFG
        ).value.mat
        mid = gamma(0.5)
        pieces = (("north", gamma.subpath(0.0, 0.5)),
                  ("south", constant_path(mid, gamma.manifold)),
                  ("north", gamma.subpath(0.5, 1.0)))
        jumps = (("north", "north", gamma.start),
                 ("north", "south", mid),
                 ("south", "north", mid),
                 ("north", "north", gamma.end))
        res = reconstruct_transport(FactoredPath(pieces, jumps), c, CFG).value.mat
        assert opnorm(res - base) < 1e-8

    def test_anchor_covariance(self, monopole_k1):
        c = monopole_k1.cocycle
        gamma = equator_path()
        w_n = reconstruct_transport(
            factor_path(gamma, c, north_anchor(monopole_k1)), c, CFG
        ).value.mat
        anchors_s = AnchorChoice.fixed(c.cover, "south")
        w_s = reconstruct_transport(
            factor_path(gamma, c, anchors_s), c, CFG
        ).value.mat
        # changing the end anchor multiplies by g_{north->south}(end), the
        # start anchor by g_{south->north}(start)
        g_ns_end = c.transition("north", "south").eval(gamma.end[None, :])[0]
        g_sn_start = c.transition("south", "north").eval(gamma.start[None, :])[0]
        expected = g_ns_end @ w_n @ g_sn_start
        assert opnorm(w_s - expected) < 1e-8

    def test_jump_outside_overlap(self, monopole_k1):
        c = monopole_k1.cocycle
        p = sphere_point(0.1, 0.0)  # near the north pole, not in the south cap
        gamma = constant_path(p, c.cover.manifold)
        fp = FactoredPath((("north", gamma),),
                          (("north", "south", p), ("north", "north", p)))
        with pytest.raises(JumpOutsideOverlap):
            reconstruct_transport(fp, c, CFG)

    def test_morphism_transport_equality(self, monopole_k1):
        c = monopole_k1.cocycle
        g = _global_u1_gauge()
        h = CocycleMorphism({sid: g for sid in c.cover.ids})
        cprime = transform_cocycle(c, h)
        anchors = AnchorChoice.by_clearance(c.cover)
        rng = np.random.default_rng(31)
        paths = [latitude_path(1.2, phi0=0.4), meridian_path(0.7)]
        from holonomy.geometry import waypoint_path

        for _ in range(2):
            base = sphere_point(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * np.pi))
            pts = c.cover.manifold.project(
                base + 0.7 * rng.standard_normal((3, 3))
            )
            paths.append(waypoint_path(pts, c.cover.manifold))
        for gamma in paths:
            w = reconstruct_transport(factor_path(gamma, c, anchors), c, CFG).value.mat
            wp = reconstruct_transport(factor_path(gamma, cprime, anchors), cprime,
                                       CFG).value.mat
            hy = g.eval(gamma.end[None, :])[0]
            hx = g.eval(gamma.start[None, :])[0]
            assert opnorm(hy @ w - wp @ hx) < 1e-7


class TestExtract:
    def test_trivial_extraction_is_flat(self, trivial_scene):
        c = trivial_scene.cocycle
        anchors = AnchorChoice.by_clearance(c.cover)
        F = reconstruction_oracle(c, anchors, EXT_CFG)
        ext = extract_descent(F, c.cover, c.spec)
        for cset in c.cover.sets:
            pts = stencil_points(cset, n=5)
            frame = cset.chart_frame(pts)
            for k in range(2):
                vals = ext.form(cset.id).eval(pts, frame[:, k, :])
                assert np.abs(vals).max() < 1e-5
        from holonomy.descent import sample_region

        rng = np.random.default_rng(15)
        ov, _ = sample_region(rng, list(c.cover.sets), 2)
        tvals = ext.transition("north", "south").eval(ov)
        assert np.abs(tvals - np.eye(1)).max() < 1e-6

    def test_monopole_roundtrip_morphism_equivalent(self, monopole_k1):
        c = monopole_k1.cocycle
        anchors = AnchorChoice.by_clearance(c.cover)
        F = reconstruction_oracle(c, anchors, EXT_CFG)
        ext = extract_descent(F, c.cover, c.spec)
        rep = verify_cocycle(ext, n_samples=12, seed=9, compat_tol=1e-4)
        assert rep.passed, rep
        h = extraction_morphism(reconstruction_oracle(c, anchors, EXT_CFG), c, anchors)
        mrep = verify_morphism(h, c, ext, n_samples=10, seed=11,
                               form_tol=1e-4, transition_tol=1e-4)
        assert mrep.passed, mrep

    def test_noisy_oracle_fails_verification(self, monopole_k1):
        c = monopole_k1.cocycle
        anchors = AnchorChoice.by_clearance(c.cover)
        F = reconstruction_oracle(c, anchors, EXT_CFG)

        def noisy(path):
            # deterministic noise keyed on the endpoints: breaks smoothness
            key = np.round(np.concatenate([path.start, path.end]), 10).tobytes()
            rng = np.random.default_rng(abs(hash(key)) % (2**32))
            xi = project_to_algebra(
                1e-3 * (rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1))),
                c.spec,
            )
            from holonomy.groups import exp_map

            return F(path) @ exp_map(xi)

        ext = extract_descent(noisy, c.cover, c.spec)
        rep = verify_cocycle(ext, n_samples=8, seed=13, compat_tol=1e-4)
        assert not rep.passed
        assert rep.max_compat > 1e-2
