"""Group/algebra layer: exponential, logarithm, adjoint, Maurer-Cartan, repair."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holonomy import (
    AlgebraElement,
    GroupElement,
    GroupSpec,
    OutOfRadius,
    TooFarFromGroup,
    adjoint,
    commutator,
    exp_map,
    log_map,
    repair_to_group,
    right_maurer_cartan,
)
from holonomy.groups import (
    algebra_defect,
    group_defect,
    opnorm,
    random_algebra_element,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# generator of z-rotations in so(3): L_z e_x = e_y
LZ = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex)


def u1(z):
    return GroupElement(GroupSpec.u1(), np.array([[z]], dtype=complex))


def u1_alg(z):
    return AlgebraElement(GroupSpec.u1(), np.array([[z]], dtype=complex))


def rodrigues(axis, angle):
    """Independent oracle for SO(3) exponentials."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    kx, ky, kz = axis
    k = np.array([[0, -kz, ky], [kz, 0, -kx], [-ky, kx, 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


class TestExpMap:
    def test_u1_zero(self):
        g = exp_map(u1_alg(0.0))
        assert abs(g.mat[0, 0] - 1.0) == 0.0

    def test_u1_i_pi(self):
        g = exp_map(u1_alg(1j * np.pi))
        assert abs(g.mat[0, 0] - (-1.0)) < 1e-14

    def test_so3_quarter_turn_matches_rodrigues(self):
        x = AlgebraElement(GroupSpec.so3(), (np.pi / 2) * LZ)
        g = exp_map(x)
        expected = rodrigues([0, 0, 1], np.pi / 2)
        assert opnorm(g.mat - expected) < 1e-13
        # frozen value from the oracle
        assert np.allclose(
            g.mat.real, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-13
        )

    def test_result_satisfies_group_invariants(self):
        rng = np.random.default_rng(7)
        for spec in [GroupSpec.su2(), GroupSpec.so3(), GroupSpec.un(3)]:
            for _ in range(20):
                g = exp_map(random_algebra_element(spec, rng, scale=1.2))
                assert group_defect(g.mat, spec) <= 1e-8

    def test_gln_matches_scipy(self):
        import scipy.linalg

        rng = np.random.default_rng(3)
        spec = GroupSpec.gln(3)
        x = random_algebra_element(spec, rng, scale=0.8)
        g = exp_map(x)
        assert opnorm(g.mat - scipy.linalg.expm(x.mat)) < 1e-12


class TestLogMap:
    def test_identity(self):
        for spec in [GroupSpec.u1(), GroupSpec.su2(), GroupSpec.so3()]:
            x = log_map(GroupElement.identity(spec))
            assert x.norm() == 0.0

    def test_u1_scalar_log(self):
        x = log_map(u1(np.exp(0.3j)))
        assert abs(x.mat[0, 0] - 0.3j) < 1e-14

    def test_su2_round_trip_example(self):
        x = AlgebraElement(GroupSpec.su2(), 0.1j * SX)
        back = log_map(exp_map(x))
        assert opnorm(back.mat - x.mat) < 1e-12

    def test_out_of_radius(self):
        with pytest.raises(OutOfRadius):
            log_map(u1(-1.0))

    def test_round_trip_1000_random(self):
        rng = np.random.default_rng(42)
        specs = [GroupSpec.u1(), GroupSpec.su2(), GroupSpec.so3(), GroupSpec.un(2)]
        worst = 0.0
        for i in range(1000):
            spec = specs[i % len(specs)]
            x = random_algebra_element(spec, rng, scale=0.5 * rng.uniform(0.1, 1.0))
            back = log_map(exp_map(x))
            worst = max(worst, opnorm(back.mat - x.mat))
        assert worst <= 1e-10


class TestAdjoint:
    def test_identity_acts_trivially(self):
        spec = GroupSpec.su2()
        x = AlgebraElement(spec, 0.4j * SY)
        out = adjoint(GroupElement.identity(spec), x)
        assert opnorm(out.mat - x.mat) < 1e-15

    def test_u1_abelian(self):
        x = u1_alg(0.7j)
        out = adjoint(u1(np.exp(1.1j)), x)
        assert abs(out.mat[0, 0] - 0.7j) < 1e-15

    def test_su2_matches_brute_force_product(self):
        g = exp_map(AlgebraElement(GroupSpec.su2(), (np.pi / 4) * 1j * SZ))
        x = AlgebraElement(GroupSpec.su2(), 1j * SX)
        out = adjoint(g, x)
        brute = g.mat @ x.mat @ np.linalg.inv(g.mat)
        assert opnorm(out.mat - brute) < 1e-13

    def test_algebra_automorphism(self):
        rng = np.random.default_rng(11)
        spec = GroupSpec.su2()
        for _ in range(50):
            g = exp_map(random_algebra_element(spec, rng))
            x = random_algebra_element(spec, rng)
            y = random_algebra_element(spec, rng)
            lhs = adjoint(g, commutator(x, y))
            rhs = commutator(adjoint(g, x), adjoint(g, y))
            assert opnorm(lhs.mat - rhs.mat) <= 1e-10

    def test_composition_law(self):
        rng = np.random.default_rng(12)
        spec = GroupSpec.un(3)
        for _ in range(30):
            g = exp_map(random_algebra_element(spec, rng))
            h = exp_map(random_algebra_element(spec, rng))
            x = random_algebra_element(spec, rng)
            lhs = adjoint(g @ h, x)
            rhs = adjoint(g, adjoint(h, x))
            assert opnorm(lhs.mat - rhs.mat) <= 1e-10


class TestMaurerCartan:
    def test_constant_curve(self):
        spec = GroupSpec.su2()
        g = exp_map(random_algebra_element(spec, np.random.default_rng(0)))
        out = right_maurer_cartan(lambda t: g, 0.3, spec)
        assert out.norm() < 1e-12

    def test_u1_phase_rotation(self):
        spec = GroupSpec.u1()
        omega = 1.7
        curve = lambda t: np.array([[np.exp(1j * omega * t)]])
        out = right_maurer_cartan(curve, 0.2, spec)
        assert abs(out.mat[0, 0] - 1j * omega) < 1e-8

    def test_su2_one_parameter_subgroup(self):
        spec = GroupSpec.su2()
        x = AlgebraElement(spec, 0.9j * SY + 0.2j * SX)
        curve = lambda t: exp_map(t * x)
        out = right_maurer_cartan(curve, 0.5, spec)
        assert opnorm(out.mat - x.mat) < 1e-7

    def test_exact_derivative_bypasses_stencil(self):
        spec = GroupSpec.u1()
        omega = 2.5
        curve = lambda t: np.array([[np.exp(1j * omega * t)]])
        deriv = lambda t: np.array([[1j * omega * np.exp(1j * omega * t)]])
        out = right_maurer_cartan(curve, 0.1, spec, derivative=deriv)
        assert abs(out.mat[0, 0] - 1j * omega) < 1e-14


class TestRepair:
    def test_idempotent_on_group(self):
        rng = np.random.default_rng(5)
        for spec in [GroupSpec.u1(), GroupSpec.su2(), GroupSpec.so3()]:
            g = exp_map(random_algebra_element(spec, rng))
            again = repair_to_group(g.mat, spec)
            assert opnorm(again.mat - g.mat) <= 1e-14

    def test_u1_scalar_polar(self):
        out = repair_to_group(np.array([[1.001 * np.exp(0.2j)]]), GroupSpec.u1())
        assert abs(out.mat[0, 0] - np.exp(0.2j)) < 1e-12

    def test_su2_small_perturbation(self):
        rng = np.random.default_rng(9)
        spec = GroupSpec.su2()
        g = exp_map(random_algebra_element(spec, rng))
        noise = 1e-4 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        out = repair_to_group(g.mat + noise, spec)
        assert group_defect(out.mat, spec) <= 1e-10
        assert opnorm(out.mat - g.mat) < 2e-4

    def test_too_far_raises(self):
        with pytest.raises(TooFarFromGroup):
            repair_to_group(np.array([[2.0]]), GroupSpec.u1())

    def test_gln_left_untouched(self):
        m = np.array([[2.0, 1.0], [0.0, 0.5]], dtype=complex)
        out = repair_to_group(m, GroupSpec.gln(2))
        assert opnorm(out.mat - m) == 0.0

    def test_output_satisfies_invariants_exactly_as_stated(self):
        rng = np.random.default_rng(21)
        for spec in [GroupSpec.su2(), GroupSpec.so3(), GroupSpec.un(4)]:
            g = exp_map(random_algebra_element(spec, rng))
            noise = 5e-3 * rng.standard_normal((spec.n, spec.n))
            out = repair_to_group(g.mat + noise, spec)
            assert group_defect(out.mat, spec) <= 1e-8


@given(
    a=st.floats(-0.4, 0.4),
    b=st.floats(-0.4, 0.4),
    c=st.floats(-0.4, 0.4),
)
@settings(max_examples=50, deadline=None)
def test_su2_exp_log_round_trip_property(a, b, c):
    x = AlgebraElement(GroupSpec.su2(), 1j * (a * SX + b * SY + c * SZ))
    back = log_map(exp_map(x))
    assert opnorm(back.mat - x.mat) <= 1e-10


@given(theta=st.floats(-0.9, 0.9))
@settings(max_examples=50, deadline=None)
def test_u1_exp_is_phase(theta):
    g = exp_map(u1_alg(1j * theta))
    assert abs(abs(g.mat[0, 0]) - 1.0) < 1e-14
    assert abs(np.angle(g.mat[0, 0]) - theta) < 1e-12


def test_algebra_defect_flags_non_antihermitian():
    spec = GroupSpec.su2()
    assert algebra_defect(SX, spec) > 1.0  # Hermitian, not anti-Hermitian
    assert algebra_defect(1j * SX, spec) < 1e-15
