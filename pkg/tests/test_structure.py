import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import elements, groups
from heyde.checks import GridSpec
from heyde.distributions import (FiniteDist, dft, gauss_times_finite, quad_gauss,
                                 remark31_family, shift, symmetrize)
from heyde.errors import DomainError
from heyde.fuzz import eq2_passing_instance, random_automorphism, torsion_solution_pair
from heyde.groups import (FiniteAbelianGroup, Homomorphism, Subgroup, adjoint, multiples,
                          two_torsion)
from heyde.structure import (DualFunction, build_PQ, decompose, finite_difference,
                             gaussian_phi_check, is_polynomial, max_difference_residual,
                             proof_pipeline, psi_from, quadratic_solution_dimension,
                             real_psi, support_localize, verify_PQ_cubic)


def real_functions(G):
    return st.lists(st.floats(-5, 5), min_size=G.order, max_size=G.order).map(
        lambda v: DualFunction(G, np.asarray(v)))


class TestDifferences:
    def test_constant(self):
        f = DualFunction(FiniteAbelianGroup([4]), np.full(4, 2.5))
        assert np.all(finite_difference(f, (1,)).values == 0)

    def test_indicator_on_z3(self):
        f = DualFunction(FiniteAbelianGroup([3]), np.array([1.0, 0.0, 0.0]))
        assert np.array_equal(finite_difference(f, (1,)).values, [-1.0, 0.0, 1.0])

    @settings(max_examples=40)
    @given(st.data())
    def test_commute_and_linear(self, data):
        G = data.draw(groups(max_order=36))
        f, g = data.draw(real_functions(G)), data.draw(real_functions(G))
        h, k = data.draw(elements(G)), data.draw(elements(G))
        hk = finite_difference(finite_difference(f, h), k).values
        kh = finite_difference(finite_difference(f, k), h).values
        assert np.allclose(hk, kh)
        lin = finite_difference(2.0 * f + g, h).values
        assert np.allclose(lin, 2.0 * finite_difference(f, h).values + finite_difference(g, h).values)


class TestPolynomials:
    def test_constant_is_polynomial(self):
        assert is_polynomial(DualFunction(FiniteAbelianGroup([5]), np.ones(5)), 1)

    def test_character_real_part(self):
        Y = FiniteAbelianGroup([4])
        f = DualFunction(Y, np.cos(2 * np.pi * np.arange(4) / 4))
        assert not is_polynomial(f, 3)

    def test_degree_witness_positive(self):
        with pytest.raises(DomainError):
            is_polynomial(DualFunction(FiniteAbelianGroup([3]), np.ones(3)), 0)

    @settings(max_examples=60)
    @given(st.integers(2, 12), st.integers(1, 5), st.data())
    def test_only_constants(self, n, degree, data):
        Y = FiniteAbelianGroup([n])
        f = data.draw(real_functions(Y))
        assert is_polynomial(f, degree) == bool(np.ptp(f.values) <= 1e-9)


class TestPQ:
    def test_zero_psi(self):
        Y = FiniteAbelianGroup([5])
        z = DualFunction(Y, np.zeros(5))
        P, Q = build_PQ(z, z, Homomorphism.scalar(Y, 2))
        assert np.all(P.values == 0) and np.all(Q.values == 0)

    def test_degenerate_pair_on_z5(self):
        Y = FiniteAbelianGroup([5])
        e0 = FiniteDist.point_mass(Y)
        psi = psi_from(dft(e0))
        P, Q = build_PQ(psi, psi, Homomorphism.scalar(Y, 2))
        assert np.allclose(P.values, 0) and np.allclose(Q.values, 0)
        assert is_polynomial(P, 1) and verify_PQ_cubic(P, Q).holds

    def test_z3_squared(self):
        G = FiniteAbelianGroup([3, 3])
        alpha = Homomorphism(G, matrix=[[0, 1], [1, 1]])
        rng = np.random.default_rng(0)
        mu1, mu2 = torsion_solution_pair(rng, G, alpha, nonvanishing=True)
        rep = proof_pipeline(mu1, mu2, alpha)
        assert rep.pq.holds and all(rep.support_in_torsion)

    def test_psi_sign(self):
        mu = FiniteDist(FiniteAbelianGroup([4]), [0.7, 0.1, 0.1, 0.1])
        nu_hat = dft(mu) * dft(mu)
        assert psi_from(type(nu_hat)(nu_hat.dual, nu_hat.values.real)).values.min() >= 0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_pipeline_on_eq2_instances(self, seed):
        inst = eq2_passing_instance(np.random.default_rng(seed))
        rep = proof_pipeline(inst.mu1, inst.mu2, inst.alpha)
        assert rep.pq.p_residual < 1e-9 and rep.pq.q_residual < 1e-9
        assert max(rep.psi_zero_on_y2) < 1e-9

    def test_restricted_points(self):
        Y = FiniteAbelianGroup([6])
        f = DualFunction(Y, np.arange(6.0) ** 2)
        Y2 = multiples(Y, 2)
        assert max_difference_residual(f, 3, Y2, Y2) <= max_difference_residual(f, 3, Y2)


class TestSupport:
    def test_uniform_on_subgroup(self):
        Z4 = FiniteAbelianGroup([4])
        H = Subgroup.from_elements(Z4, [(0,), (2,)])
        assert support_localize(FiniteDist.uniform(Z4, H), H)

    def test_point_mass_outside(self):
        Z4 = FiniteAbelianGroup([4])
        H = Subgroup.from_elements(Z4, [(0,), (2,)])
        assert not support_localize(FiniteDist.point_mass(Z4, (1,)), H)

    def test_trivial_h(self):
        Z4 = FiniteAbelianGroup([4])
        mu = FiniteDist(Z4, [0.1, 0.2, 0.3, 0.4])
        assert support_localize(mu, Subgroup.trivial(Z4))


class TestQuadratic:
    def test_zero(self):
        assert gaussian_phi_check(DualFunction(FiniteAbelianGroup([7]), np.zeros(7)))

    def test_real_quadratic(self):
        assert gaussian_phi_check(lambda s: 0.8 * s * s)
        assert not gaussian_phi_check(lambda s: np.abs(s))

    @pytest.mark.parametrize("n", range(1, 13))
    def test_only_zero_on_cyclic(self, n):
        Y = FiniteAbelianGroup([n] if n > 1 else [])
        assert quadratic_solution_dimension(Y) == 0

    @settings(max_examples=40)
    @given(st.integers(2, 12), st.data())
    def test_positive_value_fails(self, n, data):
        Y = FiniteAbelianGroup([n])
        v = np.zeros(n)
        v[data.draw(st.integers(0, n - 1))] = data.draw(st.floats(0.01, 5))
        assert not gaussian_phi_check(DualFunction(Y, v))


class TestDecompose:
    def test_constructed_product(self):
        F = FiniteAbelianGroup([2])
        mu = gauss_times_finite(1.0, FiniteDist.uniform(F))
        d = decompose(mu)
        assert d.success and abs(d.sigma - 1.0) < 1e-9

    def test_z2_extension_fails_at_c(self):
        d = decompose(remark31_family(2.0, 1.0, 0.5))
        assert not d.success and d.failed_step == "c"

    def test_plane_counterexample_fails_with_cross_term(self):
        d = decompose(quad_gauss([[2, 1], [1, 1]]))
        assert not d.success and d.failed_step == "c"
        assert d.certificate["cross_term"] == pytest.approx(1.0, abs=1e-6)

    def test_diagonal_plane_succeeds(self):
        d = decompose(quad_gauss([[2, 0], [0, 0]]))
        assert d.success

    def test_finite_shift_recovered(self):
        F = FiniteAbelianGroup([2, 3])
        omega = FiniteDist(F, [0.3, 0, 0, 0.7, 0, 0])
        mu = gauss_times_finite(0.5, shift(omega, (0, 1)), t=0.4)
        d = decompose(mu)
        assert d.success and d.shift["g"][1] == 1
        assert d.b == pytest.approx(0.4, abs=1e-9)

    def test_mass_off_torsion_fails(self):
        F = FiniteAbelianGroup([3])
        mu = gauss_times_finite(0.5, FiniteDist(F, [0.5, 0.5, 0]))
        d = decompose(mu)
        assert not d.success and d.failed_step == "d"

    def test_finite_input(self):
        F = FiniteAbelianGroup([4])
        omega = FiniteDist.uniform(F, two_torsion(F))
        assert decompose(dft(shift(omega, (1,)))).success

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([(2,), (2, 2), (2, 3), (4,), (2, 4)]))
    def test_sound_and_complete(self, seed, moduli):
        rng = np.random.default_rng(seed)
        F = FiniteAbelianGroup(moduli)
        G = two_torsion(F)
        w = rng.dirichlet(np.ones(G.order))
        omega = shift(FiniteDist.on_subgroup(F, G, w),
                      tuple(int(c) for c in F.elements()[rng.integers(F.order)]))
        sigma, t = float(rng.uniform(0.1, 3)), float(rng.uniform(-1, 1))
        mu = gauss_times_finite(sigma, omega, t=t)
        d = decompose(mu)
        assert d.success and abs(d.sigma - sigma) < 1e-9
        s = GridSpec().axis()
        S, H = np.repeat(s, F.order), np.tile(np.arange(F.order), s.size)
        assert np.max(np.abs(d.synthesize(mu, S, H) - mu.evaluate(S, H))) < 1e-6

    def test_real_psi(self):
        psi = real_psi(gauss_times_finite(0.7, FiniteDist.uniform(FiniteAbelianGroup([2]))))
        s = np.linspace(-2, 2, 9)
        assert np.allclose(psi(s), 1.4 * s * s)
        assert gaussian_phi_check(psi)


def test_pipeline_alpha_uses_adjoint():
    G = FiniteAbelianGroup([2, 4])
    rng = np.random.default_rng(3)
    alpha = random_automorphism(rng, G)
    mu1, mu2 = torsion_solution_pair(rng, G, alpha, nonvanishing=True)
    psi1, psi2 = (psi_from(dft(symmetrize(m))) for m in (mu1, mu2))
    P, Q = build_PQ(psi1, psi2, adjoint(alpha))
    assert verify_PQ_cubic(P, Q).holds
