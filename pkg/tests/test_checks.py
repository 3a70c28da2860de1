import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dists, groups
from heyde.checks import (GridSpec, RealExtAutomorphism, conditional_symmetry_exact,
                          conditional_symmetry_mc, eq2_exact, eq2_grid, eq5_check, joint_law)
from heyde.distributions import (FiniteDist, SolenoidGaussCharFn,
                                 VanishingCharacteristicFunction, dft, quad_gauss, real_gaussian,
                                 reflect, remark31_family)
from heyde.errors import StructuralError
from heyde.extended import SolenoidAutomorphism, SolenoidSpec
from heyde.fuzz import CATEGORIES, random_automorphism, random_instance
from heyde.groups import FiniteAbelianGroup, Homomorphism, adjoint

Z5 = FiniteAbelianGroup([5])
V4 = FiniteAbelianGroup([2, 2])


def finite_pair(mu1, mu2, alpha):
    return dft(mu1), dft(mu2), adjoint(alpha)


def joint_oracle(mu1, mu2, alpha):
    """Joint law of (x1 + x2, x1 + alpha x2) by a plain double loop."""
    G = mu1.group
    els = [tuple(int(c) for c in x) for x in G.elements()]
    out = np.zeros((G.order, G.order))
    for i, x1 in enumerate(els):
        for j, x2 in enumerate(els):
            a = G.index(G.add(x1, x2))
            b = G.index(G.add(x1, alpha(x2)))
            out[a, b] += mu1.probs[i] * mu2.probs[j]
    return out


class TestExact:
    def test_point_masses(self):
        G = FiniteAbelianGroup([3, 4])
        alpha = Homomorphism(G, matrix=[[2, 0], [0, 3]])
        e0 = FiniteDist.point_mass(G)
        r = eq2_exact(*finite_pair(e0, e0, alpha))
        assert r.holds and r.max_residual == 0 and r.witness is None
        assert conditional_symmetry_exact(e0, e0, alpha)

    def test_z5_nonuniform_pair_fails(self):
        mu = FiniteDist(Z5, [0.4, 0.15, 0.15, 0.15, 0.15])
        alpha = Homomorphism.scalar(Z5, 2)
        r = eq2_exact(*finite_pair(mu, mu, alpha))
        assert not r.holds and r.witness is not None
        assert not conditional_symmetry_exact(mu, mu, alpha)
        # eq5 is only recorded here, no implication either way
        assert eq5_check(*finite_pair(mu, mu, alpha)).max_residual >= 0

    def test_klein_pair_holds(self):
        alpha = Homomorphism(V4, matrix=[[0, 1], [1, 1]])
        mu = FiniteDist(V4, [0.5, 0, 0, 0.5])
        assert eq2_exact(*finite_pair(mu, mu, alpha)).holds
        assert conditional_symmetry_exact(mu, mu, alpha)

    def test_condition_one_not_required(self):
        Z3 = FiniteAbelianGroup([3])
        alpha = Homomorphism.scalar(Z3, 2)
        u = FiniteDist.uniform(Z3)
        assert eq2_exact(*finite_pair(u, u, alpha)).holds == conditional_symmetry_exact(u, u, alpha)

    def test_witness_violates(self):
        mu = FiniteDist(Z5, [0.4, 0.15, 0.15, 0.15, 0.15])
        c1, c2, at = finite_pair(mu, mu, Homomorphism.scalar(Z5, 2))
        u, v = eq2_exact(c1, c2, at).witness
        Y = c1.dual
        lhs = c1(Y.add(u, v)) * c2(Y.add(u, at(v)))
        rhs = c1(Y.add(u, Y.neg(v))) * c2(Y.add(u, Y.neg(at(v))))
        assert abs(lhs - rhs) > 1e-9

    @settings(max_examples=30)
    @given(st.data())
    def test_joint_law_matches_oracle(self, data):
        G = data.draw(groups(max_order=24))
        rng = np.random.default_rng(data.draw(st.integers(0, 10**6)))
        alpha = random_automorphism(rng, G)
        mu1, mu2 = data.draw(dists(G)), data.draw(dists(G))
        assert np.allclose(joint_law(mu1, mu2, alpha), joint_oracle(mu1, mu2, alpha), atol=1e-15)

    @settings(max_examples=40)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(CATEGORIES))
    def test_equivalence_with_conditional_symmetry(self, seed, category):
        inst = random_instance(np.random.default_rng(seed), 64, category)
        c1, c2, at = finite_pair(inst.mu1, inst.mu2, inst.alpha)
        e2 = eq2_exact(c1, c2, at).holds
        assert e2 == conditional_symmetry_exact(inst.mu1, inst.mu2, inst.alpha)
        if e2:
            assert eq5_check(c1, c2, at).holds

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_residual_invariant_under_reflection(self, seed):
        inst = random_instance(np.random.default_rng(seed), 32, "random")
        c1, c2, at = finite_pair(inst.mu1, inst.mu2, inst.alpha)
        r = eq2_exact(c1, c2, at)
        # conjugating both transforms conjugates both sides of the identity
        c1r, c2r = dft(reflect(inst.mu1)), dft(reflect(inst.mu2))
        assert eq2_exact(c1r, c2r, at).max_residual == pytest.approx(r.max_residual, abs=1e-13)

    def test_vanishing_input_warns(self):
        u = FiniteDist.uniform(Z5)
        with pytest.warns(VanishingCharacteristicFunction):
            eq2_exact(*finite_pair(u, u, Homomorphism.scalar(Z5, 2)))


class TestGrid:
    def test_plane_counterexample(self):
        A1, A2 = [[4, 2], [2, 2]], [[2, 1], [1, 1]]
        alpha = RealExtAutomorphism(-2 * np.eye(2), Homomorphism.identity(FiniteAbelianGroup([])))
        start = time.perf_counter()
        r = eq2_grid(quad_gauss(A1), quad_gauss(A2), alpha)
        assert r.holds and r.max_residual < 1e-9
        assert time.perf_counter() - start < 5

    def test_z2_extension_family(self):
        alpha = RealExtAutomorphism.scalar(-2.0, Homomorphism.identity(FiniteAbelianGroup([2])))
        assert not alpha.condition1()
        mu1, mu2 = remark31_family(2, 1, 0.5), remark31_family(1, 0.5, 0.5)
        assert eq2_grid(mu1, mu2, alpha).holds
        bad = eq2_grid(remark31_family(2, 1.1, 0.5), mu2, alpha)
        assert not bad.holds and bad.witness is not None

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 3), st.floats(-2, 2), st.floats(-3, -0.2), st.booleans(), st.booleans())
    def test_real_line_closed_form(self, sigma2, b2, a, break_sigma, break_b):
        sigma1 = -a * sigma2 + (0.3 if break_sigma else 0.0)
        b1 = -a * b2 + (0.4 if break_b else 0.0)
        alpha = RealExtAutomorphism.scalar(a, Homomorphism.identity(FiniteAbelianGroup([])))
        r = eq2_grid(real_gaussian(sigma1, b1), real_gaussian(sigma2, b2), alpha)
        assert r.holds == (not break_sigma and not break_b)

    def test_eq5_on_grid(self):
        alpha = RealExtAutomorphism.scalar(-2.0, Homomorphism.identity(FiniteAbelianGroup([2])))
        mu1, mu2 = remark31_family(2, 1, 0.5), remark31_family(1, 0.5, 0.5)
        assert eq5_check(mu1, mu2, alpha, GridSpec()).holds

    def test_rejects_mismatched_groups(self):
        alpha = RealExtAutomorphism.scalar(-2.0, Homomorphism.identity(FiniteAbelianGroup([2])))
        with pytest.raises(StructuralError):
            eq2_grid(real_gaussian(1.0), real_gaussian(1.0), alpha)


class TestSolenoid:
    spec = SolenoidSpec([2, 3], [2, 3])

    def test_one_third_degenerate_pair(self):
        alpha = SolenoidAutomorphism(1, 3)
        r = eq2_grid(SolenoidGaussCharFn(-1.0, 0.0), SolenoidGaussCharFn(3.0, 0.0), alpha,
                     GridSpec(solenoid_level=3), spec=self.spec)
        assert r.holds and r.max_residual < 1e-9

    def test_one_third_wrong_shift(self):
        r = eq2_grid(SolenoidGaussCharFn(-1.0, 0.0), SolenoidGaussCharFn(2.0, 0.0),
                     SolenoidAutomorphism(1, 3), GridSpec(), spec=self.spec)
        assert not r.holds

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.05, 1.0), st.floats(-1, 1))
    def test_minus_two_thirds(self, sigma2, t2):
        alpha = SolenoidAutomorphism(-2, 3)
        c1 = SolenoidGaussCharFn(2 * t2 / 3, 2 * sigma2 / 3)
        c2 = SolenoidGaussCharFn(t2, sigma2)
        assert eq2_grid(c1, c2, alpha, GridSpec(solenoid_level=2), spec=self.spec).holds


class TestMonteCarlo:
    def test_degenerate_pair(self):
        e0 = FiniteDist.point_mass(FiniteAbelianGroup([3]))
        r = conditional_symmetry_mc(e0, e0, Homomorphism.identity(e0.group), n=1000, seed=1)
        assert r.consistent

    def test_finite_pair_detects_asymmetry(self):
        mu = FiniteDist(Z5, [0.4, 0.15, 0.15, 0.15, 0.15])
        alpha = Homomorphism.scalar(Z5, 2)
        r = conditional_symmetry_mc(mu, mu, alpha, n=200_000, seed=3)
        assert not r.consistent and r.decision == "symmetry refuted"

    def test_reproducible(self):
        alpha = RealExtAutomorphism.scalar(-2.0, Homomorphism.identity(FiniteAbelianGroup([2])))
        mu1, mu2 = remark31_family(2, 1, 0.5), remark31_family(1, 0.5, 0.5)
        a = conditional_symmetry_mc(mu1, mu2, alpha, n=20_000, seed=5, workers=2)
        b = conditional_symmetry_mc(mu1, mu2, alpha, n=20_000, seed=5, workers=2)
        assert a.p_value == b.p_value and a.statistic == b.statistic
