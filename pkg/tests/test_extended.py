import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from heyde.errors import CapacityError, DomainError
from heyde.extended import (RealExtGroup, SolenoidAutomorphism, SolenoidSpec, adic_truncation,
                            dual_elements, ha_contains, ha_quotient_order,
                            kernel_truncation_evidence, solenoid_condition1,
                            solenoid_has_2_torsion, solenoid_pairing, truncation_projection)
from heyde.groups import FiniteAbelianGroup, Homomorphism, is_automorphism, kernel

S23 = SolenoidSpec([2, 3], [2, 3])


def admissible(spec: SolenoidSpec, level_max: int = 4):
    """Strategy for rationals m / (a_0 ... a_L)."""
    return st.builds(lambda m, L: Fraction(m, spec.partial_product(L)),
                     st.integers(-500, 500), st.integers(0, level_max))


class TestRealExt:
    def test_dimension_bound(self):
        with pytest.raises(DomainError):
            RealExtGroup(3, FiniteAbelianGroup([2]))

    def test_fields(self):
        g = RealExtGroup(1, FiniteAbelianGroup([2]))
        assert g.real_dim == 1 and g.finite_part.order == 2


class TestHa:
    def test_membership_examples(self):
        assert ha_contains(S23, Fraction(5, 6))
        assert not ha_contains(S23, Fraction(1, 5))
        assert not ha_contains(SolenoidSpec([2], [3]), Fraction(1, 4))

    def test_infinite_primes_allow_any_power(self):
        assert ha_contains(S23, Fraction(1, 2**20 * 3**7))

    def test_finite_prime_multiplicity(self):
        spec = SolenoidSpec([5, 2], [2])
        assert ha_contains(spec, Fraction(1, 5))
        assert not ha_contains(spec, Fraction(1, 25))

    def test_non_prime_rejected(self):
        with pytest.raises(DomainError):
            SolenoidSpec([2], [4])

    @given(admissible(S23), admissible(S23))
    def test_group_closure(self, r1, r2):
        assert ha_contains(S23, r1 + r2)
        assert ha_contains(S23, r1 - r2)
        assert ha_contains(S23, -r1)

    @given(admissible(SolenoidSpec([5, 3, 7], [3])), st.sampled_from([(1, 3), (-2, 3), (3, 1), (1, -9)]))
    def test_automorphism_action_stays_admissible(self, r, pq):
        spec = SolenoidSpec([5, 3, 7], [3])
        p, q = pq
        alpha = SolenoidAutomorphism(p, q)
        if p == -2:
            with pytest.raises(DomainError):
                alpha.validate_for(spec)
            return
        alpha.validate_for(spec)
        assert alpha.act(r) == Fraction(p, q) * r
        assert ha_contains(spec, alpha.act(r))

    def test_pairing_examples(self):
        assert abs(solenoid_pairing(0.0, Fraction(3, 7)) - 1) < 1e-12
        assert abs(solenoid_pairing(1.0, Fraction(1, 2)) + 1) < 1e-12
        assert abs(solenoid_pairing(3.0, Fraction(1, 6)) + 1) < 1e-12

    def test_dual_elements(self):
        els = dual_elements(S23, 2, 1.0)
        # denominators a0 a1 a2 = 2 * 3 * 2 = 12, numerators -12..12
        assert len(els) == 25
        assert all(ha_contains(S23, e.value) for e in els)


class TestAutomorphisms:
    def test_coprime_required(self):
        with pytest.raises(DomainError):
            SolenoidAutomorphism(2, 4)

    def test_condition1_examples(self):
        assert not solenoid_condition1(S23, SolenoidAutomorphism(2, 3))
        assert solenoid_condition1(S23, SolenoidAutomorphism(1, 3))
        assert solenoid_condition1(S23, SolenoidAutomorphism(1, 1))
        assert not solenoid_condition1(SolenoidSpec([3], [3]), SolenoidAutomorphism(1, 1))

    def test_minus_one_rejected(self):
        with pytest.raises(DomainError):
            SolenoidAutomorphism(-1, 1).validate_for(S23)

    def test_two_torsion_examples(self):
        assert not solenoid_has_2_torsion(SolenoidSpec([], [2]))
        assert solenoid_has_2_torsion(SolenoidSpec([], [3]))
        assert not solenoid_has_2_torsion(SolenoidSpec([], [2, 5]))

    def test_quotient_order(self):
        assert ha_quotient_order(S23, 5) == 5
        assert ha_quotient_order(S23, 12) == 1
        assert ha_quotient_order(SolenoidSpec([], [3]), 6) == 2


class TestTruncations:
    def test_examples(self):
        spec = SolenoidSpec([2, 3, 4], [2])
        assert adic_truncation(spec, 2).moduli == (6,)
        assert adic_truncation(spec, 3).moduli == (24,)
        assert adic_truncation(spec, 0).order == 1

    def test_tail_cycles_infinite_primes(self):
        assert [S23.term(j) for j in range(6)] == [2, 3, 2, 3, 2, 3]
        with pytest.raises(CapacityError):
            SolenoidSpec([2, 3], []).term(5)

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_projection_is_surjective_homomorphism(self, level):
        f = truncation_projection(S23, level)
        assert f.image().order == f.target.order
        assert kernel(f).order == S23.term(level)

    def test_evidence_for_one_third(self):
        ev = kernel_truncation_evidence(S23, 4, range(1, 4))
        assert ev.divisible and ev.failing_levels == ()

    def test_evidence_for_two_thirds(self):
        ev = kernel_truncation_evidence(S23, 5, range(1, 4))
        assert not ev.divisible
        assert ev.failing_levels == (1, 2, 3)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 40), st.sampled_from([[2, 3], [3], [2, 5], [5]]))
    def test_condition_rule_matches_truncation_evidence(self, n, primes):
        spec = SolenoidSpec(primes, primes)
        try:
            ev = kernel_truncation_evidence(spec, n, range(1, 3))
        except CapacityError:
            assume(False)
        assert ev.divisible == (ha_quotient_order(spec, n) == 1)

    @pytest.mark.parametrize("level", [1, 2, 3])
    def test_scalar_kernel_on_truncation(self, level):
        # n = p + q = 4 for alpha = 1/3: f_4 is not injective on any single truncation,
        # the kernel order matches gcd(4, |truncation|)
        F = adic_truncation(S23, level)
        k = kernel(Homomorphism.scalar(F, 4)).order
        assert k == math.gcd(4, F.order)
        assert is_automorphism(Homomorphism.scalar(F, 5))


def test_dual_elements_are_sorted_floats():
    vals = np.array([float(e) for e in dual_elements(S23, 1, 0.5)])
    assert np.all(np.diff(vals) > 0)
