import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import elements, groups, homomorphisms
from heyde.errors import CapacityError, DomainError, StructuralError
from heyde.groups import (FiniteAbelianGroup, Homomorphism, Subgroup, adjoint, annihilator,
                          check_adjoint, check_condition1, is_automorphism, kernel, multiples,
                          pairing, set_enumeration_bound, two_torsion)


def direct_pairing(moduli, x, y):
    return cmath.exp(2j * cmath.pi * sum(a * b / n for a, b, n in zip(x, y, moduli)))


class TestGroup:
    def test_order_and_dual(self):
        G = FiniteAbelianGroup([2, 3, 4])
        assert G.order == 24
        assert G.dual.moduli == G.moduli

    def test_trivial_group(self):
        G = FiniteAbelianGroup([])
        assert G.order == 1
        assert G.elements().shape == (1, 0)

    def test_rejects_small_moduli(self):
        with pytest.raises(DomainError):
            FiniteAbelianGroup([1, 3])

    def test_enumeration_bound(self):
        with pytest.raises(CapacityError):
            FiniteAbelianGroup([400, 400])
        old = set_enumeration_bound(200_000)
        try:
            assert FiniteAbelianGroup([400, 400]).order == 160_000
        finally:
            set_enumeration_bound(old)

    def test_index_roundtrip(self):
        G = FiniteAbelianGroup([3, 4])
        for i, x in enumerate(G.elements()):
            assert G.index(tuple(x)) == i


class TestPairing:
    def test_z4_generator(self):
        assert abs(pairing(FiniteAbelianGroup([4]), (1,), (1,)) - 1j) < 1e-12

    def test_zero_element(self):
        G = FiniteAbelianGroup([3, 5])
        for y in G.elements():
            assert abs(pairing(G, (0, 0), tuple(y)) - 1) < 1e-12

    def test_mixed_moduli(self):
        G = FiniteAbelianGroup([2, 3])
        assert abs(pairing(G, (1, 1), (1, 2)) - cmath.exp(2j * cmath.pi * 7 / 6)) < 1e-12

    @given(groups(max_order=36))
    def test_matrix_matches_formula(self, G):
        P = G.pairing_matrix()
        els = G.elements()
        for i in range(0, G.order, max(1, G.order // 6)):
            for j in range(G.order):
                assert abs(P[i, j] - direct_pairing(G.moduli, els[i], els[j])) < 1e-12

    @given(groups(max_order=36), st.data())
    def test_bicharacter(self, G, data):
        x, x2, y = (data.draw(elements(G)) for _ in range(3))
        lhs = pairing(G, G.add(x, x2), y)
        assert abs(lhs - pairing(G, x, y) * pairing(G, x2, y)) < 1e-12


class TestHomomorphism:
    def test_incompatible_matrix_rejected(self):
        with pytest.raises(StructuralError):
            Homomorphism(FiniteAbelianGroup([2]), FiniteAbelianGroup([3]), [[1]])

    def test_automorphism_examples(self):
        assert is_automorphism(Homomorphism(FiniteAbelianGroup([5]), matrix=[[2]]))
        assert is_automorphism(Homomorphism(FiniteAbelianGroup([2, 2]), matrix=[[0, 1], [1, 1]]))
        assert not is_automorphism(Homomorphism(FiniteAbelianGroup([4]), matrix=[[2]]))

    def test_adjoint_examples(self):
        G = FiniteAbelianGroup([2, 2])
        f = Homomorphism(G, matrix=[[1, 1], [0, 1]])
        assert adjoint(f).matrix == ((1, 0), (1, 1))
        assert adjoint(Homomorphism.scalar(G, 3)) == Homomorphism.scalar(G, 3)
        assert adjoint(Homomorphism.identity(G)) == Homomorphism.identity(G)

    def test_adjoint_between_different_groups(self):
        f = Homomorphism(FiniteAbelianGroup([2]), FiniteAbelianGroup([4]), [[2]])
        g = adjoint(f)
        assert g.source.moduli == (4,) and g.target.moduli == (2,)
        assert check_adjoint(f, g)

    def test_kernel_examples(self):
        Z5, Z6, V = FiniteAbelianGroup([5]), FiniteAbelianGroup([6]), FiniteAbelianGroup([2, 2])
        assert kernel(Homomorphism.scalar(Z5, 3)).is_trivial()
        assert kernel(Homomorphism.scalar(V, 2)) == Subgroup.whole(V)
        assert kernel(Homomorphism.scalar(Z6, 3)).elements == [(0,), (2,), (4,)]

    def test_condition1_examples(self):
        assert check_condition1(Homomorphism.scalar(FiniteAbelianGroup([5]), 2))
        V = FiniteAbelianGroup([2, 2])
        assert check_condition1(Homomorphism(V, matrix=[[0, 1], [1, 1]]))
        assert not check_condition1(Homomorphism.identity(V))

    def test_condition1_needs_automorphism(self):
        with pytest.raises(DomainError):
            check_condition1(Homomorphism.scalar(FiniteAbelianGroup([4]), 2))

    @settings(max_examples=60)
    @given(st.data())
    def test_adjoint_involution_and_pairing(self, data):
        G = data.draw(groups(max_order=64))
        f = data.draw(homomorphisms(G))
        g = adjoint(f)
        assert check_adjoint(f, g)
        assert adjoint(g) == f

    @settings(max_examples=60)
    @given(st.data())
    def test_adjoint_reverses_composition(self, data):
        G = data.draw(groups(max_order=64))
        f, g = data.draw(homomorphisms(G)), data.draw(homomorphisms(G))
        assert adjoint(f @ g) == adjoint(g) @ adjoint(f)

    @settings(max_examples=60)
    @given(st.data())
    def test_first_isomorphism_theorem(self, data):
        G = data.draw(groups(max_order=64))
        f = data.draw(homomorphisms(G))
        assert kernel(f).order * f.image().order == G.order

    @settings(max_examples=60)
    @given(st.data())
    def test_condition1_gives_automorphism(self, data):
        G = data.draw(groups(max_order=64))
        f = data.draw(homomorphisms(G))
        if is_automorphism(f) and check_condition1(f):
            assert is_automorphism(Homomorphism.identity(G) + f)


class TestSubgroups:
    def test_annihilator_examples(self):
        Z4 = FiniteAbelianGroup([4])
        H = Subgroup.from_elements(Z4, [(0,), (2,)])
        assert annihilator(Z4, H) == H
        G = FiniteAbelianGroup([2, 3])
        assert annihilator(G, Subgroup.trivial(G)) == Subgroup.whole(G)
        assert annihilator(G, Subgroup.whole(G)).is_trivial()

    def test_two_torsion_examples(self):
        assert two_torsion(FiniteAbelianGroup([2, 3])).elements == [(0, 0), (1, 0)]
        assert two_torsion(FiniteAbelianGroup([5])).is_trivial()
        got = set(two_torsion(FiniteAbelianGroup([4, 2])).elements)
        assert got == {(0, 0), (2, 0), (0, 1), (2, 1)}

    def test_non_subgroup_rejected(self):
        with pytest.raises(DomainError):
            Subgroup.from_elements(FiniteAbelianGroup([4]), [(0,), (1,)])

    def test_multiples(self):
        assert multiples(FiniteAbelianGroup([6]), 2).elements == [(0,), (2,), (4,)]

    @settings(max_examples=60)
    @given(st.data())
    def test_annihilator_duality(self, data):
        G = data.draw(groups(max_order=64))
        gens = data.draw(st.lists(elements(G), min_size=0, max_size=2))
        S = Subgroup.generated_by(G, gens)
        A = annihilator(G.dual, S)
        assert S.order * A.order == G.order
        assert annihilator(G, A) == S

    @given(groups(max_order=64))
    def test_annihilator_brute_force(self, G):
        S = two_torsion(G)
        P = G.pairing_matrix()
        brute = np.flatnonzero(np.all(np.abs(P[S.indices] - 1) < 1e-9, axis=0))
        assert np.array_equal(annihilator(G.dual, S).indices, brute)
