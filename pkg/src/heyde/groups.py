"""Finite abelian groups, their duals, homomorphisms and subgroups.

A finite abelian group is stored as a direct sum ``Z(n_1) + ... + Z(n_k)``.
The character group has the same moduli; a character ``y`` acts on ``x`` by

    (x, y) = exp(2 pi i sum_j x_j y_j / n_j).

Everything is computed by exhaustive enumeration, guarded by
``ENUMERATION_BOUND``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, StructuralError

ENUMERATION_BOUND = 10**5

# roots of unity are computed trigonometrically
CHARACTER_TOL = 1e-12


def set_enumeration_bound(bound: int) -> int:
    """Set the global enumeration bound and return the previous value."""
    global ENUMERATION_BOUND
    previous = ENUMERATION_BOUND
    ENUMERATION_BOUND = int(bound)
    return previous


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """The group ``Z(n_1) + ... + Z(n_k)``; the empty sum is the trivial group."""

    moduli: tuple[int, ...]

    def __init__(self, moduli: Iterable[int] = ()):
        moduli = tuple(int(n) for n in moduli)
        if any(n < 2 for n in moduli):
            raise DomainError(f"every modulus must be >= 2, got {moduli}")
        object.__setattr__(self, "moduli", moduli)
        if self.order > ENUMERATION_BOUND:
            raise CapacityError(
                f"group of order {self.order} exceeds enumeration bound {ENUMERATION_BOUND}"
            )

    def __repr__(self) -> str:
        if not self.moduli:
            return "FiniteAbelianGroup(trivial)"
        return "FiniteAbelianGroup(" + " x ".join(f"Z({n})" for n in self.moduli) + ")"

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def dual(self) -> "FiniteAbelianGroup":
        # self-dual representation
        return self

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    @cached_property
    def _moduli_array(self) -> np.ndarray:
        return np.array(self.moduli, dtype=np.int64)

    @cached_property
    def _elements(self) -> np.ndarray:
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.moduli, dtype=np.int64).reshape(self.rank, -1)
        arr = grids.T.copy()
        arr.setflags(write=False)
        return arr

    def elements(self) -> np.ndarray:
        """All elements as an ``(order, rank)`` array in C (row-major) order."""
        return self._elements

    def __iter__(self):
        for row in self._elements:
            yield tuple(int(c) for c in row)

    def __len__(self) -> int:
        return self.order

    def element(self, coords: Sequence[int]) -> tuple[int, ...]:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise StructuralError(f"element {coords} has wrong length for {self!r}")
        return tuple(c % n for c, n in zip(coords, self.moduli))

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        """Reduce integer coordinate rows coordinate-wise."""
        return np.mod(arr, self._moduli_array)

    def index(self, x) -> int:
        x = self.element(x)
        if self.rank == 0:
            return 0
        return int(np.ravel_multi_index(x, self.moduli))

    def indices(self, arr: np.ndarray) -> np.ndarray:
        """Indices of the rows of ``arr`` (reduced first)."""
        arr = self.reduce(np.asarray(arr, dtype=np.int64))
        if self.rank == 0:
            return np.zeros(arr.shape[:-1], dtype=np.int64)
        return np.ravel_multi_index(tuple(np.moveaxis(arr, -1, 0)), self.moduli)

    def add(self, x, y) -> tuple[int, ...]:
        return self.element(a + b for a, b in zip(self.element(x), self.element(y)))

    def neg(self, x) -> tuple[int, ...]:
        return self.element(-a for a in self.element(x))

    def scale(self, k: int, x) -> tuple[int, ...]:
        return self.element(k * a for a in self.element(x))

    @cached_property
    def addition_table(self) -> np.ndarray:
        """``table[i, j]`` is the index of ``elements[i] + elements[j]``."""
        e = self._elements
        return self.indices(e[:, None, :] + e[None, :, :])

    @cached_property
    def negation_table(self) -> np.ndarray:
        return self.indices(-self._elements)

    def scale_table(self, k: int) -> np.ndarray:
        return self.indices(k * self._elements)

    def element_order(self, x) -> int:
        x = self.element(x)
        result = 1
        for c, n in zip(x, self.moduli):
            result = math.lcm(result, n // math.gcd(c, n))
        return result

    def pairing_matrix(self) -> np.ndarray:
        """``P[i, j] = (x_i, y_j)`` for all elements and characters."""
        e = self._elements.astype(float)
        phase = (e / self._moduli_array) @ e.T if self.rank else np.zeros((1, 1))
        return np.exp(2j * np.pi * phase)


def pairing(group: FiniteAbelianGroup, x, y) -> complex:
    """Value of the character ``y`` at ``x``."""
    if len(tuple(x)) != group.rank or len(tuple(y)) != group.rank:
        raise StructuralError("pairing arguments do not match the group's moduli")
    x = group.element(x)
    y = group.element(y)
    phase = math.fsum(a * b / n for a, b, n in zip(x, y, group.moduli))
    return complex(np.exp(2j * np.pi * phase))


def _check_compatible(source: FiniteAbelianGroup, target: FiniteAbelianGroup, matrix: np.ndarray):
    if matrix.shape != (target.rank, source.rank):
        raise StructuralError(
            f"matrix shape {matrix.shape} does not map {source!r} to {target!r}"
        )
    for j, n in enumerate(source.moduli):
        for i, m in enumerate(target.moduli):
            if (n * int(matrix[i, j])) % m:
                raise StructuralError(
                    f"matrix column {j} is not well defined: {n}*{int(matrix[i, j])} "
                    f"is not divisible by {m}"
                )


@dataclass(frozen=True)
class Homomorphism:
    """``x -> M x`` reduced in the target; ``M`` has target rows and source columns."""

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    matrix: tuple[tuple[int, ...], ...] = field(repr=False)

    def __init__(self, source, target=None, matrix=None):
        target = source if target is None else target
        if matrix is None:
            raise DomainError("a matrix is required")
        arr = np.array(matrix, dtype=np.int64).reshape(target.rank, source.rank)
        _check_compatible(source, target, arr)
        # normalize entries so equal maps compare equal
        arr = np.mod(arr, np.array(target.moduli, dtype=np.int64)[:, None]) if target.rank else arr
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", tuple(tuple(int(v) for v in row) for row in arr))

    @classmethod
    def identity(cls, group: FiniteAbelianGroup) -> "Homomorphism":
        return cls(group, group, np.eye(group.rank, dtype=np.int64))

    @classmethod
    def scalar(cls, group: FiniteAbelianGroup, n: int) -> "Homomorphism":
        """The endomorphism ``f_n: x -> n x``."""
        return cls(group, group, n * np.eye(group.rank, dtype=np.int64))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.target.rank, self.source.rank)

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def __call__(self, x) -> tuple[int, ...]:
        x = np.array(self.source.element(x), dtype=np.int64)
        return self.target.element(self.array @ x)

    def apply(self, arr: np.ndarray) -> np.ndarray:
        """Apply to rows of coordinates, reducing in the target."""
        arr = np.asarray(arr, dtype=np.int64)
        return self.target.reduce(arr @ self.array.T)

    @cached_property
    def table(self) -> np.ndarray:
        """Index of the image of every source element."""
        return self.target.indices(self.apply(self.source.elements()))

    def __matmul__(self, other: "Homomorphism") -> "Homomorphism":
        """Composition ``self o other``."""
        if other.target != self.source:
            raise StructuralError("cannot compose: target/source mismatch")
        return Homomorphism(other.source, self.target, self.array @ other.array)

    def __add__(self, other: "Homomorphism") -> "Homomorphism":
        if (self.source, self.target) != (other.source, other.target):
            raise StructuralError("cannot add homomorphisms between different groups")
        return Homomorphism(self.source, self.target, self.array + other.array)

    def __neg__(self) -> "Homomorphism":
        return Homomorphism(self.source, self.target, -self.array)

    def __sub__(self, other: "Homomorphism") -> "Homomorphism":
        return self + (-other)

    def image(self) -> "Subgroup":
        return Subgroup(self.target, np.unique(self.table))


def is_automorphism(f: Homomorphism) -> bool:
    """Whether ``f`` is a bijective endomorphism (checked by enumeration)."""
    if not f.is_endomorphism:
        raise StructuralError("automorphism test needs source == target")
    return len(np.unique(f.table)) == f.source.order


def adjoint(f: Homomorphism) -> Homomorphism:
    """The dual map ``g`` with ``(f x, y) = (x, g y)``.

    For ``f: Z(n_j) -> Z(m_i)`` the adjoint matrix is ``G[j, i] = M[i, j] n_j / m_i``,
    an integer by well-definedness of ``f``.
    """
    src, tgt = f.source.moduli, f.target.moduli
    m = f.array
    g = np.zeros((len(src), len(tgt)), dtype=np.int64)
    for i, mi in enumerate(tgt):
        for j, nj in enumerate(src):
            g[j, i] = int(m[i, j]) * nj // mi
    return Homomorphism(f.target.dual, f.source.dual, g)


def check_adjoint(f: Homomorphism, g: Homomorphism) -> bool:
    """Exhaustively test ``(f x, y) == (x, g y)``."""
    px = f.target.pairing_matrix()  # (f x, y): rows x in target
    ps = f.source.pairing_matrix()
    lhs = px[f.table, :]  # rows: source x, cols: target-dual y
    rhs = ps[:, g.table]
    return bool(np.max(np.abs(lhs - rhs), initial=0.0) < CHARACTER_TOL * 10)


class Subgroup:
    """A subgroup given by its explicit, sorted element set (stored as indices)."""

    def __init__(self, parent: FiniteAbelianGroup, indices: Iterable[int], *, check: bool = True):
        self.parent = parent
        idx = np.unique(np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                                   dtype=np.int64))
        idx.setflags(write=False)
        self._indices = idx
        self._members = frozenset(int(i) for i in idx)
        if check:
            self._validate()

    @classmethod
    def from_elements(cls, parent: FiniteAbelianGroup, elements: Iterable[Sequence[int]]) -> "Subgroup":
        return cls(parent, [parent.index(x) for x in elements])

    @classmethod
    def generated_by(cls, parent: FiniteAbelianGroup, generators: Iterable[Sequence[int]]) -> "Subgroup":
        members = {parent.index(parent.zero)}
        frontier = list(members)
        gens = [parent.index(g) for g in generators]
        table = parent.addition_table
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = int(table[a, g])
                    if b not in members:
                        members.add(b)
                        nxt.append(b)
            frontier = nxt
        return cls(parent, sorted(members), check=False)

    @classmethod
    def whole(cls, parent: FiniteAbelianGroup) -> "Subgroup":
        return cls(parent, range(parent.order), check=False)

    @classmethod
    def trivial(cls, parent: FiniteAbelianGroup) -> "Subgroup":
        return cls(parent, [0], check=False)

    def _validate(self):
        zero = self.parent.index(self.parent.zero)
        if zero not in self._members:
            raise DomainError("subgroup must contain zero")
        idx = self._indices
        sums = self.parent.addition_table[np.ix_(idx, idx)]
        if not np.isin(sums, idx).all() or not np.isin(self.parent.negation_table[idx], idx).all():
            raise DomainError("element set is not closed under addition and negation")

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def elements(self) -> list[tuple[int, ...]]:
        els = self.parent.elements()[self._indices]
        return [tuple(int(c) for c in row) for row in els]

    @property
    def order(self) -> int:
        return len(self._indices)

    def __len__(self) -> int:
        return self.order

    def __contains__(self, x) -> bool:
        return self.parent.index(x) in self._members

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.parent == other.parent
            and self._members == other._members
        )

    def __hash__(self):
        return hash((self.parent, self._members))

    def is_trivial(self) -> bool:
        return self.order == 1

    def __repr__(self) -> str:
        return f"Subgroup({self.elements!r})"


def kernel(f: Homomorphism) -> Subgroup:
    """``{x : f x = 0}``."""
    zero = f.target.index(f.target.zero)
    return Subgroup(f.source, np.flatnonzero(f.table == zero), check=False)


def check_condition1(alpha: Homomorphism) -> bool:
    """Whether ``Ker(I + alpha)`` is trivial."""
    if not alpha.is_endomorphism or not is_automorphism(alpha):
        raise DomainError("condition (Ker(I+alpha) = 0) is defined for automorphisms only")
    return kernel(Homomorphism.identity(alpha.source) + alpha).is_trivial()


def annihilator(dual: FiniteAbelianGroup, subgroup: Subgroup) -> Subgroup:
    """Characters of ``dual`` that are 1 on every element of ``subgroup``.

    The pairing is symmetric in this representation, so the same call works
    with the roles of group and dual swapped.
    """
    if dual.moduli != subgroup.parent.moduli:
        raise StructuralError("subgroup does not live in the group paired with this dual")
    moduli = np.array(dual.moduli, dtype=np.int64)
    els = dual.elements()
    s = subgroup.parent.elements()[subgroup.indices]
    if dual.rank == 0:
        return Subgroup.whole(dual)
    # exact test: sum_j x_j y_j (L / n_j) == 0 mod L
    lcm = math.lcm(*dual.moduli)
    weights = lcm // moduli
    vals = ((s * weights) @ els.T) % lcm
    ok = np.all(vals == 0, axis=0)
    return Subgroup(dual, np.flatnonzero(ok), check=False)


def two_torsion(group: FiniteAbelianGroup) -> Subgroup:
    """``{x : 2x = 0}``."""
    return kernel(Homomorphism.scalar(group, 2))


def multiples(group: FiniteAbelianGroup, n: int) -> Subgroup:
    """The image ``f_n(group)`` (written ``group^(n)``)."""
    return Homomorphism.scalar(group, n).image()
