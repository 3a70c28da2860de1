"""Groups beyond the finite ones: R^d x F, the solenoid dual H_a, and Delta_a truncations.

The infinite sequence ``a = (a_0, a_1, ...)`` is represented by a finite prefix
plus the set of primes that occur infinitely often.  Beyond the prefix the
sequence is taken to cycle through those primes in increasing order; only the
prime content of the tail matters for everything computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from sympy import factorint, isprime

from .errors import CapacityError, DomainError
from .groups import FiniteAbelianGroup, Homomorphism, kernel


@dataclass(frozen=True)
class RealExtGroup:
    """``R^d x F`` with ``d`` in {0, 1, 2} and ``F`` finite."""

    real_dim: int
    finite_part: FiniteAbelianGroup

    def __post_init__(self):
        if self.real_dim not in (0, 1, 2):
            raise DomainError(f"real dimension must be 0, 1 or 2, got {self.real_dim}")


def prime_set(n: int) -> set[int]:
    return set(factorint(abs(int(n)))) if abs(int(n)) > 1 else set()


@dataclass(frozen=True)
class SolenoidSpec:
    prefix: tuple[int, ...]
    infinite_primes: frozenset[int]

    def __init__(self, prefix: Iterable[int] = (), infinite_primes: Iterable[int] = ()):
        prefix = tuple(int(a) for a in prefix)
        primes = frozenset(int(p) for p in infinite_primes)
        if any(a <= 1 for a in prefix):
            raise DomainError(f"sequence entries must exceed 1, got {prefix}")
        if any(not isprime(p) for p in primes):
            raise DomainError(f"infinite_primes must be primes, got {sorted(primes)}")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "infinite_primes", primes)

    def term(self, j: int) -> int:
        """``a_j`` of the extended sequence."""
        if j < len(self.prefix):
            return self.prefix[j]
        if not self.infinite_primes:
            raise CapacityError(
                f"term a_{j} lies beyond the prefix and no prime occurs infinitely often"
            )
        cycle = sorted(self.infinite_primes)
        return cycle[(j - len(self.prefix)) % len(cycle)]

    def partial_product(self, n: int) -> int:
        """``a_0 a_1 ... a_{n-1}`` (1 for ``n = 0``)."""
        return math.prod(self.term(j) for j in range(n))

    def _split(self, d: int) -> tuple[int, int]:
        """Split ``d`` into (part over infinite primes, remaining part)."""
        inf_part = 1
        rest = abs(d)
        for p in self.infinite_primes:
            while rest % p == 0:
                rest //= p
                inf_part *= p
        return inf_part, rest


def _fraction(r) -> Fraction:
    if isinstance(r, SolenoidDualElement):
        return r.value
    return Fraction(r)


def ha_contains(spec: SolenoidSpec, r) -> bool:
    """Whether the rational ``r`` lies in ``H_a``.

    The denominator must divide some ``a_0 ... a_n``: its part coprime to the
    infinitely-occurring primes has to divide the prefix product.
    """
    d = _fraction(r).denominator
    _, rest = spec._split(d)
    return math.prod(spec.prefix) % rest == 0


def _witness_level(spec: SolenoidSpec, d: int) -> int:
    n, prod = 0, spec.term(0) if (spec.prefix or spec.infinite_primes) else None
    if prod is None:
        raise DomainError("empty sequence")
    while prod % d:
        n += 1
        prod *= spec.term(n)
    return n


@dataclass(frozen=True)
class SolenoidDualElement:
    """An element ``m / (a_0 ... a_n)`` of ``H_a``; ``level`` is the least such ``n``."""

    value: Fraction
    level: int

    @classmethod
    def make(cls, spec: SolenoidSpec, r) -> "SolenoidDualElement":
        r = _fraction(r)
        if not ha_contains(spec, r):
            raise DomainError(f"{r} does not belong to H_a")
        return cls(r, _witness_level(spec, r.denominator))

    @property
    def numerator(self) -> int:
        return self.value.numerator

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class SolenoidAutomorphism:
    """The automorphism ``f_p f_q^{-1}``, acting on ``H_a`` as multiplication by ``p/q``."""

    p: int
    q: int

    def __post_init__(self):
        if self.p == 0 or self.q == 0:
            raise DomainError("p and q must be nonzero")
        if math.gcd(self.p, self.q) != 1:
            raise DomainError(f"p={self.p} and q={self.q} are not coprime")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.p, self.q)

    def validate_for(self, spec: SolenoidSpec) -> None:
        bad = (prime_set(self.p) | prime_set(self.q)) - spec.infinite_primes
        if bad:
            raise DomainError(
                f"p/q = {self.p}/{self.q} is not an automorphism: primes {sorted(bad)} "
                f"do not occur infinitely often"
            )
        if self.ratio == -1:
            raise DomainError("alpha = -1 makes I + alpha vanish")

    def act(self, r) -> Fraction:
        return _fraction(r) * self.ratio


def ha_quotient_order(spec: SolenoidSpec, n: int) -> int:
    """``|H_a / n H_a|``, which equals ``|Ker f_n|`` on the solenoid."""
    if n == 0:
        raise DomainError("n must be nonzero")
    _, rest = spec._split(n)
    return rest


def solenoid_condition1(spec: SolenoidSpec, alpha: SolenoidAutomorphism) -> bool:
    """``Ker(I + alpha)`` is trivial iff every prime of ``p + q`` occurs infinitely often."""
    s = alpha.p + alpha.q
    if s == 0:
        return False
    alpha.validate_for(spec)
    return ha_quotient_order(spec, s) == 1


def solenoid_has_2_torsion(spec: SolenoidSpec) -> bool:
    return 2 not in spec.infinite_primes


def adic_truncation(spec: SolenoidSpec, level: int) -> FiniteAbelianGroup:
    """``Z(a_0 ... a_{N-1})``, the level-N quotient of the a-adic integers."""
    if level < 0:
        raise DomainError("level must be nonnegative")
    order = spec.partial_product(level)
    return FiniteAbelianGroup(() if order == 1 else (order,))


def truncation_projection(spec: SolenoidSpec, level: int) -> Homomorphism:
    """Natural projection ``Z(a_0...a_N) -> Z(a_0...a_{N-1})``."""
    upper = adic_truncation(spec, level + 1)
    lower = adic_truncation(spec, level)
    return Homomorphism(upper, lower, np.ones((lower.rank, upper.rank), dtype=np.int64))


@dataclass(frozen=True)
class TruncationEvidence:
    n: int
    levels: tuple[int, ...]
    # for each level N: order of the n-torsion of Ker(Z(a_0..a_{M-1}) -> Z(a_0..a_{N-1}))
    torsion_orders: tuple[int, ...]
    window: int

    @property
    def divisible(self) -> bool:
        """Whether ``n`` divides every tested tail ``a_N ... a_{M-1}``."""
        return all(t == abs(self.n) for t in self.torsion_orders)

    @property
    def failing_levels(self) -> tuple[int, ...]:
        return tuple(N for N, t in zip(self.levels, self.torsion_orders) if t != abs(self.n))


def kernel_truncation_evidence(spec: SolenoidSpec, n: int, levels: Iterable[int],
                               window: int | None = None) -> TruncationEvidence:
    """Finite evidence for ``n H_a = H_a`` from a-adic truncations.

    ``n H_a = H_a`` holds iff for every level ``N`` some later product
    ``a_N ... a_{M-1}`` is divisible by ``n``.  That product is the order of the
    kernel of the projection ``Z(a_0..a_{M-1}) -> Z(a_0..a_{N-1})``, so the test
    is: the ``n``-torsion of this kernel, computed by enumeration, has order ``|n|``.
    """
    n = int(n)
    if n == 0:
        raise DomainError("n must be nonzero")
    if window is None:
        exps = factorint(abs(n)).values() if abs(n) > 1 else [0]
        window = max(1, len(spec.infinite_primes)) * max(exps, default=0) + len(spec.prefix) + 1
    levels = tuple(levels)
    orders = []
    for N in levels:
        top = adic_truncation(spec, N + window)
        low = adic_truncation(spec, N)
        proj = Homomorphism(top, low, np.ones((low.rank, top.rank), dtype=np.int64))
        ker = kernel(proj)
        f_n = Homomorphism.scalar(top, n)
        n_torsion = np.flatnonzero(f_n.table == 0)
        orders.append(int(np.intersect1d(n_torsion, ker.indices).size))
    return TruncationEvidence(n, levels, tuple(orders), window)


def dual_elements(spec: SolenoidSpec, max_level: int, bound: float = 1.0) -> list[SolenoidDualElement]:
    """All ``m / (a_0 ... a_n)`` with ``n <= max_level`` and ``|r| <= bound``, sorted."""
    denom = spec.partial_product(max_level + 1)
    m_max = int(math.floor(bound * denom))
    out = []
    for m in range(-m_max, m_max + 1):
        out.append(SolenoidDualElement.make(spec, Fraction(m, denom)))
    return out


def solenoid_pairing(t: float, r) -> complex:
    """``(z_t, r) = exp(2 pi i r t)`` for ``z_t`` the image of ``t`` in the solenoid."""
    return complex(np.exp(2j * np.pi * float(_fraction(r)) * t))


__all__ = [
    "RealExtGroup", "SolenoidSpec", "SolenoidDualElement", "SolenoidAutomorphism",
    "ha_contains", "ha_quotient_order", "solenoid_condition1", "solenoid_has_2_torsion",
    "adic_truncation", "truncation_projection", "kernel_truncation_evidence",
    "TruncationEvidence", "dual_elements", "solenoid_pairing",
]
