"""Seeded random finite instances for oracle-agreement runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import FiniteDist, convolve, shift
from .groups import (FiniteAbelianGroup, Homomorphism, Subgroup, check_condition1,
                     is_automorphism, two_torsion)

CATEGORIES = ("random", "near_degenerate", "torsion_solution", "equal_pair", "haar", "sparse")


@dataclass
class Instance:
    group: FiniteAbelianGroup
    alpha: Homomorphism
    mu1: FiniteDist
    mu2: FiniteDist
    category: str


def random_group(rng: np.random.Generator, max_order: int = 64) -> FiniteAbelianGroup:
    while True:
        moduli = []
        order = 1
        for _ in range(int(rng.integers(1, 4))):
            n = int(rng.integers(2, 9))
            if order * n > max_order:
                break
            moduli.append(n)
            order *= n
        if moduli:
            return FiniteAbelianGroup(moduli)


def random_endomorphism(rng: np.random.Generator, group: FiniteAbelianGroup) -> Homomorphism:
    k = group.rank
    m = np.zeros((k, k), dtype=np.int64)
    for i, mi in enumerate(group.moduli):
        for j, nj in enumerate(group.moduli):
            step = mi // math.gcd(mi, nj)
            m[i, j] = step * int(rng.integers(0, mi))
    return Homomorphism(group, group, m)


def random_automorphism(rng: np.random.Generator, group: FiniteAbelianGroup,
                        condition1: bool | None = None, tries: int = 200) -> Homomorphism:
    """A random automorphism; optionally constrained to satisfy (or violate) Ker(I+a) = 0."""
    for _ in range(tries):
        f = random_endomorphism(rng, group)
        if not is_automorphism(f):
            continue
        if condition1 is None or check_condition1(f) == condition1:
            return f
    fallback = Homomorphism.scalar(group, -1 if condition1 is False else 1)
    if condition1 is None or check_condition1(fallback) == condition1:
        return fallback
    raise ValueError(f"no automorphism with condition1={condition1} found on {group!r}")


def random_dist(rng: np.random.Generator, group: FiniteAbelianGroup, sparsity: float = 0.0) -> FiniteDist:
    p = rng.dirichlet(np.full(group.order, 0.7))
    if sparsity:
        p[rng.random(group.order) < sparsity] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
    return FiniteDist(group, p / p.sum())


def near_degenerate(rng: np.random.Generator, group: FiniteAbelianGroup) -> FiniteDist:
    """``(1 - eps) E_0 + eps nu``; ``eps < 1/2`` keeps the transform away from zero."""
    eps = float(rng.uniform(0.05, 0.45))
    p = eps * random_dist(rng, group).probs
    p[0] += 1.0 - eps
    return FiniteDist(group, p)


def torsion_solution_pair(rng: np.random.Generator, group: FiniteAbelianGroup, alpha: Homomorphism,
                          nonvanishing: bool = False) -> tuple[FiniteDist, FiniteDist]:
    """``omega_j * E_{x_j}`` with ``omega_j`` on ``{2x = 0}`` and ``2(x_1 + alpha x_2) = 0``."""
    G = two_torsion(group)
    omegas = []
    for _ in range(2):
        if nonvanishing:
            w = rng.uniform(0.0, 1.0, G.order)
            w[0] += w.sum() + 0.1  # dominant atom at 0 keeps omega^ > 0
        else:
            w = rng.dirichlet(np.full(G.order, 0.7))
        omegas.append(FiniteDist.on_subgroup(group, G, w))
    els = group.elements()
    x2 = tuple(int(c) for c in els[int(rng.integers(group.order))])
    g = tuple(int(c) for c in els[G.indices[int(rng.integers(G.order))]])
    x1 = group.add(group.neg(alpha(x2)), g)
    return shift(omegas[0], x1), shift(omegas[1], x2)


def random_instance(rng: np.random.Generator, max_order: int = 64,
                    category: str | None = None) -> Instance:
    group = random_group(rng, max_order)
    category = category or CATEGORIES[int(rng.integers(len(CATEGORIES)))]
    if category == "equal_pair":
        alpha = Homomorphism.scalar(group, -1)
    else:
        alpha = random_automorphism(rng, group)
    if category == "random":
        mu1, mu2 = random_dist(rng, group), random_dist(rng, group)
    elif category == "sparse":
        mu1, mu2 = random_dist(rng, group, 0.6), random_dist(rng, group, 0.6)
    elif category == "near_degenerate":
        mu1, mu2 = near_degenerate(rng, group), near_degenerate(rng, group)
    elif category == "torsion_solution":
        mu1, mu2 = torsion_solution_pair(rng, group, alpha)
    elif category == "equal_pair":
        mu1 = random_dist(rng, group)
        mu2 = mu1
    elif category == "haar":
        gens = [tuple(int(c) for c in group.elements()[int(rng.integers(group.order))])]
        K = Subgroup.generated_by(group, gens)
        mu1 = convolve(FiniteDist.uniform(group, K), random_dist(rng, group, 0.8))
        mu2 = FiniteDist.uniform(group, K)
    else:
        raise ValueError(f"unknown category {category!r}")
    return Instance(group, alpha, mu1, mu2, category)


def eq2_passing_instance(rng: np.random.Generator, max_order: int = 64) -> Instance:
    """An instance with positive ``|mu_j^|^2`` whose alpha satisfies Ker(I+a) = 0."""
    while True:
        group = random_group(rng, max_order)
        try:
            alpha = random_automorphism(rng, group, condition1=True)
        except ValueError:
            continue
        mu1, mu2 = torsion_solution_pair(rng, group, alpha, nonvanishing=True)
        return Instance(group, alpha, mu1, mu2, "torsion_solution")
