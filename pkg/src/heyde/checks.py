"""Executable forms of the symmetry condition.

Two independent routes decide whether the conditional law of
``L2 = xi1 + alpha xi2`` given ``L1 = xi1 + xi2`` is symmetric:

* the characteristic-function identity
  ``c1(u+v) c2(u+alpha~v) = c1(u-v) c2(u-alpha~v)`` (``eq2_*``), and
* the joint law of ``(L1, L2)`` compared with that of ``(L1, -L2)``, either
  exactly by enumeration or statistically by sampling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import stats

from .distributions import (FiniteCharFn, FiniteDist, FourierGaussCharFn, SolenoidGaussCharFn,
                            VanishingCharacteristicFunction, sample)
from .errors import DomainError, StructuralError
from .extended import SolenoidAutomorphism, SolenoidSpec, dual_elements
from .groups import FiniteAbelianGroup, Homomorphism, adjoint, is_automorphism, kernel

EXACT_TOL = 1e-9
JOINT_TOL = 1e-12
GRID_TOL = 1e-9
MC_LEVEL = 0.01


@dataclass
class CheckResult:
    holds: bool
    max_residual: float
    witness: Any = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class GridSpec:
    """Real coordinates ``lo, lo+step, ..., hi`` per axis; solenoid duals up to ``solenoid_level``."""

    lo: float = -4.0
    hi: float = 4.0
    step: float = 0.25
    solenoid_level: int = 3
    solenoid_bound: float = 1.0

    def axis(self) -> np.ndarray:
        n = int(round((self.hi - self.lo) / self.step)) + 1
        return np.linspace(self.lo, self.hi, n)


@dataclass(frozen=True)
class RealExtAutomorphism:
    """``alpha(t, g) = (a t, alpha_G g)`` on ``R^d x F``."""

    real: np.ndarray
    finite: Homomorphism

    def __init__(self, real, finite: Homomorphism):
        real = np.atleast_2d(np.asarray(real, dtype=float))
        d = real.shape[0] if real.size else 0
        real = real.reshape(d, d)
        if d and abs(np.linalg.det(real)) < 1e-14:
            raise DomainError("real part of alpha is singular")
        if not is_automorphism(finite):
            raise DomainError("finite part of alpha is not an automorphism")
        object.__setattr__(self, "real", real)
        object.__setattr__(self, "finite", finite)

    @classmethod
    def scalar(cls, a: float, finite: Homomorphism, real_dim: int = 1) -> "RealExtAutomorphism":
        return cls(a * np.eye(real_dim), finite)

    @property
    def real_dim(self) -> int:
        return self.real.shape[0]

    def condition1(self) -> bool:
        """``Ker(I + alpha) = {0}``: ``I + a`` invertible and ``Ker(I + alpha_G)`` trivial."""
        d = self.real_dim
        real_ok = (not d) or abs(np.linalg.det(np.eye(d) + self.real)) > 1e-12
        fin = self.finite
        return real_ok and kernel(Homomorphism.identity(fin.source) + fin).is_trivial()

    def finite_kernel(self):
        fin = self.finite
        return kernel(Homomorphism.identity(fin.source) + fin)


def _warn_if_vanishing(*cfs):
    for c in cfs:
        if isinstance(c, FiniteCharFn) and not c.is_nonvanishing():
            warnings.warn("characteristic function has zeros", VanishingCharacteristicFunction,
                          stacklevel=3)


# --------------------------------------------------------------------------- finite


def _finite_witness(Y: FiniteAbelianGroup, flat_index: int):
    i, j = divmod(int(flat_index), Y.order)
    els = Y.elements()
    return tuple(int(c) for c in els[i]), tuple(int(c) for c in els[j])


def eq2_exact(c1: FiniteCharFn, c2: FiniteCharFn, alpha_tilde: Homomorphism,
              tol: float = EXACT_TOL) -> CheckResult:
    """Exhaustive check of the identity over all pairs ``(u, v)`` of characters."""
    Y = c1.dual
    if c2.dual != Y or alpha_tilde.source != Y or alpha_tilde.target != Y:
        raise StructuralError("characteristic functions and alpha~ must share one dual group")
    _warn_if_vanishing(c1, c2)
    T, N, A = Y.addition_table, Y.negation_table, alpha_tilde.table
    a, b = c1.values, c2.values
    lhs = a[T] * b[T[:, A]]
    rhs = a[T[:, N]] * b[T[:, N[A]]]
    res = np.abs(lhs - rhs)
    worst = int(np.argmax(res))
    m = float(res.reshape(-1)[worst])
    holds = m < tol
    return CheckResult(holds, m, None if holds else _finite_witness(Y, worst))


def eq5_exact(c1: FiniteCharFn, c2: FiniteCharFn, alpha_tilde: Homomorphism,
              tol: float = EXACT_TOL) -> CheckResult:
    """Exhaustive check of the derived identity

    ``c1((I+a)u + 2v) c2(2a u + (I+a)v) = c1((I+a)u) c2(2a u) c1(2v) c2((I+a)v)``.
    """
    Y = c1.dual
    if c2.dual != Y or alpha_tilde.source != Y:
        raise StructuralError("characteristic functions and alpha~ must share one dual group")
    T = Y.addition_table
    ipa = (Homomorphism.identity(Y) + alpha_tilde).table
    two_a = (Homomorphism.scalar(Y, 2) @ alpha_tilde).table
    two = Y.scale_table(2)
    a, b = c1.values, c2.values
    lhs = a[T[ipa][:, two]] * b[T[two_a][:, ipa]]
    rhs = (a[ipa] * b[two_a])[:, None] * (a[two] * b[ipa])[None, :]
    res = np.abs(lhs - rhs)
    worst = int(np.argmax(res))
    m = float(res.reshape(-1)[worst])
    holds = m < tol
    return CheckResult(holds, m, None if holds else _finite_witness(Y, worst))


def joint_law(mu1: FiniteDist, mu2: FiniteDist, alpha: Homomorphism) -> np.ndarray:
    """``p[l1, l2] = P(xi1 + xi2 = l1, xi1 + alpha xi2 = l2)`` by enumeration."""
    X = mu1.group
    if mu2.group != X or alpha.source != X or alpha.target != X:
        raise StructuralError("distributions and alpha must share one group")
    T = X.addition_table
    n = X.order
    l1 = T  # [x1, x2]
    l2 = T[:, alpha.table]
    w = np.outer(mu1.probs, mu2.probs)
    p = np.bincount((l1 * n + l2).reshape(-1), weights=w.reshape(-1), minlength=n * n)
    return p.reshape(n, n)


def conditional_symmetry_exact(mu1: FiniteDist, mu2: FiniteDist, alpha: Homomorphism,
                               tol: float = JOINT_TOL) -> bool:
    """Whether ``(L1, L2)`` and ``(L1, -L2)`` have the same law, to ``tol``."""
    if not is_automorphism(alpha):
        raise DomainError("alpha must be an automorphism")
    p = joint_law(mu1, mu2, alpha)
    flipped = p[:, mu1.group.negation_table]
    return bool(np.max(np.abs(p - flipped)) < tol)


# --------------------------------------------------------------------------- R^d x F


class _RealExtDual:
    """Vectorized arithmetic on points ``(S, H)`` of ``R^d x H``."""

    def __init__(self, alpha: RealExtAutomorphism):
        self.F = alpha.finite.source
        self.real_adj = alpha.real.T
        self.fin_adj = adjoint(alpha.finite).table

    def add(self, p, q):
        return p[0] + q[0], self.F.addition_table[p[1], q[1]]

    def neg(self, p):
        return -p[0], self.F.negation_table[p[1]]

    def alpha(self, p):
        return p[0] @ self.real_adj.T, self.fin_adj[p[1]]

    def scale(self, k: int, p):
        tab = self.F.scale_table(k)
        return k * p[0], tab[p[1]]

    def i_plus_alpha(self, p):
        return self.add(p, self.alpha(p))


def _grid_points(d: int, F: FiniteAbelianGroup, grid: GridSpec):
    axis = grid.axis()
    if d == 0:
        return np.zeros((F.order, 0)), np.arange(F.order)
    mesh = np.meshgrid(*([axis] * d), np.arange(F.order), indexing="ij")
    S = np.stack([m.reshape(-1) for m in mesh[:d]], axis=1)
    H = mesh[d].reshape(-1).astype(np.int64)
    return S, H


def _pairs(S, H):
    n = len(H)
    iu, iv = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    iu, iv = iu.reshape(-1), iv.reshape(-1)
    return (S[iu], H[iu]), (S[iv], H[iv])


def _point_witness(p, k):
    return {"s": [float(x) for x in p[0][k]], "h": int(p[1][k])}


def _check_real_ext(c1, c2, alpha):
    if not (isinstance(c1, FourierGaussCharFn) and isinstance(c2, FourierGaussCharFn)):
        raise StructuralError("expected characteristic functions on R^d x F")
    if c1.group != c2.group:
        raise StructuralError("characteristic functions live on different groups")
    if not isinstance(alpha, RealExtAutomorphism):
        raise DomainError(
            "alpha on R^d x F must be given in block form (a, alpha_G); mixing is not supported"
        )
    if alpha.real_dim != c1.real_dim or alpha.finite.source != c1.finite:
        raise StructuralError("alpha does not act on the group of the characteristic functions")


def eq2_grid(c1, c2, alpha, grid: GridSpec = GridSpec(), tol: float = GRID_TOL,
             spec: SolenoidSpec | None = None) -> CheckResult:
    """Residual of the identity on a grid of real coordinates times all finite characters.

    For solenoid characteristic functions, ``alpha`` is a ``SolenoidAutomorphism`` and
    ``u, v`` run over ``H_a`` elements up to ``grid.solenoid_level``.
    """
    if isinstance(c1, SolenoidGaussCharFn):
        return _eq2_solenoid(c1, c2, alpha, spec, grid, tol)
    _check_real_ext(c1, c2, alpha)
    D = _RealExtDual(alpha)
    S, H = _grid_points(c1.real_dim, c1.finite, grid)
    u, v = _pairs(S, H)
    av = D.alpha(v)
    lhs = c1.evaluate(*D.add(u, v)) * c2.evaluate(*D.add(u, av))
    rhs = c1.evaluate(*D.add(u, D.neg(v))) * c2.evaluate(*D.add(u, D.neg(av)))
    res = np.abs(lhs - rhs)
    k = int(np.argmax(res))
    m = float(res[k])
    holds = m < tol
    witness = None if holds else {"u": _point_witness(u, k), "v": _point_witness(v, k)}
    return CheckResult(holds, m, witness, {"points": int(res.size)})


def _eq2_solenoid(c1, c2, alpha: SolenoidAutomorphism, spec, grid: GridSpec, tol) -> CheckResult:
    if spec is None:
        raise DomainError("solenoid checks need the sequence spec")
    if not isinstance(alpha, SolenoidAutomorphism):
        raise DomainError("alpha on the solenoid must be p/q")
    alpha.validate_for(spec)
    els = dual_elements(spec, grid.solenoid_level, grid.solenoid_bound)
    r = np.array([float(e.value) for e in els])
    a = float(alpha.ratio)
    r1, r2 = np.meshgrid(r, r, indexing="ij")
    r1, r2 = r1.reshape(-1), r2.reshape(-1)
    lhs = c1.evaluate(r1 + r2) * c2.evaluate(r1 + a * r2)
    rhs = c1.evaluate(r1 - r2) * c2.evaluate(r1 - a * r2)
    res = np.abs(lhs - rhs)
    k = int(np.argmax(res))
    m = float(res[k])
    holds = m < tol
    witness = None
    if not holds:
        i, j = divmod(k, len(els))
        witness = {"u": str(els[i].value), "v": str(els[j].value)}
    return CheckResult(holds, m, witness, {"points": int(res.size), "dual_elements": len(els)})


def eq5_grid(c1, c2, alpha: RealExtAutomorphism, grid: GridSpec = GridSpec(),
             tol: float = GRID_TOL) -> CheckResult:
    _check_real_ext(c1, c2, alpha)
    D = _RealExtDual(alpha)
    S, H = _grid_points(c1.real_dim, c1.finite, grid)
    u, v = _pairs(S, H)
    ipa_u, ipa_v = D.i_plus_alpha(u), D.i_plus_alpha(v)
    two_a_u = D.scale(2, D.alpha(u))
    two_v = D.scale(2, v)
    lhs = c1.evaluate(*D.add(ipa_u, two_v)) * c2.evaluate(*D.add(two_a_u, ipa_v))
    rhs = (c1.evaluate(*ipa_u) * c2.evaluate(*two_a_u)
           * c1.evaluate(*two_v) * c2.evaluate(*ipa_v))
    res = np.abs(lhs - rhs)
    k = int(np.argmax(res))
    m = float(res[k])
    holds = m < tol
    witness = None if holds else {"u": _point_witness(u, k), "v": _point_witness(v, k)}
    return CheckResult(holds, m, witness)


def eq5_check(c1, c2, alpha, grid: GridSpec = GridSpec(), tol: float = EXACT_TOL) -> CheckResult:
    """Dispatch: exhaustive on finite duals (``alpha`` is then alpha~), grid on ``R^d x F``."""
    if isinstance(c1, FiniteCharFn):
        return eq5_exact(c1, c2, alpha, tol)
    return eq5_grid(c1, c2, alpha, grid, tol)


# --------------------------------------------------------------------------- Monte Carlo


@dataclass
class MCResult:
    p_value: float
    consistent: bool
    statistic: float
    dof: int
    n: int
    real_bins: int
    widened: bool
    pooled_cells: int

    @property
    def decision(self) -> str:
        return "consistent with symmetry" if self.consistent else "symmetry refuted"


def _as_samples(dist, n, seed, workers):
    if isinstance(dist, FiniteDist):
        g = sample(dist, n, seed, workers)
        return np.zeros((n, 0)), g
    return sample(dist, n, seed, workers)


def _quantile_codes(x: np.ndarray, nbins: int) -> np.ndarray:
    if nbins <= 1 or x.size == 0:
        return np.zeros(x.size, dtype=np.int64)
    edges = np.unique(np.quantile(x, np.linspace(0, 1, nbins + 1)[1:-1]))
    return np.searchsorted(edges, x, side="right").astype(np.int64)


def conditional_symmetry_mc(dist1, dist2, alpha, n: int = 10**6, bins: int = 32, seed=0,
                            workers: int = 1, level: float = MC_LEVEL) -> MCResult:
    """Two-sample chi-square comparison of ``(L1, L2)`` against ``(L1, -L2)``.

    The two samples come from disjoint halves of ``n`` independent draws, so
    the test compares independent samples.  Real coordinates are cut at
    pooled quantiles; finite coordinates are kept exact.  Bins are halved while
    some cell has expected count below 5, and any remaining sparse cells are pooled.
    """
    if isinstance(alpha, Homomorphism):
        alpha = RealExtAutomorphism(np.zeros((0, 0)), alpha)
    F = alpha.finite.source
    root = np.random.SeedSequence(seed)
    s1, s2 = root.spawn(2)
    t1, g1 = _as_samples(dist1, n, s1, workers)
    t2, g2 = _as_samples(dist2, n, s2, workers)
    d = t1.shape[1]
    T = F.addition_table
    L1t, L1g = t1 + t2, T[g1, g2]
    L2t, L2g = t1 + t2 @ alpha.real.T, T[g1, alpha.finite.table[g2]]
    half = n // 2
    a = (L1t[:half], L1g[:half], L2t[:half], L2g[:half])
    b = (L1t[half:2 * half], L1g[half:2 * half], -L2t[half:2 * half],
         F.negation_table[L2g[half:2 * half]])

    per_coord = bins if d <= 1 else max(2, int(round(math.sqrt(bins))))
    widened = False
    while True:
        codes = []
        radix = []
        for k in range(d):
            pooled1 = np.concatenate([a[0][:, k], b[0][:, k]])
            pooled2 = np.concatenate([a[2][:, k], b[2][:, k]])
            c1 = _quantile_codes(pooled1, per_coord)
            c2 = _quantile_codes(pooled2, per_coord)
            codes += [c1, c2]
            radix += [int(c1.max()) + 1, int(c2.max()) + 1]
        codes += [np.concatenate([a[1], b[1]]), np.concatenate([a[3], b[3]])]
        radix += [F.order, F.order]
        cell = np.ravel_multi_index(tuple(codes), tuple(radix))
        _, inv = np.unique(cell, return_inverse=True)
        k = int(inv.max()) + 1
        table = np.zeros((2, k))
        np.add.at(table, (np.r_[np.zeros(half, int), np.ones(half, int)], inv), 1)
        expected = table.sum(axis=0)[None, :] * table.sum(axis=1)[:, None] / table.sum()
        if expected.min() >= 5 or per_coord <= 1 or d == 0:
            break
        per_coord //= 2
        widened = True

    pooled = 0
    if k > 1:
        expected = table.sum(axis=0) / 2
        sparse = expected < 5
        if sparse.any():
            pooled = int(sparse.sum())
            table = np.concatenate([table[:, ~sparse], table[:, sparse].sum(axis=1, keepdims=True)],
                                   axis=1)
            table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] <= 1:
        return MCResult(1.0, True, 0.0, 0, n, per_coord, widened, pooled)
    chi2, p, dof, _ = stats.chi2_contingency(table, correction=False)
    return MCResult(float(p), bool(p > level), float(chi2), int(dof), n, per_coord, widened, pooled)
