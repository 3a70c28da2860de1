"""Distributions on the supported groups and their characteristic functions.

Finite groups carry exact probability vectors; ``R^d x F`` carries closed-form
characteristic functions

    c(s, h) = sum_k c_k exp(-<A_k s, s> + i <b_k, s>)

kept as term lists per character ``h`` of ``F``.  The term
``exp(-<A s, s> + i <b, s>)`` is the characteristic function of the normal law
``N(b, 2A)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DomainError, StructuralError, ValidationError
from .extended import RealExtGroup, SolenoidDualElement
from .groups import FiniteAbelianGroup, Subgroup

PROB_TOL = 1e-12
DENSITY_TOL = 1e-12
PD_TOL = 1e-9
DENSITY_GRID_POINTS = 4096
DENSITY_GRID_POINTS_2D = 256


class VanishingCharacteristicFunction(UserWarning):
    """Raised as a warning when an input characteristic function has zeros."""


# --------------------------------------------------------------------------- finite


@dataclass(frozen=True, eq=False)
class FiniteDist:
    group: FiniteAbelianGroup
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size != self.group.order:
            raise StructuralError(f"expected {self.group.order} probabilities, got {p.size}")
        if (p < 0).any():
            raise DomainError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise DomainError(f"probabilities sum to {p.sum()!r}, not 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def point_mass(cls, group: FiniteAbelianGroup, x=None) -> "FiniteDist":
        """The degenerate distribution ``E_x``."""
        p = np.zeros(group.order)
        p[group.index(group.zero if x is None else x)] = 1.0
        return cls(group, p)

    @classmethod
    def uniform(cls, group: FiniteAbelianGroup, subgroup: Subgroup | None = None) -> "FiniteDist":
        """Haar measure of ``subgroup`` (the whole group by default)."""
        p = np.zeros(group.order)
        idx = np.arange(group.order) if subgroup is None else subgroup.indices
        p[idx] = 1.0 / len(idx)
        return cls(group, p)

    @classmethod
    def on_subgroup(cls, group: FiniteAbelianGroup, subgroup: Subgroup, weights) -> "FiniteDist":
        w = np.asarray(weights, dtype=float)
        p = np.zeros(group.order)
        p[subgroup.indices] = w / w.sum()
        return cls(group, p)

    def support(self, tol: float = 0.0) -> np.ndarray:
        return np.flatnonzero(self.probs > tol)

    def allclose(self, other: "FiniteDist", tol: float = PROB_TOL) -> bool:
        return self.group == other.group and bool(np.max(np.abs(self.probs - other.probs)) <= tol)


@dataclass(frozen=True, eq=False)
class FiniteCharFn:
    """Values of a function on the dual, indexed like ``dual.elements()``."""

    dual: FiniteAbelianGroup
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.size != self.dual.order:
            raise StructuralError(f"expected {self.dual.order} values, got {v.size}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, y) -> complex:
        return complex(self.values[self.dual.index(y)])

    def __mul__(self, other: "FiniteCharFn") -> "FiniteCharFn":
        if self.dual != other.dual:
            raise StructuralError("characteristic functions live on different duals")
        return FiniteCharFn(self.dual, self.values * other.values)

    def is_nonvanishing(self, tol: float = PROB_TOL) -> bool:
        return bool(np.min(np.abs(self.values)) > tol)


def dft(mu: FiniteDist) -> FiniteCharFn:
    """``mu^(y) = sum_x mu(x) (x, y)``."""
    g = mu.group
    if g.rank == 0:
        return FiniteCharFn(g, mu.probs.astype(complex))
    vals = np.fft.ifftn(mu.probs.reshape(g.moduli)) * g.order
    return FiniteCharFn(g, vals.reshape(-1))


def inverse_dft(c: FiniteCharFn) -> np.ndarray:
    """Complex measure whose transform is ``c``: ``mu(x) = |Y|^-1 sum_y conj((x,y)) c(y)``."""
    g = c.dual
    if g.rank == 0:
        return c.values.copy()
    return (np.fft.fftn(c.values.reshape(g.moduli)) / g.order).reshape(-1)


def _same_group(mu: FiniteDist, nu: FiniteDist):
    if mu.group != nu.group:
        raise StructuralError("distributions live on different groups")


def convolve(mu: FiniteDist, nu: FiniteDist) -> FiniteDist:
    """Law of ``xi + eta`` for independent ``xi ~ mu``, ``eta ~ nu``."""
    _same_group(mu, nu)
    table = mu.group.addition_table
    out = np.bincount(table.reshape(-1), weights=np.outer(mu.probs, nu.probs).reshape(-1),
                      minlength=mu.group.order)
    return FiniteDist(mu.group, out / out.sum())


def reflect(mu: FiniteDist) -> FiniteDist:
    """``mu-bar(B) = mu(-B)``."""
    return FiniteDist(mu.group, mu.probs[mu.group.negation_table])


def shift(mu: FiniteDist, x) -> FiniteDist:
    """``mu * E_x``."""
    g = mu.group
    xi = g.index(x)
    out = np.zeros(g.order)
    out[g.addition_table[:, xi]] = mu.probs
    return FiniteDist(g, out)


def symmetrize(mu: FiniteDist) -> FiniteDist:
    """``mu * mu-bar``, whose characteristic function is ``|mu^|^2``."""
    return convolve(mu, reflect(mu))


# --------------------------------------------------------------------------- R^d x F


@dataclass(frozen=True, eq=False)
class GaussTerm:
    coef: complex
    A: np.ndarray
    b: np.ndarray

    def key(self) -> tuple:
        return (tuple(np.round(self.A, 15).reshape(-1)), tuple(np.round(self.b, 15)))


def _as_matrix(A, d: int) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if d == 0:
        return np.zeros((0, 0))
    return A.reshape(d, d)


def _as_vector(b, d: int) -> np.ndarray:
    if b is None:
        return np.zeros(d)
    return np.asarray(b, dtype=float).reshape(d)


def is_psd(A: np.ndarray, tol: float = 1e-12) -> bool:
    if A.size == 0:
        return True
    if not np.allclose(A, A.T, atol=tol):
        return False
    return bool(np.min(np.linalg.eigvalsh(A)) >= -tol)


@dataclass(frozen=True, eq=False)
class FourierGaussCharFn:
    """Closed-form characteristic function on ``R^d x F``.

    ``terms[i]`` is the term list for the ``i``-th character of ``F`` (in
    ``F.elements()`` order).  ``validated`` records that the inverse transform
    was checked to be a probability measure.
    """

    group: RealExtGroup
    terms: tuple[tuple[GaussTerm, ...], ...]
    validated: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.terms) != self.group.finite_part.order:
            raise StructuralError("need one term list per character of the finite part")
        d = self.group.real_dim
        for tl in self.terms:
            for t in tl:
                if t.A.shape != (d, d) or t.b.shape != (d,):
                    raise StructuralError("term shapes do not match the real dimension")

    @property
    def real_dim(self) -> int:
        return self.group.real_dim

    @property
    def finite(self) -> FiniteAbelianGroup:
        return self.group.finite_part

    def evaluate(self, s, h) -> np.ndarray:
        """Vectorized evaluation at ``(s[k], h[k])``; ``h`` holds character indices."""
        d = self.real_dim
        h = np.asarray(h, dtype=np.int64).reshape(-1)
        s = np.asarray(s, dtype=float)
        if d == 0:
            s = np.zeros((h.size, 0))
        else:
            s = s.reshape(-1, d)
        if s.shape[0] != h.size:
            if h.size == 1:
                h = np.full(s.shape[0], h[0])
            else:
                raise StructuralError("s and h have different lengths")
        out = np.zeros(h.size, dtype=complex)
        for hv in np.unique(h):
            mask = h == hv
            ss = s[mask]
            acc = np.zeros(ss.shape[0], dtype=complex)
            for t in self.terms[int(hv)]:
                quad = np.einsum("ni,ij,nj->n", ss, t.A, ss)
                acc += t.coef * np.exp(-quad + 1j * (ss @ t.b))
            out[mask] = acc
        return out

    def __call__(self, s, h=0) -> complex:
        return complex(self.evaluate(np.atleast_1d(s), [h])[0])

    def __mul__(self, other: "FourierGaussCharFn") -> "FourierGaussCharFn":
        """Pointwise product, i.e. convolution of the underlying measures."""
        if self.group != other.group:
            raise StructuralError("characteristic functions live on different groups")
        terms = tuple(
            tuple(GaussTerm(a.coef * b.coef, a.A + b.A, a.b + b.b) for a in ta for b in tb)
            for ta, tb in zip(self.terms, other.terms)
        )
        return FourierGaussCharFn(self.group, terms, self.validated and other.validated)

    # --- inverse transform -------------------------------------------------

    def coset_mixtures(self, tol: float = 1e-12) -> list[list[tuple[float, np.ndarray, np.ndarray]]]:
        """Per element ``g`` of ``F``: the signed mixture ``sum w N(b, 2A)`` of the density on ``R^d x {g}``."""
        F = self.finite
        P = F.pairing_matrix()  # P[g, h] = (g, h)
        keys: dict = {}
        for ti, tl in enumerate(self.terms):
            for t in tl:
                k = t.key()
                if k not in keys:
                    keys[k] = (t.A, t.b, np.zeros(F.order, dtype=complex))
                keys[k][2][ti] += t.coef
        out = []
        for gi in range(F.order):
            mix = []
            for A, b, coefs in keys.values():
                w = np.sum(np.conj(P[gi]) * coefs) / F.order
                if abs(w.imag) > tol:
                    raise ValidationError(
                        f"inverse transform is not real on coset {gi}: imaginary weight {w.imag:.3g}"
                    )
                if abs(w.real) > tol:
                    mix.append((float(w.real), A, b))
            out.append(mix)
        return out

    def coset_masses(self) -> np.ndarray:
        return np.array([sum(w for w, _, _ in mix) for mix in self.coset_mixtures()])

    def density_grid(self) -> list[np.ndarray]:
        d = self.real_dim
        all_terms = [t for tl in self.terms for t in tl]
        if not all_terms:
            raise ValidationError("empty characteristic function")
        smax = max(float(np.max(np.linalg.eigvalsh(t.A))) if d else 0.0 for t in all_terms)
        half = 10.0 * math.sqrt(max(smax, 1e-12))
        axes = []
        npts = DENSITY_GRID_POINTS if d == 1 else DENSITY_GRID_POINTS_2D
        for i in range(d):
            lo = min(t.b[i] for t in all_terms) - half
            hi = max(t.b[i] for t in all_terms) + half
            axes.append(np.linspace(lo, hi, npts))
        return axes

    def validate(self) -> "FourierGaussCharFn":
        """Check that the inverse transform is a probability measure; return a validated copy."""
        if abs(self(np.zeros(self.real_dim), 0) - 1) > 1e-12:
            raise ValidationError("characteristic function is not 1 at the origin")
        for tl in self.terms:
            for t in tl:
                if not is_psd(t.A):
                    raise ValidationError("a term matrix is not positive semidefinite")
        mixtures = self.coset_mixtures()
        d = self.real_dim
        pts = None
        if d:
            axes = self.density_grid()
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
        for gi, mix in enumerate(mixtures):
            if sum(w for w, _, _ in mix) < -DENSITY_TOL:
                raise ValidationError(f"negative mass on coset {gi}")
            regular = [(w, A, b) for w, A, b in mix if d and np.linalg.matrix_rank(A) == d]
            singular = [(w, A, b) for w, A, b in mix if not (d and np.linalg.matrix_rank(A) == d)]
            # singular components are only accepted with nonnegative weight
            if any(w < -DENSITY_TOL for w, _, _ in singular):
                raise ValidationError(f"negative degenerate component on coset {gi}")
            if regular:
                dens = mixture_density(regular, pts)
                if dens.min() < -DENSITY_TOL:
                    raise ValidationError(
                        f"density on coset {gi} is negative ({dens.min():.3g}) on the check grid"
                    )
        return replace(self, validated=True)

    def shifted(self, t=None, g=None) -> "FourierGaussCharFn":
        """Characteristic function of ``mu * E_(t, g)``."""
        d = self.real_dim
        t = _as_vector(t, d)
        F = self.finite
        phase = np.ones(F.order, dtype=complex)
        if g is not None:
            phase = F.pairing_matrix()[F.index(g)]
        terms = tuple(
            tuple(GaussTerm(term.coef * phase[hi], term.A, term.b + t) for term in tl)
            for hi, tl in enumerate(self.terms)
        )
        return FourierGaussCharFn(self.group, terms, self.validated)

    def restrict_real(self, h: int = 0):
        """Closed form of ``s -> c(s, h)`` as a term list."""
        return self.terms[h]


def mixture_density(mix, pts: np.ndarray) -> np.ndarray:
    """Evaluate ``sum w N(b, 2A)`` at the rows of ``pts``."""
    out = np.zeros(pts.shape[0])
    for w, A, b in mix:
        cov = 2.0 * A
        d = cov.shape[0]
        inv = np.linalg.inv(cov)
        diff = pts - b
        quad = np.einsum("ni,ij,nj->n", diff, inv, diff)
        norm = 1.0 / math.sqrt((2 * math.pi) ** d * np.linalg.det(cov))
        out += w * norm * np.exp(-0.5 * quad)
    return out


def real_ext_group(real_dim: int, moduli: Sequence[int] = ()) -> RealExtGroup:
    return RealExtGroup(real_dim, FiniteAbelianGroup(moduli))


def quad_gauss(A, b=None) -> FourierGaussCharFn:
    """``exp(-<A s, s> + i <b, s>)`` on ``R^d``: the law ``N(b, 2A)``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = A.shape[0]
    if A.shape != (d, d) or d not in (1, 2):
        raise DomainError(f"A must be a 1x1 or 2x2 matrix, got shape {A.shape}")
    if not is_psd(A):
        raise DomainError("A must be symmetric positive semidefinite")
    b = _as_vector(b, d)
    group = real_ext_group(d)
    return FourierGaussCharFn(group, ((GaussTerm(1.0 + 0j, A, b),),), validated=True,
                              label="quad_gauss")


def real_gaussian(sigma: float, b: float = 0.0) -> FourierGaussCharFn:
    """Gaussian on R with characteristic function ``exp(-sigma s^2 + i b s)``."""
    if sigma < 0:
        raise DomainError("sigma must be nonnegative")
    return quad_gauss([[sigma]], [b])


def finite_as_char_fn(mu: FiniteDist, real_dim: int = 0) -> FourierGaussCharFn:
    """A distribution on ``F`` viewed on ``R^d x F`` (concentrated on ``{0} x F``)."""
    c = dft(mu).values
    d = real_dim
    zA, zb = np.zeros((d, d)), np.zeros(d)
    terms = tuple((GaussTerm(complex(v), zA, zb),) for v in c)
    return FourierGaussCharFn(RealExtGroup(d, mu.group), terms, validated=True)


def product_measure(first: FourierGaussCharFn, second: FourierGaussCharFn) -> FourierGaussCharFn:
    """Product measure on ``R^(d1+d2) x (F1 + F2)``."""
    d1, d2 = first.real_dim, second.real_dim
    if d1 + d2 > 2:
        raise DomainError("real dimension of a product may not exceed 2")
    F = FiniteAbelianGroup(first.finite.moduli + second.finite.moduli)
    terms = []
    n2 = second.finite.order
    for idx in range(F.order):
        i, j = divmod(idx, n2)
        tl = []
        for a in first.terms[i]:
            for b in second.terms[j]:
                A = np.zeros((d1 + d2, d1 + d2))
                A[:d1, :d1] = a.A
                A[d1:, d1:] = b.A
                tl.append(GaussTerm(a.coef * b.coef, A, np.concatenate([a.b, b.b])))
        terms.append(tuple(tl))
    return FourierGaussCharFn(RealExtGroup(d1 + d2, F), tuple(terms),
                              first.validated and second.validated)


def gauss_times_finite(sigma: float, omega: FiniteDist, t: float = 0.0, g=None) -> FourierGaussCharFn:
    """``gamma * omega * E_(t, g)`` on ``R x F`` with ``gamma^(s) = exp(-sigma s^2)``."""
    mu = product_measure(real_gaussian(sigma), finite_as_char_fn(omega))
    return mu.shifted([t], g)


def remark31_family(sigma: float, sigma_prime: float, kappa: float) -> FourierGaussCharFn:
    """On ``R x Z(2)``: ``c(s, 0) = exp(-sigma s^2)``, ``c(s, 1) = kappa exp(-sigma' s^2)``.

    Requires ``0 < sigma' < sigma`` and ``0 < |kappa| <= sqrt(sigma'/sigma)``; the
    coset densities are additionally checked for nonnegativity on a grid.
    """
    if not (0 < sigma_prime < sigma):
        raise DomainError(f"need 0 < sigma' < sigma, got sigma={sigma}, sigma'={sigma_prime}")
    if kappa == 0:
        raise DomainError("kappa = 0 gives a vanishing characteristic function")
    bound = math.sqrt(sigma_prime / sigma)
    if abs(kappa) > bound * (1 + 1e-15):
        raise DomainError(f"|kappa| = {abs(kappa)} exceeds sqrt(sigma'/sigma) = {bound}")
    group = real_ext_group(1, (2,))
    zb = np.zeros(1)
    terms = (
        (GaussTerm(1.0 + 0j, np.array([[sigma]]), zb),),
        (GaussTerm(complex(kappa), np.array([[sigma_prime]]), zb),),
    )
    return FourierGaussCharFn(group, terms, label="remark31").validate()


# --------------------------------------------------------------------------- solenoid


@dataclass(frozen=True)
class SolenoidGaussCharFn:
    """``r -> (z_t, r) exp(-sigma r^2)`` on ``H_a``; ``z_t`` is the image of ``t`` in the solenoid."""

    t: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError("sigma must be nonnegative")

    def evaluate(self, r) -> np.ndarray:
        r = np.asarray([float(x.value) if isinstance(x, SolenoidDualElement) else float(x)
                        for x in np.atleast_1d(r)])
        return np.exp(2j * np.pi * r * self.t - self.sigma * r * r)

    def __call__(self, r) -> complex:
        return complex(self.evaluate([r])[0])

    def __mul__(self, other: "SolenoidGaussCharFn") -> "SolenoidGaussCharFn":
        return SolenoidGaussCharFn(self.t + other.t, self.sigma + other.sigma)


# --------------------------------------------------------------------------- checks


def _pd_violation(cu: np.ndarray, cv: np.ndarray, cuv: np.ndarray) -> np.ndarray:
    return np.abs(cu - cv) ** 2 - 2.0 * (1.0 - cuv.real)


def pd_inequality_check(cf, points=None, tol: float = PD_TOL) -> bool:
    """``|c(u) - c(v)|^2 <= 2 (1 - Re c(u - v))`` on all pairs of sample points.

    ``points``: for finite characteristic functions, character indices (default:
    all); for ``R^d x F``, a pair ``(S, H)`` of real coordinates and character
    indices (default: a 33-point grid on [-4, 4] per axis times all characters);
    for the solenoid, rationals.
    """
    return pd_max_violation(cf, points) <= tol


def pd_max_violation(cf, points=None) -> float:
    if isinstance(cf, FiniteCharFn):
        idx = np.arange(cf.dual.order) if points is None else np.asarray(points, dtype=np.int64)
        diff = cf.dual.addition_table[np.ix_(idx, cf.dual.negation_table[idx])]
        v = cf.values
        return float(np.max(_pd_violation(v[idx][:, None], v[idx][None, :], v[diff])))
    if isinstance(cf, FourierGaussCharFn):
        d = cf.real_dim
        F = cf.finite
        if points is None:
            axis = np.linspace(-4, 4, 33) if d == 1 else np.linspace(-4, 4, 9)
            if d == 0:
                S = np.zeros((F.order, 0))
                H = np.arange(F.order)
            else:
                mesh = np.meshgrid(*([axis] * d), np.arange(F.order), indexing="ij")
                S = np.stack([m.reshape(-1) for m in mesh[:d]], axis=1).astype(float)
                H = mesh[d].reshape(-1).astype(np.int64)
        else:
            S, H = points
            S = np.asarray(S, dtype=float).reshape(-1, d)
            H = np.asarray(H, dtype=np.int64).reshape(-1)
        cvals = cf.evaluate(S, H)
        n = len(H)
        iu, iv = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        iu, iv = iu.reshape(-1), iv.reshape(-1)
        Sd = S[iu] - S[iv]
        Hd = F.addition_table[H[iu], F.negation_table[H[iv]]]
        cuv = cf.evaluate(Sd, Hd)
        return float(np.max(_pd_violation(cvals[iu], cvals[iv], cuv)))
    if isinstance(cf, SolenoidGaussCharFn):
        if points is None:
            raise DomainError("solenoid checks need explicit dual points")
        r = np.array([float(x.value) if isinstance(x, SolenoidDualElement) else float(x)
                      for x in points])
        c = cf.evaluate(r)
        cuv = cf.evaluate((r[:, None] - r[None, :]).reshape(-1)).reshape(len(r), len(r))
        return float(np.max(_pd_violation(c[:, None], c[None, :], cuv)))
    raise DomainError(f"unsupported characteristic function type {type(cf).__name__}")


# --------------------------------------------------------------------------- sampling


def split_counts(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _sample_finite(mu: FiniteDist, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(mu.group.order, size=n, p=mu.probs)


def _sample_mixture(mix, n: int, rng: np.random.Generator, d: int) -> np.ndarray:
    """Draw ``n`` points from a signed Gaussian mixture with nonnegative total density."""
    pos = [(w, A, b) for w, A, b in mix if w > 0]
    if not pos:
        raise DomainError("coset has no positive component to sample from")
    wpos = np.array([w for w, _, _ in pos])
    has_negative = any(w < 0 for w, _, _ in mix)
    out = np.empty((0, d))
    while out.shape[0] < n:
        need = n - out.shape[0]
        batch = max(need * 2 if has_negative else need, 64)
        comp = rng.choice(len(pos), size=batch, p=wpos / wpos.sum())
        pts = np.empty((batch, d))
        for k, (_, A, b) in enumerate(pos):
            m = comp == k
            if m.any():
                pts[m] = rng.multivariate_normal(b, 2.0 * A, size=int(m.sum()),
                                                 method="eigh") if d else np.empty((int(m.sum()), 0))
        if has_negative:
            target = mixture_density(mix, pts)
            proposal = mixture_density(pos, pts)
            accept = rng.random(batch) * proposal <= target
            pts = pts[accept]
        out = np.concatenate([out, pts[:need]])
    return out


def _sample_real_ext(cf: FourierGaussCharFn, n: int, rng: np.random.Generator):
    mixtures = cf.coset_mixtures()
    masses = np.clip(np.array([sum(w for w, _, _ in m) for m in mixtures]), 0.0, None)
    masses /= masses.sum()
    cosets = rng.choice(len(mixtures), size=n, p=masses)
    t = np.zeros((n, cf.real_dim))
    for gi in np.unique(cosets):
        m = cosets == gi
        t[m] = _sample_mixture(mixtures[gi], int(m.sum()), rng, cf.real_dim)
    return t, cosets


def sample(dist, n: int, seed=0, workers: int = 1):
    """Draw ``n`` i.i.d. samples.

    Returns element indices for a ``FiniteDist`` and a pair ``(t, g)`` (real
    coordinates, finite-part indices) for a validated ``FourierGaussCharFn``.
    Each worker gets its own child seed; output depends only on ``(seed, workers)``.
    """
    if isinstance(dist, FourierGaussCharFn) and not dist.validated:
        raise DomainError("refusing to sample from an unvalidated characteristic function")
    if not isinstance(dist, (FiniteDist, FourierGaussCharFn)):
        raise DomainError(f"cannot sample from {type(dist).__name__}")
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = seq.spawn(workers)
    counts = split_counts(n, workers)

    def draw(i):
        rng = np.random.default_rng(children[i])
        if isinstance(dist, FiniteDist):
            return _sample_finite(dist, counts[i], rng)
        return _sample_real_ext(dist, counts[i], rng)

    if workers == 1:
        parts = [draw(0)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(draw, range(workers)))
    if isinstance(dist, FiniteDist):
        return np.concatenate(parts)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def empirical_char_fn(samples, s, h, finite: FiniteAbelianGroup) -> complex:
    """Empirical ``E[(x, (s, h))]`` from ``(t, g)`` samples on ``R^d x F``."""
    t, g = samples
    s = np.atleast_1d(np.asarray(s, dtype=float))
    phase = finite.pairing_matrix()[g, h]
    return complex(np.mean(np.exp(1j * (t @ s)) * phase))
