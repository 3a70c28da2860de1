"""Proof-side machinery: finite differences, polynomial tests, the P/Q functionals,
support localization, the quadratic functional equation, and the factorization
``mu = gamma * omega * E_x`` of a characteristic function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .checks import GridSpec
from .distributions import (FiniteCharFn, FiniteDist, FourierGaussCharFn, dft, inverse_dft,
                            symmetrize)
from .errors import DomainError, StructuralError
from .groups import (FiniteAbelianGroup, Homomorphism, Subgroup, adjoint, annihilator,
                     multiples, two_torsion)

POLY_TOL = 1e-9
SUPPORT_TOL = 1e-12
DECOMPOSE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DualFunction:
    """A complex function on a finite dual, stored by character index."""

    dual: FiniteAbelianGroup
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.dual.order,):
            raise StructuralError(f"expected {self.dual.order} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    def __call__(self, y):
        return self.values[self.dual.index(y)]

    def __add__(self, other: "DualFunction") -> "DualFunction":
        return DualFunction(self.dual, self.values + other.values)

    def __sub__(self, other: "DualFunction") -> "DualFunction":
        return DualFunction(self.dual, self.values - other.values)

    def __rmul__(self, k) -> "DualFunction":
        return DualFunction(self.dual, k * self.values)

    def compose(self, f: Homomorphism) -> "DualFunction":
        """``y -> self(f y)``."""
        return DualFunction(self.dual, self.values[f.table])

    def is_constant(self, tol: float = POLY_TOL) -> bool:
        return bool(np.max(np.abs(self.values - self.values[0])) <= tol)


def finite_difference(f: DualFunction, h) -> DualFunction:
    """``(Delta_h f)(y) = f(y + h) - f(y)``; ``h`` is a character or its index."""
    hi = h if isinstance(h, (int, np.integer)) else f.dual.index(h)
    return DualFunction(f.dual, f.values[f.dual.addition_table[:, hi]] - f.values)


def _iterated_difference(values: np.ndarray, table: np.ndarray, hi: int, n: int) -> np.ndarray:
    out = values
    for _ in range(n):
        out = out[table[:, hi]] - out
    return out


def is_polynomial(f: DualFunction, n: int, tol: float = POLY_TOL) -> bool:
    """Whether ``Delta_h^n f = 0`` for every ``h`` (exhaustive)."""
    if n < 1:
        raise DomainError("degree witness must be a positive integer")
    return max_difference_residual(f, n) <= tol


def max_difference_residual(f: DualFunction, n: int, steps: Subgroup | None = None,
                            points: Subgroup | None = None) -> float:
    """``max |Delta_h^n f(y)|`` over ``h`` in ``steps`` and ``y`` in ``points`` (default: all)."""
    table = f.dual.addition_table
    hs = np.arange(f.dual.order) if steps is None else steps.indices
    ys = np.arange(f.dual.order) if points is None else points.indices
    worst = 0.0
    for hi in hs:
        d = _iterated_difference(f.values, table, int(hi), n)
        worst = max(worst, float(np.max(np.abs(d[ys]))))
    return worst


def psi_from(nu_hat: FiniteCharFn, tol: float = 1e-12) -> DualFunction:
    """``psi = -log nu^`` for a characteristic function with values in (0, 1]."""
    v = nu_hat.values
    if np.max(np.abs(v.imag)) > tol or v.real.min() <= 0 or v.real.max() > 1 + tol:
        raise DomainError("psi needs a real characteristic function with values in (0, 1]")
    # nu^ <= 1 forces psi >= 0
    return DualFunction(nu_hat.dual, np.clip(-np.log(np.minimum(v.real, 1.0)), 0.0, None))


def build_PQ(psi1: DualFunction, psi2: DualFunction,
             alpha_tilde: Homomorphism) -> tuple[DualFunction, DualFunction]:
    """``P(y) = psi1((I+a)y) + psi2(2a y)`` and ``Q(y) = psi1(2y) + psi2((I+a)y)``."""
    Y = psi1.dual
    if psi2.dual != Y or alpha_tilde.source != Y:
        raise StructuralError("psi functions and alpha~ must share one dual group")
    ipa = Homomorphism.identity(Y) + alpha_tilde
    two_a = Homomorphism.scalar(Y, 2) @ alpha_tilde
    two = Homomorphism.scalar(Y, 2)
    P = psi1.compose(ipa) + psi2.compose(two_a)
    Q = psi1.compose(two) + psi2.compose(ipa)
    return P, Q


@dataclass
class PQVerification:
    p_residual: float
    q_residual: float
    holds: bool


def verify_PQ_cubic(P: DualFunction, Q: DualFunction, tol: float = POLY_TOL,
                    all_points: bool = True) -> PQVerification:
    """``Delta_h^3 P = Delta_h^3 Q = 0`` for ``h`` in ``Y^(2)``, exhaustively.

    ``y`` runs over all of ``Y`` by default, a superset of ``Y^(2)``; pass
    ``all_points=False`` to restrict ``y`` to ``Y^(2)`` as well.
    """
    Y2 = multiples(P.dual, 2)
    pts = None if all_points else Y2
    rp = max_difference_residual(P, 3, Y2, pts)
    rq = max_difference_residual(Q, 3, Y2, pts)
    return PQVerification(rp, rq, rp <= tol and rq <= tol)


@dataclass
class PipelineReport:
    """Outcome of replaying the finite-group argument on a concrete pair."""

    pq: PQVerification
    psi_zero_on_y2: tuple[float, float]
    support_in_torsion: tuple[bool, bool]


def proof_pipeline(mu1: FiniteDist, mu2: FiniteDist, alpha: Homomorphism) -> PipelineReport:
    """Symmetrize, take ``psi_j = -log |mu_j^|^2``, build P and Q, and check their
    cubic differences on ``Y^(2)``, then localize the supports of ``nu_j``."""
    at = adjoint(alpha)
    nus = [symmetrize(mu1), symmetrize(mu2)]
    nu_hats = [dft(n) for n in nus]
    psis = [psi_from(c) for c in nu_hats]
    P, Q = build_PQ(psis[0], psis[1], at)
    pq = verify_PQ_cubic(P, Q)
    Y2 = multiples(mu1.group.dual, 2)
    zero = tuple(float(np.max(np.abs(p.values[Y2.indices]))) for p in psis)
    supp = tuple(support_localize(n, Y2) for n in nus)
    return PipelineReport(pq, zero, supp)


def support_localize(mu: FiniteDist, H: Subgroup, tol: float = SUPPORT_TOL) -> bool:
    """True iff ``mu^ = 1`` on ``H``; then ``supp(mu)`` is confirmed to lie in ``A(X, H)``."""
    c = dft(mu).values
    if np.max(np.abs(c[H.indices] - 1.0)) > tol:
        return False
    ann = annihilator(mu.group, H)
    outside = np.setdiff1d(mu.support(tol), ann.indices)
    if outside.size:
        raise AssertionError(
            f"characteristic function is 1 on H but mass sits outside A(X, H): {outside.tolist()}"
        )
    return True


def gaussian_phi_residual(phi) -> float:
    """Max residual of ``phi(u+v) + phi(u-v) - 2 (phi(u) + phi(v))``."""
    Y = phi.dual
    T, N = Y.addition_table, Y.negation_table
    v = phi.values
    res = v[T] + v[T[:, N]] - 2.0 * (v[:, None] + v[None, :])
    return float(np.max(np.abs(res)))


def gaussian_phi_check(phi, grid: GridSpec | None = None, tol: float = POLY_TOL) -> bool:
    """The quadratic functional equation, exhaustively on a finite dual or on a real grid.

    ``phi`` is a ``DualFunction`` or a vectorized callable on ``R``.
    """
    if isinstance(phi, DualFunction):
        if np.iscomplexobj(phi.values) and np.max(np.abs(phi.values.imag)) > tol:
            raise DomainError("phi must be real valued")
        return gaussian_phi_residual(phi) <= tol
    grid = grid or GridSpec()
    s = grid.axis()
    u, v = np.meshgrid(s, s, indexing="ij")
    res = phi(u + v) + phi(u - v) - 2.0 * (phi(u) + phi(v))
    return bool(np.max(np.abs(res)) <= tol)


def quadratic_solution_dimension(group: FiniteAbelianGroup) -> int:
    """Dimension of the space of real ``phi`` solving the quadratic functional equation.

    Every equation is linear in the values of ``phi``; the solution space is the
    null space of the stacked system.
    """
    n = group.order
    T, N = group.addition_table, group.negation_table
    rows = []
    for u in range(n):
        for v in range(n):
            r = np.zeros(n)
            r[T[u, v]] += 1
            r[T[u, N[v]]] += 1
            r[u] -= 2
            r[v] -= 2
            rows.append(r)
    return n - int(np.linalg.matrix_rank(np.array(rows)))


# --------------------------------------------------------------------------- decomposition


@dataclass
class Decomposition:
    success: bool
    failed_step: str | None
    sigma: float | None = None
    b: float | None = None
    omega_hat: np.ndarray | None = None
    shift: dict | None = None
    certificate: dict = field(default_factory=dict)

    def synthesize(self, cf: FourierGaussCharFn, s, h) -> np.ndarray:
        """``exp(-sigma s^2 + i b s) omega^(h) (g0, h)`` at the given points."""
        if not self.success:
            raise DomainError("nothing to synthesize: decomposition failed")
        s = np.asarray(s, dtype=float).reshape(-1)
        h = np.asarray(h, dtype=np.int64).reshape(-1)
        F = cf.finite
        phase = F.pairing_matrix()[F.index(self.shift["g"]), h]
        return np.exp(-self.sigma * s * s + 1j * self.b * s) * self.omega_hat[h] * phase


def _fit_real_part(s: np.ndarray, c0: np.ndarray):
    mask = np.abs(c0) > 1e-12
    if mask.sum() < 3:
        raise DomainError("c(s, 0) vanishes on the grid; cannot fit the Gaussian factor")
    ss, cc = s[mask], c0[mask]
    design = np.stack([np.ones_like(ss), -ss * ss], axis=1)
    logmod = np.log(np.abs(cc))
    (icept, sigma), *_ = np.linalg.lstsq(design, logmod, rcond=None)
    mod_res = float(np.max(np.abs(design @ [icept, sigma] - logmod)))
    order = np.argsort(ss)
    phase = np.unwrap(np.angle(cc[order]))
    design_p = np.stack([np.ones_like(ss), ss[order]], axis=1)
    (p0, b), *_ = np.linalg.lstsq(design_p, phase, rcond=None)
    phase_res = float(np.max(np.abs(design_p @ [p0, b] - phase)))
    return float(sigma), float(b), {
        "log_modulus_residual": mod_res,
        "log_modulus_intercept": float(abs(icept)),
        "phase_residual": phase_res,
        # unwrapping starts at the grid's left end, so the intercept is only fixed mod 2 pi
        "phase_intercept": float(abs(np.angle(np.exp(1j * p0)))),
    }


def _omega_candidates(F: FiniteAbelianGroup, raw: np.ndarray, G: Subgroup, tol: float):
    """Try every finite shift ``g0``; yield ``(g0 index, omega^, residuals)``."""
    P = F.pairing_matrix()
    ann = annihilator(F.dual, G)
    # characters equal modulo A(H, G) must agree for omega to live on G
    cosets = F.addition_table[:, ann.indices]
    outside = np.setdiff1d(np.arange(F.order), G.indices)
    for gi in range(F.order):
        w_hat = np.conj(P[gi]) * raw
        w = inverse_dft(FiniteCharFn(F, w_hat))
        res = {
            "omega_hat_imag": float(np.max(np.abs(w_hat.imag))),
            "coset_constancy": float(np.max(np.abs(w_hat[cosets] - w_hat[:, None]))),
            "omega_imag": float(np.max(np.abs(w.imag))),
            "omega_negativity": float(max(0.0, -w.real.min())),
            "mass_outside_G": float(np.abs(w[outside]).sum()) if outside.size else 0.0,
        }
        yield gi, w_hat, w, res


def decompose(cf, G: Subgroup | str | None = "auto", grid: GridSpec = GridSpec(),
              tol: float = DECOMPOSE_TOL) -> Decomposition:
    """Try to write ``cf`` as ``exp(-sigma s^2 + i b s) omega^(h) (g0, h)`` with
    ``omega`` a probability measure on ``G``.

    Steps: (a) fit ``sigma, b`` from ``cf(s, 0)``; (b) read ``omega^(h)`` off
    ``cf(0, h)``; (c) check the product form on the whole grid; (d) find a shift
    ``g0`` making ``omega`` a measure carried by ``G``.  The certificate holds the
    residual of every step that ran.  On ``R^2`` the second real coordinate plays
    the role of the character ``h`` and ``G = {0}``.
    """
    if isinstance(cf, FiniteCharFn):
        return _decompose_finite(cf, G, tol)
    if not isinstance(cf, FourierGaussCharFn):
        raise DomainError(f"cannot decompose {type(cf).__name__}")
    if cf.real_dim == 2:
        return _decompose_plane(cf, grid, tol)
    if cf.real_dim != 1:
        raise DomainError("decompose needs a real factor of dimension 1 or 2")
    F = cf.finite
    G = two_torsion(F) if G in ("auto", None) else G
    s = grid.axis()
    cert: dict = {}
    sigma, b, fit = _fit_real_part(s, cf.evaluate(s, np.zeros(s.size, dtype=np.int64)))
    cert["a_fit"] = fit
    if max(fit.values()) > tol:
        return Decomposition(False, "a", sigma, b, certificate=cert)
    raw = cf.evaluate(np.zeros(F.order), np.arange(F.order))
    cert["b_omega_hat_at_0"] = float(abs(raw[0] - 1.0))
    S = np.repeat(s, F.order)
    H = np.tile(np.arange(F.order), s.size)
    model = np.exp(-sigma * S * S + 1j * b * S) * raw[H]
    prod_res = float(np.max(np.abs(cf.evaluate(S, H) - model)))
    cert["c_product_form"] = prod_res
    if prod_res > tol:
        return Decomposition(False, "c", sigma, b, certificate=cert)
    return _finish(F, raw, G, tol, sigma, b, cert)


def _finish(F, raw, G, tol, sigma, b, cert) -> Decomposition:
    best = None
    for gi, w_hat, w, res in _omega_candidates(F, raw, G, tol):
        score = max(res.values())
        if best is None or score < best[0]:
            best = (score, gi, w_hat, w, res)
        if score <= tol:
            break
    score, gi, w_hat, w, res = best
    cert["d_omega_on_G"] = res
    g0 = tuple(int(c) for c in F.elements()[gi])
    # coset-constancy and direct support must agree
    cert["d_criteria_agree"] = (res["coset_constancy"] <= tol) == (
        res["mass_outside_G"] <= tol and res["omega_imag"] <= tol)
    ok = score <= tol
    return Decomposition(ok, None if ok else "d", sigma, b,
                         omega_hat=w_hat.real.copy() if ok else w_hat,
                         shift={"t": b, "g": g0}, certificate=cert)


def _decompose_finite(cf: FiniteCharFn, G, tol) -> Decomposition:
    F = cf.dual
    G = two_torsion(F) if G in ("auto", None) else G
    cert = {"a_fit": "no real factor", "c_product_form": 0.0}
    return _finish(F, cf.values.copy(), G, tol, 0.0, 0.0, cert)


def _decompose_plane(cf: FourierGaussCharFn, grid: GridSpec, tol) -> Decomposition:
    if cf.finite.order != 1:
        raise DomainError("on R^2 the finite part must be trivial")
    s = grid.axis()
    cert: dict = {}
    zeros = np.zeros(s.size)
    c0 = cf.evaluate(np.stack([s, zeros], axis=1), np.zeros(s.size, dtype=np.int64))
    sigma, b, fit = _fit_real_part(s, c0)
    cert["a_fit"] = fit
    if max(fit.values()) > tol:
        return Decomposition(False, "a", sigma, b, certificate=cert)
    S1, S2 = np.meshgrid(s, s, indexing="ij")
    pts = np.stack([S1.reshape(-1), S2.reshape(-1)], axis=1)
    zero_h = np.zeros(len(pts), dtype=np.int64)
    full = cf.evaluate(pts, zero_h)
    second = cf.evaluate(np.stack([zeros, s], axis=1), np.zeros(s.size, dtype=np.int64))
    model = np.exp(-sigma * S1 * S1 + 1j * b * S1).reshape(-1) * np.tile(second, s.size)
    prod_res = float(np.max(np.abs(full - model)))
    cert["c_product_form"] = prod_res
    # mixed second difference of log c isolates the cross term -2 A12 s h
    tiny = np.abs(full) > 1e-300
    mixed = (np.log(full[tiny]) - np.log(np.repeat(c0, s.size)[tiny])
             - np.log(np.tile(second, s.size)[tiny])).real
    sh = (S1 * S2).reshape(-1)[tiny]
    coef = float(np.dot(mixed, sh) / np.dot(sh, sh)) if np.dot(sh, sh) else 0.0
    cert["cross_term"] = -coef / 2.0
    if prod_res > tol:
        return Decomposition(False, "c", sigma, b, certificate=cert)
    # G = {0}: omega must be E_0, i.e. c(0, h) == 1
    dev = float(np.max(np.abs(second - 1.0)))
    cert["d_omega_on_G"] = {"omega_hat_deviation_from_1": dev}
    ok = dev <= tol
    return Decomposition(ok, None if ok else "d", sigma, b, certificate=cert)


def real_psi(cf: FourierGaussCharFn, h: int = 0) -> Callable[[np.ndarray], np.ndarray]:
    """``s -> -log |cf(s, h)|^2`` as a vectorized callable."""
    def psi(s):
        s = np.asarray(s, dtype=float)
        v = cf.evaluate(s.reshape(-1, 1), np.full(s.size, h))
        return (-np.log(np.abs(v) ** 2)).reshape(s.shape)
    return psi
