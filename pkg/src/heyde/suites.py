"""Composite, seeded checks used by scenarios and the acceptance tests.

Each suite takes ``(scenario, check table, SeedSequence, tolerances)`` and returns a
dict with ``verdict``, an optional ``residual`` and free-form details.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .checks import (RealExtAutomorphism, conditional_symmetry_exact, eq2_exact, eq2_grid,
                     eq5_check)
from .distributions import dft, gauss_times_finite
from .errors import DomainError
from .extended import SolenoidSpec, adic_truncation
from .fuzz import (eq2_passing_instance, random_automorphism, random_dist, random_instance,
                   torsion_solution_pair)
from .groups import FiniteAbelianGroup, adjoint
from .structure import (DualFunction, decompose, gaussian_phi_check, is_polynomial,
                        proof_pipeline, quadratic_solution_dimension)

ROUNDTRIP_GROUPS = ((2,), (2, 2), (2, 3))


def lemma21_fuzz(sc, chk, seed, tol, count: int | None = None) -> dict:
    """eq2 versus exact conditional symmetry on random instances, plus eq2 => eq5."""
    rng = np.random.default_rng(seed)
    count = int(chk.get("count", 100) if count is None else count)
    max_order = int(chk.get("max_order", 64))
    agree = eq2_true = eq5_fail = 0
    disagreements = []
    cats = Counter()
    for i in range(count):
        inst = random_instance(rng, max_order)
        cats[inst.category] += 1
        c1, c2 = dft(inst.mu1), dft(inst.mu2)
        at = adjoint(inst.alpha)
        e2 = eq2_exact(c1, c2, at, tol["exact"]).holds
        cs = conditional_symmetry_exact(inst.mu1, inst.mu2, inst.alpha, tol["joint"])
        if e2 == cs:
            agree += 1
        else:
            disagreements.append({"instance": i, "moduli": inst.group.moduli,
                                  "category": inst.category, "eq2": e2, "cond_sym": cs})
        if e2:
            eq2_true += 1
            if not eq5_check(c1, c2, at, tol=tol["exact"]).holds:
                eq5_fail += 1
    return {"verdict": agree == count and eq5_fail == 0, "agreement": f"{agree}/{count}",
            "eq2_true": eq2_true, "eq5_implication_failures": eq5_fail,
            "categories": dict(sorted(cats.items())), "disagreements": disagreements}


def pq_pipeline(sc, chk, seed, tol) -> dict:
    """Cubic differences of P and Q vanish on Y^(2) for eq2-passing instances."""
    rng = np.random.default_rng(seed)
    count = int(chk.get("count", 20))
    max_order = int(chk.get("max_order", 64))
    worst = 0.0
    ok = True
    eq2_ok = True
    for _ in range(count):
        inst = eq2_passing_instance(rng, max_order)
        eq2_ok &= eq2_exact(dft(inst.mu1), dft(inst.mu2), adjoint(inst.alpha), tol["exact"]).holds
        rep = proof_pipeline(inst.mu1, inst.mu2, inst.alpha)
        worst = max(worst, rep.pq.p_residual, rep.pq.q_residual)
        ok &= rep.pq.holds and all(rep.support_in_torsion)
    return {"verdict": bool(ok and eq2_ok and worst < tol["exact"]), "residual": worst,
            "instances": count, "all_eq2": bool(eq2_ok)}


def lemma24_polynomials(sc, chk, seed, tol) -> dict:
    """Random non-constant functions on Z(n) are not polynomials; constants are."""
    rng = np.random.default_rng(seed)
    count = int(chk.get("count", 50))
    max_n = int(chk.get("max_n", 12))
    degrees = [int(k) for k in chk.get("degrees", [1, 2, 3, 4])]
    false_positives = []
    const_failures = 0
    for i in range(count):
        n = int(rng.integers(2, max_n + 1))
        Y = FiniteAbelianGroup([n])
        vals = rng.normal(size=n)
        while np.ptp(vals) < 1e-6:
            vals = rng.normal(size=n)
        f = DualFunction(Y, vals)
        c = DualFunction(Y, np.full(n, float(rng.normal())))
        for k in degrees:
            if is_polynomial(f, k):
                false_positives.append({"instance": i, "n": n, "degree": k})
            if not is_polynomial(c, k):
                const_failures += 1
    return {"verdict": not false_positives and const_failures == 0, "functions": count,
            "degrees": degrees, "false_positives": false_positives,
            "constant_failures": const_failures}


def gaussian_phi_degeneracy(sc, chk, seed, tol) -> dict:
    """Only phi = 0 solves the quadratic functional equation on Z(n)."""
    rng = np.random.default_rng(seed)
    max_n = int(chk.get("max_n", 12))
    nullities = {}
    ok = True
    for n in range(1, max_n + 1):
        Y = FiniteAbelianGroup([n] if n > 1 else [])
        nullities[n] = quadratic_solution_dimension(Y)
        zero_ok = gaussian_phi_check(DualFunction(Y, np.zeros(Y.order)))
        nonzero = DualFunction(Y, rng.normal(size=Y.order))
        ok &= nullities[n] == 0 and zero_ok and not gaussian_phi_check(nonzero)
    return {"verdict": bool(ok), "nullity": nullities}


def roundtrip_instance(rng: np.random.Generator, moduli):
    """A sharpness-construction pair ``gamma_j * omega_j * E_(t_j, g_j)`` on ``R x F`` plus its alpha."""
    F = FiniteAbelianGroup(moduli)
    alpha_G = random_automorphism(rng, F)
    a = -float(rng.uniform(0.5, 3.0))
    sigma2 = float(rng.uniform(0.2, 2.0))
    sigma1 = -a * sigma2
    t2 = float(rng.uniform(-1.0, 1.0))
    t1 = -a * t2
    f1, f2 = torsion_solution_pair(rng, F, alpha_G)
    mu1 = gauss_times_finite(sigma1, f1, t1)
    mu2 = gauss_times_finite(sigma2, f2, t2)
    return mu1, mu2, RealExtAutomorphism.scalar(a, alpha_G), (sigma1, sigma2)


def theorem21_roundtrip(sc, chk, seed, tol) -> dict:
    """Constructed pairs pass eq2 and are recovered by decompose."""
    rng = np.random.default_rng(seed)
    count = int(chk.get("count", 25))
    worst_eq2 = worst_sigma = worst_synth = 0.0
    failures = []
    grid = sc.grid
    s = grid.axis()
    for i in range(count):
        moduli = ROUNDTRIP_GROUPS[i % len(ROUNDTRIP_GROUPS)]
        mu1, mu2, alpha, sigmas = roundtrip_instance(rng, moduli)
        r = eq2_grid(mu1, mu2, alpha, grid, tol["grid"])
        worst_eq2 = max(worst_eq2, r.max_residual)
        for mu, sig in ((mu1, sigmas[0]), (mu2, sigmas[1])):
            d = decompose(mu, "auto", grid, tol["decompose"])
            if not d.success:
                failures.append({"instance": i, "moduli": moduli, "failed_step": d.failed_step})
                continue
            worst_sigma = max(worst_sigma, abs(d.sigma - sig))
            S = np.repeat(s, mu.finite.order)
            H = np.tile(np.arange(mu.finite.order), s.size)
            worst_synth = max(worst_synth,
                              float(np.max(np.abs(d.synthesize(mu, S, H) - mu.evaluate(S, H)))))
        if not r.holds:
            failures.append({"instance": i, "moduli": moduli, "eq2_residual": r.max_residual})
    ok = not failures and worst_sigma < 1e-9 and worst_synth < tol["decompose"]
    return {"verdict": bool(ok), "residual": worst_eq2, "sigma_error": worst_sigma,
            "synthesis_residual": worst_synth, "failures": failures, "instances": count}


def prop21_adic(sc, chk, seed, tol) -> dict:
    """On truncations Z(a_0..a_{N-1}) of the a-adic integers: pairs solving eq2 under an
    alpha with Ker(I+alpha) = 0 decompose as ``omega * E_x``."""
    if not isinstance(sc.group, SolenoidSpec):
        raise DomainError("prop21_adic needs a solenoid_dual group to truncate")
    rng = np.random.default_rng(seed)
    levels = [int(n) for n in chk.get("levels", [1, 2, 3])]
    per_level = []
    ok = True
    for N in levels:
        F = adic_truncation(sc.group, N)
        try:
            alpha = random_automorphism(rng, F, condition1=True)
        except ValueError:
            per_level.append({"level": N, "order": F.order, "condition1_available": False})
            ok = False
            continue
        at = adjoint(alpha)
        constructed = decomposed = random_eq2 = random_decomposed = 0
        for _ in range(10):
            mu1, mu2 = torsion_solution_pair(rng, F, alpha)
            constructed += eq2_exact(dft(mu1), dft(mu2), at, tol["exact"]).holds
            decomposed += all(decompose(dft(m), "auto", tol=tol["decompose"]).success
                              for m in (mu1, mu2))
            r1, r2 = random_dist(rng, F, 0.5), random_dist(rng, F, 0.5)
            if eq2_exact(dft(r1), dft(r2), at, tol["exact"]).holds:
                random_eq2 += 1
                random_decomposed += all(decompose(dft(m), "auto", tol=tol["decompose"]).success
                                         for m in (r1, r2))
        level_ok = constructed == 10 and decomposed == 10 and random_decomposed == random_eq2
        ok &= level_ok
        per_level.append({"level": N, "order": F.order, "alpha": alpha.array.tolist(),
                          "constructed_eq2": constructed, "constructed_decomposed": decomposed,
                          "random_eq2": random_eq2, "random_decomposed": random_decomposed})
    return {"verdict": bool(ok), "levels": per_level}


__all__ = ["lemma21_fuzz", "pq_pipeline", "lemma24_polynomials", "gaussian_phi_degeneracy",
           "theorem21_roundtrip", "prop21_adic", "roundtrip_instance"]
