"""Declarative scenarios: parse, validate, build objects, run checks, collect a report.

Scenario files are TOML with ``schema = 1``.  Unknown keys are rejected.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .checks import (EXACT_TOL, GRID_TOL, JOINT_TOL, MC_LEVEL, GridSpec, RealExtAutomorphism,
                     conditional_symmetry_exact, conditional_symmetry_mc, eq2_exact, eq2_grid,
                     eq5_check)
from .distributions import (PD_TOL, FiniteDist, convolve, FourierGaussCharFn, SolenoidGaussCharFn,
                            VanishingCharacteristicFunction, dft, finite_as_char_fn,
                            pd_max_violation, product_measure, quad_gauss, real_gaussian,
                            remark31_family, shift)
from .errors import CapacityError, HeydeError
from .extended import (RealExtGroup, dual_elements, SolenoidAutomorphism, SolenoidSpec, adic_truncation,
                       ha_quotient_order, kernel_truncation_evidence, solenoid_condition1,
                       solenoid_has_2_torsion)
from .groups import (FiniteAbelianGroup, Homomorphism, Subgroup, adjoint, check_condition1,
                     kernel)
from .structure import DECOMPOSE_TOL, decompose

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "exact": EXACT_TOL,
    "joint": JOINT_TOL,
    "grid": GRID_TOL,
    "decompose": DECOMPOSE_TOL,
    "pd": PD_TOL,
    "mc_level": MC_LEVEL,
}


class ConfigError(HeydeError):
    """The scenario file does not parse or does not validate."""


# --------------------------------------------------------------------------- schema

TOP_KEYS = {"schema", "name", "description", "seed", "group", "automorphism", "distributions",
            "checks", "grid", "tolerances"}
GROUP_KEYS = {
    "finite": {"type", "moduli"},
    "real_ext": {"type", "real_dim", "moduli"},
    "solenoid_dual": {"type", "prefix", "infinite_primes"},
    "adic_truncation": {"type", "prefix", "infinite_primes", "level"},
}
DIST_KEYS = {
    "finite": {"type", "probs", "moduli"},
    "point_mass": {"type", "x", "moduli"},
    "uniform": {"type", "moduli", "subgroup"},
    "gauss": {"type", "sigma", "b"},
    "remark31": {"type", "sigma", "sigma_prime", "kappa"},
    "quad_gauss": {"type", "A", "b"},
    "solenoid_gauss": {"type", "t", "sigma"},
    "product": {"type", "factors"},
    "convolve": {"type", "parts"},
    "shift": {"type", "base", "x", "t"},
}
CHECK_KEYS = {
    "condition1": set(),
    "has_2_torsion": set(),
    "eq2_exact": {"dists"},
    "eq2_grid": {"dists"},
    "eq5": {"dists"},
    "cond_sym_exact": {"dists"},
    "cond_sym_mc": {"dists", "n", "bins"},
    "decompose": {"dist", "torsion", "expect_sigma", "expect_failed_step"},
    "pd_inequality": {"dist"},
    "lemma21_fuzz": {"count", "max_order"},
    "pq_pipeline": {"count", "max_order"},
    "lemma24_polynomials": {"count", "max_n", "degrees"},
    "gaussian_phi_degeneracy": {"max_n"},
    "theorem21_roundtrip": {"count"},
    "prop21_adic": {"levels"},
}
COMMON_CHECK_KEYS = {"kind", "name", "expect", "automorphism"}
GRID_KEYS = {"lo", "hi", "step", "solenoid_level", "solenoid_bound"}


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _check_keys(where: str, table: dict, allowed: set):
    extra = set(table) - allowed
    _require(not extra, f"{where}: unknown key(s) {sorted(extra)}")


# --------------------------------------------------------------------------- model


@dataclass
class Scenario:
    name: str
    description: str
    seed: int
    group: Any
    automorphism: Any
    automorphism_spec: dict
    distributions: dict
    checks: list
    grid: GridSpec
    tolerances: dict
    source: str = ""

    @property
    def group_kind(self) -> str:
        if isinstance(self.group, RealExtGroup):
            return "real_ext"
        if isinstance(self.group, SolenoidSpec):
            return "solenoid_dual"
        return "finite"


@dataclass
class CheckRecord:
    name: str
    kind: str
    verdict: bool
    expected: bool | None
    residual: float | None = None
    p_value: float | None = None
    witness: Any = None
    details: dict = field(default_factory=dict)
    runtime: float = 0.0
    # secondary expectation, e.g. the step at which a decomposition should fail
    side_ok: bool = True

    @property
    def met(self) -> bool:
        return (self.expected is None or self.expected == self.verdict) and self.side_ok


@dataclass
class Report:
    scenario: str
    seed: int
    workers: int
    tolerances: dict
    checks: list
    version: str = __version__

    @property
    def all_met(self) -> bool:
        return all(c.met for c in self.checks)


# --------------------------------------------------------------------------- loading


def bundled_scenarios() -> dict[str, str]:
    """Map of bundled scenario name to TOML text."""
    out = {}
    for entry in resources.files("heyde.scenarios").iterdir():
        if entry.name.endswith(".toml"):
            out[entry.name[:-5]] = entry.read_text()
    return dict(sorted(out.items()))


def read_scenario_text(ref: str) -> tuple[str, str]:
    path = Path(ref)
    if path.exists():
        return path.read_text(), str(path)
    bundled = bundled_scenarios()
    if ref in bundled:
        return bundled[ref], f"<bundled:{ref}>"
    raise ConfigError(f"no scenario file or bundled scenario named {ref!r}")


def load_scenario(ref: str, seed: int | None = None, tolerances: dict | None = None) -> Scenario:
    text, source = read_scenario_text(ref)
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: parse error: {exc}") from exc
    sc = build_scenario(data, seed=seed, tolerances=tolerances)
    sc.source = source
    return sc


def _build_group(spec: dict):
    _require(isinstance(spec, dict) and "type" in spec, "group: a table with a 'type' is required")
    kind = spec["type"]
    _require(kind in GROUP_KEYS, f"group: unknown type {kind!r}")
    _check_keys("group", spec, GROUP_KEYS[kind])
    if kind == "finite":
        return FiniteAbelianGroup(spec.get("moduli", []))
    if kind == "real_ext":
        return RealExtGroup(int(spec.get("real_dim", 1)), FiniteAbelianGroup(spec.get("moduli", [])))
    sol = SolenoidSpec(spec.get("prefix", []), spec.get("infinite_primes", []))
    if kind == "solenoid_dual":
        return sol
    return adic_truncation(sol, int(spec["level"]))


def _finite_part(group) -> FiniteAbelianGroup:
    return group.finite_part if isinstance(group, RealExtGroup) else group


def _build_automorphism(group, spec: dict | None):
    if isinstance(group, SolenoidSpec):
        spec = spec or {"p": 1, "q": 1}
        _check_keys("automorphism", spec, {"p", "q"})
        alpha = SolenoidAutomorphism(int(spec["p"]), int(spec["q"]))
        return alpha
    F = _finite_part(group)
    spec = spec or {}
    if isinstance(group, RealExtGroup):
        _check_keys("automorphism", spec, {"a", "real", "matrix"})
        fin = Homomorphism(F, F, spec["matrix"]) if "matrix" in spec else Homomorphism.identity(F)
        d = group.real_dim
        if "real" in spec:
            real = np.asarray(spec["real"], dtype=float)
        else:
            real = float(spec.get("a", 1.0)) * np.eye(d)
        return RealExtAutomorphism(real.reshape(d, d), fin)
    _check_keys("automorphism", spec, {"matrix"})
    alpha = Homomorphism(F, F, spec["matrix"]) if "matrix" in spec else Homomorphism.identity(F)
    return alpha


class _DistBuilder:
    def __init__(self, group, specs: dict):
        self.group = group
        self.specs = specs
        self.built: dict = {}
        self.stack: list = []

    def get(self, ref):
        if isinstance(ref, dict):
            return self.build("<inline>", ref)
        _require(ref in self.specs, f"distribution reference {ref!r} does not resolve")
        if ref not in self.built:
            _require(ref not in self.stack, f"distribution {ref!r} refers to itself")
            self.stack.append(ref)
            self.built[ref] = self.build(ref, self.specs[ref])
            self.stack.pop()
        return self.built[ref]

    def _finite_group(self, spec):
        if "moduli" in spec:
            return FiniteAbelianGroup(spec["moduli"])
        return _finite_part(self.group)

    def build(self, name: str, spec: dict):
        where = f"distributions.{name}"
        _require(isinstance(spec, dict) and "type" in spec, f"{where}: 'type' is required")
        kind = spec["type"]
        _require(kind in DIST_KEYS, f"{where}: unknown type {kind!r}")
        _check_keys(where, spec, DIST_KEYS[kind])
        real_dim = self.group.real_dim if isinstance(self.group, RealExtGroup) else 0
        embed = isinstance(self.group, RealExtGroup) and "moduli" not in spec
        if kind == "finite":
            d = FiniteDist(self._finite_group(spec), spec["probs"])
            return finite_as_char_fn(d, real_dim) if embed else d
        if kind == "point_mass":
            F = self._finite_group(spec)
            d = FiniteDist.point_mass(F, spec.get("x"))
            return finite_as_char_fn(d, real_dim) if embed else d
        if kind == "uniform":
            F = self._finite_group(spec)
            sub = Subgroup.from_elements(F, spec["subgroup"]) if "subgroup" in spec else None
            d = FiniteDist.uniform(F, sub)
            return finite_as_char_fn(d, real_dim) if embed else d
        if kind == "gauss":
            return real_gaussian(float(spec["sigma"]), float(spec.get("b", 0.0)))
        if kind == "remark31":
            return remark31_family(float(spec["sigma"]), float(spec["sigma_prime"]),
                                   float(spec["kappa"]))
        if kind == "quad_gauss":
            return quad_gauss(spec["A"], spec.get("b"))
        if kind == "solenoid_gauss":
            return SolenoidGaussCharFn(float(spec.get("t", 0.0)), float(spec.get("sigma", 0.0)))
        if kind == "product":
            factors = [finite_as_char_fn(f, 0) if isinstance(f, FiniteDist) else f
                       for f in (self.get(f) for f in spec["factors"])]
            _require(factors, f"{where}: empty factor list")
            out = factors[0]
            for f in factors[1:]:
                out = product_measure(out, f)
            return out
        if kind == "convolve":
            parts = [self.get(p) for p in spec["parts"]]
            _require(parts, f"{where}: empty part list")
            out = parts[0]
            for p in parts[1:]:
                if isinstance(out, FiniteDist):
                    out = convolve(out, p)
                else:
                    out = out * p
            return out
        if kind == "shift":
            base = self.get(spec["base"])
            if isinstance(base, FiniteDist):
                return shift(base, spec["x"])
            if isinstance(base, SolenoidGaussCharFn):
                return SolenoidGaussCharFn(base.t + float(spec.get("t", 0.0)), base.sigma)
            return base.shifted(spec.get("t"), spec.get("x"))
        raise ConfigError(f"{where}: unhandled type {kind!r}")


def _compatible(group, dist) -> bool:
    if isinstance(group, SolenoidSpec):
        return isinstance(dist, SolenoidGaussCharFn)
    if isinstance(group, RealExtGroup):
        return isinstance(dist, FourierGaussCharFn) and dist.group == group
    return isinstance(dist, FiniteDist) and dist.group == group


def build_scenario(data: dict, seed: int | None = None, tolerances: dict | None = None) -> Scenario:
    _check_keys("scenario", data, TOP_KEYS)
    _require(data.get("schema") == SCHEMA_VERSION,
             f"scenario: schema must be {SCHEMA_VERSION}, got {data.get('schema')!r}")
    _require("name" in data, "scenario: 'name' is required")
    try:
        group = _build_group(data.get("group", {"type": "finite", "moduli": []}))
        auto_spec = data.get("automorphism")
        alpha = _build_automorphism(group, auto_spec)
        grid_spec = data.get("grid", {})
        _check_keys("grid", grid_spec, GRID_KEYS)
        grid = GridSpec(**grid_spec)
        tol = dict(DEFAULT_TOLERANCES)
        file_tol = data.get("tolerances", {})
        _check_keys("tolerances", file_tol, set(DEFAULT_TOLERANCES))
        tol.update(file_tol)
        if tolerances:
            _check_keys("--tolerance", tolerances, set(DEFAULT_TOLERANCES))
            tol.update(tolerances)
        builder = _DistBuilder(group, data.get("distributions", {}))
        dists = {name: builder.get(name) for name in data.get("distributions", {})}
        checks = []
        for i, chk in enumerate(data.get("checks", [])):
            where = f"checks[{i}]"
            _require(isinstance(chk, dict) and "kind" in chk, f"{where}: 'kind' is required")
            kind = chk["kind"]
            _require(kind in CHECK_KEYS, f"{where}: unknown kind {kind!r}")
            _check_keys(where, chk, CHECK_KEYS[kind] | COMMON_CHECK_KEYS)
            for ref in chk.get("dists", []) + ([chk["dist"]] if "dist" in chk else []):
                _require(ref in dists, f"{where}: distribution {ref!r} does not resolve")
                _require(_compatible(group, dists[ref]),
                         f"{where}: distribution {ref!r} does not live on the scenario group")
            if kind in ("eq2_exact", "eq2_grid", "eq5", "cond_sym_exact", "cond_sym_mc"):
                _require(len(chk.get("dists", [])) == 2, f"{where}: exactly two 'dists' required")
            if kind in ("decompose", "pd_inequality"):
                _require("dist" in chk, f"{where}: 'dist' is required")
            if "automorphism" in chk:
                chk = dict(chk)
                chk["_alpha"] = _build_automorphism(group, chk["automorphism"])
            checks.append(chk)
    except ConfigError:
        raise
    except CapacityError:
        raise
    except (HeydeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"scenario {data.get('name')!r}: {type(exc).__name__}: {exc}") from exc
    return Scenario(
        name=str(data["name"]),
        description=str(data.get("description", "")),
        seed=int(data.get("seed", 0) if seed is None else seed),
        group=group,
        automorphism=alpha,
        automorphism_spec=auto_spec or {},
        distributions=dists,
        checks=checks,
        grid=grid,
        tolerances=tol,
    )


# --------------------------------------------------------------------------- running


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, Fraction):
        return str(x)
    return x


def _check_seed(sc: Scenario, index: int) -> list[int]:
    """Per-check entropy, independent of worker count and completion order."""
    return [sc.seed, index]


def run_check(sc: Scenario, index: int, chk: dict, workers: int = 1) -> CheckRecord:
    kind = chk["kind"]
    name = chk.get("name", f"{kind}#{index}")
    expect = chk.get("expect")
    alpha = chk.get("_alpha", sc.automorphism)
    tol = sc.tolerances
    dists = [sc.distributions[r] for r in chk.get("dists", [])]
    start = time.perf_counter()
    rec = CheckRecord(name, kind, False, expect)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VanishingCharacteristicFunction)
        _dispatch(sc, kind, chk, rec, alpha, dists, tol, index, workers)
    rec.runtime = time.perf_counter() - start
    rec.details = _jsonable(rec.details)
    rec.witness = _jsonable(rec.witness)
    return rec


def _dispatch(sc, kind, chk, rec, alpha, dists, tol, index, workers):
    from . import suites

    if kind == "condition1":
        if isinstance(sc.group, SolenoidSpec):
            rec.verdict = solenoid_condition1(sc.group, alpha)
            n = alpha.p + alpha.q
            rec.details = {"p_plus_q": n,
                           "kernel_order": ha_quotient_order(sc.group, n) if n else None}
            try:
                ev = kernel_truncation_evidence(sc.group, n, range(1, 4)) if n else None
            except CapacityError as exc:
                ev = None
                rec.details["truncation_evidence"] = f"unavailable: {exc}"
            if ev is not None:
                rec.details["truncation_evidence"] = {
                    "levels": ev.levels, "n_torsion_of_tail_kernels": ev.torsion_orders,
                    "window": ev.window, "divisible": ev.divisible}
        elif isinstance(sc.group, RealExtGroup):
            rec.verdict = alpha.condition1()
            rec.details = {"finite_kernel": alpha.finite_kernel().elements}
        else:
            rec.verdict = check_condition1(alpha)
            rec.details = {"kernel": kernel(Homomorphism.identity(alpha.source) + alpha).elements}
    elif kind == "has_2_torsion":
        _require(isinstance(sc.group, SolenoidSpec), "has_2_torsion needs a solenoid_dual group")
        rec.verdict = solenoid_has_2_torsion(sc.group)
        rec.details = {"kernel_order": ha_quotient_order(sc.group, 2)}
        try:
            ev = kernel_truncation_evidence(sc.group, 2, range(1, 4))
            rec.details["n_torsion_of_tail_kernels"] = ev.torsion_orders
        except CapacityError as exc:
            rec.details["n_torsion_of_tail_kernels"] = f"unavailable: {exc}"
    elif kind == "eq2_exact":
        r = eq2_exact(dft(dists[0]), dft(dists[1]), adjoint(alpha), tol["exact"])
        rec.verdict, rec.residual, rec.witness = r.holds, r.max_residual, r.witness
    elif kind == "eq2_grid":
        spec = sc.group if isinstance(sc.group, SolenoidSpec) else None
        r = eq2_grid(dists[0], dists[1], alpha, sc.grid, tol["grid"], spec=spec)
        rec.verdict, rec.residual, rec.witness, rec.details = (r.holds, r.max_residual,
                                                               r.witness, r.details)
    elif kind == "eq5":
        if isinstance(dists[0], FiniteDist):
            r = eq5_check(dft(dists[0]), dft(dists[1]), adjoint(alpha), tol=tol["exact"])
        else:
            r = eq5_check(dists[0], dists[1], alpha, sc.grid, tol["grid"])
        rec.verdict, rec.residual, rec.witness = r.holds, r.max_residual, r.witness
    elif kind == "cond_sym_exact":
        rec.verdict = conditional_symmetry_exact(dists[0], dists[1], alpha, tol["joint"])
    elif kind == "cond_sym_mc":
        r = conditional_symmetry_mc(dists[0], dists[1], alpha, int(chk.get("n", 10**6)),
                                    int(chk.get("bins", 32)), _check_seed(sc, index), workers,
                                    tol["mc_level"])
        rec.verdict, rec.p_value = r.consistent, r.p_value
        rec.details = {"decision": r.decision, "statistic": r.statistic, "dof": r.dof,
                       "n": r.n, "real_bins": r.real_bins, "widened": r.widened,
                       "pooled_cells": r.pooled_cells}
    elif kind == "decompose":
        dist = sc.distributions[chk["dist"]]
        cf = dft(dist) if isinstance(dist, FiniteDist) else dist
        torsion = chk.get("torsion", "auto")
        if torsion != "auto":
            F = cf.dual if isinstance(dist, FiniteDist) else cf.finite
            torsion = Subgroup.from_elements(F, torsion)
        d = decompose(cf, torsion, sc.grid, tol["decompose"])
        rec.verdict = d.success
        rec.details = {"failed_step": d.failed_step, "sigma": d.sigma, "b": d.b,
                       "shift": d.shift, "certificate": d.certificate}
        if "expect_sigma" in chk and d.sigma is not None:
            rec.details["sigma_error"] = abs(d.sigma - float(chk["expect_sigma"]))
            rec.verdict = rec.verdict and rec.details["sigma_error"] < 1e-9
        if "expect_failed_step" in chk:
            rec.details["expected_failed_step"] = chk["expect_failed_step"]
            rec.side_ok = d.failed_step == chk["expect_failed_step"]
    elif kind == "pd_inequality":
        dist = sc.distributions[chk["dist"]]
        cf = dft(dist) if isinstance(dist, FiniteDist) else dist
        pts = None
        if isinstance(cf, SolenoidGaussCharFn):
            pts = dual_elements(sc.group, sc.grid.solenoid_level, sc.grid.solenoid_bound)
        v = pd_max_violation(cf, pts)
        rec.verdict, rec.residual = v <= tol["pd"], max(v, 0.0)
    else:
        fn = getattr(suites, kind)
        out = fn(sc, chk, _check_seed(sc, index), tol)
        rec.verdict = out.pop("verdict")
        rec.residual = out.pop("residual", None)
        rec.details = out


def run_scenario(sc: Scenario, workers: int = 1) -> Report:
    """Run every check; records keep scenario order whatever the completion order."""
    items = list(enumerate(sc.checks))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(lambda ic: run_check(sc, ic[0], ic[1], workers), items))
    else:
        records = [run_check(sc, i, c, workers) for i, c in items]
    return Report(sc.name, sc.seed, workers, dict(sc.tolerances), records)


def describe(sc: Scenario) -> str:
    lines = [f"scenario: {sc.name}", f"source:   {sc.source}"]
    if sc.description:
        lines.append(f"about:    {sc.description}")
    lines.append(f"group:    {sc.group!r}")
    lines.append(f"alpha:    {sc.automorphism_spec or 'identity'}")
    lines.append(f"seed:     {sc.seed}")
    for name, d in sc.distributions.items():
        lines.append(f"  dist {name}: {type(d).__name__}")
    for i, c in enumerate(sc.checks):
        label = c.get("name", f"{c['kind']}#{i}")
        lines.append(f"  check {label}: kind={c['kind']} expect={c.get('expect', '-')}")
    return "\n".join(lines)


__all__ = ["Scenario", "Report", "CheckRecord", "ConfigError", "load_scenario", "build_scenario",
           "run_scenario", "run_check", "bundled_scenarios", "describe"]
