"""Named verification suites and the acceptance manifest.

A suite is a pure function of (name, config, params): random samples are
drawn from ``random.Random(seed)`` streams derived from the seed and the
sample index, so any failing instance can be regenerated from the report.
"""
from __future__ import annotations

import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from . import homsolver as hs
from .families import (
    DEFAULT_CONFIGS, ClosureError, FamilyConfig, TruncatedAlgebra, component_basis, generators_match,
    grading_generators,
)
from .linalg import SparseEchelon
from .printing import format_field, format_poly
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport, worst
from .superpoly import SuperPoly, monomials_of_weight, random_homogeneous, scalar
from .vectorfield import VectorField, bracket, bracket_formula, div, div_lambda

log = logging.getLogger(__name__)

DEFAULT_SEED = 7
DEFAULT_SAMPLES = 500
MAX_WEIGHT = 4


class UnknownSuite(KeyError):
    pass


# random elements of X(m, n) ------------------------------------------------------------------------------
def _rng(seed: int, *tag) -> random.Random:
    # one independent stream per (seed, tag); str() keeps it stable across runs
    return random.Random(f"{seed}:{':'.join(map(str, tag))}")


@lru_cache(maxsize=None)
def _primed_functions(config: FamilyConfig, weight: int, parity: int) -> tuple:
    """Basis of the generating functions f of that weight/parity with D_X(f) in SHO' (SKO')."""
    sig = config.sig
    monos = [k for k in monomials_of_weight(sig, weight, config.gamma) if sig.mono_parity(k) == parity]
    if config.family == "SHO":
        image = lambda f: div(config.d_x(f)).terms  # noqa: E731
    else:
        image = lambda f: div_lambda(f, config.lam, config.maps).terms  # noqa: E731
    imgs = [image(SuperPoly(sig, {k: 1})) for k in monos]
    cols = sorted({c for im in imgs for c in im})
    ech = SparseEchelon()
    for c in cols:
        ech.add({t: im[c] for t, im in enumerate(imgs) if c in im})
    out = []
    for vec in ech.nullspace(range(len(monos))):
        out.append(SuperPoly(sig, {monos[t]: scalar(c) for t, c in vec.items()}))
    return tuple(out)


def random_function(config: FamilyConfig, parity: int, rng: random.Random, max_weight: int = MAX_WEIGHT) -> SuperPoly:
    """A generating function f of one parity whose D_X(f) lies in X(m, n)."""
    sig = config.sig
    if config.family in ("SHO", "SKO"):
        acc = SuperPoly.zero(sig)
        for _ in range(rng.randint(1, 3)):
            w = rng.randint(0, max_weight)
            pool = _primed_functions(config, w, parity)
            if pool:
                acc = acc + rng.choice(pool).scale(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        return acc
    return random_homogeneous(sig, parity, max_weight, rng, gamma=config.gamma)


def random_element(config: FamilyConfig, parity: int, rng: random.Random, max_weight: int = MAX_WEIGHT) -> VectorField:
    """Parity-homogeneous element of X(m, n), coefficients of weight <= max_weight."""
    sig = config.sig
    N = sig.m + sig.n
    fam = config.family
    if fam == "W":
        comps = {}
        for r in rng.sample(range(1, N + 1), rng.randint(1, 3)):
            p = parity ^ int(sig.is_odd(r))
            comps[r] = random_homogeneous(sig, p, max_weight, rng, max_terms=3)
        return VectorField.from_components(sig, comps)
    if fam == "S":
        from .vectorfield import d_ij

        acc = VectorField.zero(sig)
        for _ in range(rng.randint(1, 3)):
            i, j = rng.sample(range(1, N + 1), 2)
            p = parity ^ int(sig.is_odd(i)) ^ int(sig.is_odd(j))
            acc = acc + d_ij(i, j, random_homogeneous(sig, p, max_weight + 1, rng, max_terms=3))
        return acc
    if fam in ("SHO", "SKO"):
        # the derived algebra is smaller than SHO' (SKO') in some degrees: draw from the computed components
        pool = [b for j in range(-config.depth, min(max_weight, 3)) for b in component_basis(config, j).basis
                if b.parity() == parity]
        acc = VectorField.zero(sig)
        for b in rng.sample(pool, min(len(pool), rng.randint(1, 4))):
            acc = acc + b.scale(Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3)))
        return acc
    # D_HO, D_KO shift parity by one
    shift = 1 if fam in ("HO", "KO") else 0
    return config.d_x(random_function(config, parity ^ shift, rng, max_weight))


# identity suites -----------------------------------------------------------------------------------------
def _sgn(a: int, b: int) -> int:
    return -1 if a and b else 1


def _jacobi(config: FamilyConfig, samples: int, seed: int, max_weight: int) -> CheckReport:
    t0 = time.time()
    for s in range(samples):
        rng = _rng(seed, "jacobi", s)
        px, py, pz = (rng.randint(0, 1) for _ in range(3))
        x, y, z = (random_element(config, p, rng, max_weight) for p in (px, py, pz))
        lhs = bracket(x, bracket(y, z))
        rhs = bracket(bracket(x, y), z) + bracket(y, bracket(x, z)).scale(_sgn(px, py))
        res = lhs - rhs
        if res.terms:
            cex = {"seed": seed, "sample": s, "x": format_field(x), "y": format_field(y), "z": format_field(z),
                   "residual": format_field(res)}
            return CheckReport("jacobi", config.as_dict(), FAIL, {"samples_checked": s + 1},
                               seed=seed, counterexample=cex, seconds=time.time() - t0)
    return CheckReport("jacobi", config.as_dict(), PASS, {"samples": samples, "max_weight": max_weight},
                       seed=seed, seconds=time.time() - t0)


def _antisym(config: FamilyConfig, samples: int, seed: int, max_weight: int) -> CheckReport:
    t0 = time.time()
    for s in range(samples):
        rng = _rng(seed, "antisym", s)
        px, py = rng.randint(0, 1), rng.randint(0, 1)
        x, y = random_element(config, px, rng, max_weight), random_element(config, py, rng, max_weight)
        res = bracket(x, y) + bracket(y, x).scale(_sgn(px, py))
        if res.terms:
            cex = {"seed": seed, "sample": s, "x": format_field(x), "y": format_field(y), "residual": format_field(res)}
            return CheckReport("antisym", config.as_dict(), FAIL, {"samples_checked": s + 1},
                               seed=seed, counterexample=cex, seconds=time.time() - t0)
    return CheckReport("antisym", config.as_dict(), PASS, {"samples": samples, "max_weight": max_weight},
                       seed=seed, seconds=time.time() - t0)


def _bracket_formula(config: FamilyConfig, samples: int, seed: int, max_weight: int,
                     literal: bool = True) -> CheckReport:
    t0 = time.time()
    if config.family in ("W", "S"):
        return CheckReport("bracket-formula", config.as_dict(), INCONCLUSIVE,
                           {"reason": f"{config.family} has no D_X presentation"}, seed=seed)
    first = None
    nfail = 0
    for s in range(samples):
        rng = _rng(seed, "bracket-formula", s)
        pf, pg = rng.randint(0, 1), rng.randint(0, 1)
        f = random_function(config, pf, rng, max_weight)
        g = random_function(config, pg, rng, max_weight)
        lhs = bracket(config.d_x(f), config.d_x(g))
        rhs = bracket_formula(config.family, f, g, config.maps, literal=literal)
        if lhs != rhs:
            nfail += 1
            if first is None:
                first = {"seed": seed, "sample": s, "f": format_poly(f), "g": format_poly(g),
                         "residual": format_field(lhs - rhs)}
    details = {"samples": samples, "max_weight": max_weight, "literal_signs": literal, "failures": nfail}
    if first is None:
        return CheckReport("bracket-formula", config.as_dict(), PASS, details, seed=seed,
                           seconds=time.time() - t0)
    if literal and config.family in ("KO", "SKO"):
        # same samples under the sign that the operators satisfy
        alt = _bracket_formula(config, samples, seed, max_weight, literal=False)
        details["sign_corrected"] = {"status": alt.status, "failures": alt.details.get("failures", 0)}
    return CheckReport("bracket-formula", config.as_dict(), FAIL, details, seed=seed, counterexample=first,
                       seconds=time.time() - t0)


# structural suites ---------------------------------------------------------------------------------------
def _grading(config: FamilyConfig, jmax: int = 2) -> CheckReport:
    """Computed components against the displayed generators, plus homogeneity and closure."""
    t0 = time.time()
    dims, matches, bad = {}, {}, None
    for j in range(-config.depth, jmax + 1):
        comp = component_basis(config, j)
        dims[j] = comp.dim
        for b in comp.basis:
            if b.weight(config.gamma) != j or b.parity() not in (0, 1):
                bad = bad or {"kind": "inhomogeneous basis element", "degree": j, "element": format_field(b)}
        if j <= 0:
            matches[j] = generators_match(config, j)
            if not matches[j]:
                bad = bad or {"kind": "span differs from displayed generators", "degree": j,
                              "generators": len(grading_generators(config, j)), "dim": comp.dim}
    closure = True
    try:
        TruncatedAlgebra(config, jmax).structure_constants()
    except ClosureError as exc:
        closure = False
        bad = bad or {"kind": "closure violation", "error": str(exc)}
    details = {"dims": dims, "generators_match": matches, "closure": closure}
    return CheckReport("grading", config.as_dict(), PASS if bad is None else FAIL, details, dims=dims,
                       counterexample=bad, seconds=time.time() - t0)


def _transitivity(config: FamilyConfig, degrees: Sequence[int] = (0, 1, 2)) -> CheckReport:
    t0 = time.time()
    ker = {j: hs.transitivity_kernel_dim(config, j) for j in degrees}
    nz = {j: d for j, d in ker.items() if d}
    cex = {"kernel_dims": nz} if nz else None
    return CheckReport("transitivity", config.as_dict(), FAIL if nz else PASS, {"kernel_dims": ker},
                       counterexample=cex, seconds=time.time() - t0)


def _kernel_ad(config: FamilyConfig) -> CheckReport:
    t0 = time.time()
    reps = [hs.kernel_ad_check(config, i) for i in config.maps.indices()]
    per = {r.details["i"]: {k: r.details[k] for k in ("kernel_dim", "asserted_dim", "span_equal", "perfect")}
           for r in reps}
    status = worst(*(r.status for r in reps))
    cex = next((dict(r.counterexample, i=r.details["i"]) for r in reps if r.counterexample), None)
    details = {"indices": per, "span_equal_all": all(v["span_equal"] for v in per.values()),
               "perfect_all": all(v["perfect"] for v in per.values())}
    return CheckReport("lemma-ll3", config.as_dict(), status, details, counterexample=cex,
                       seconds=time.time() - t0)


def _theorem_step(config: FamilyConfig, levels: Sequence[int] = (1, 2)) -> CheckReport:
    t0 = time.time()
    reps = [hs.verify_theorem_step(config, l) for l in levels]
    details = {str(r.details["l"]): r.details for r in reps}
    cex = next((r.counterexample for r in reps if r.counterexample), None)
    return CheckReport("theorem-step", config.as_dict(), worst(*(r.status for r in reps)), details,
                       counterexample=cex, seconds=time.time() - t0)


# dispatch --------------------------------------------------------------------------------------------------
def _sampled(fn):
    def run(config, params):
        return fn(config, int(params.get("samples", DEFAULT_SAMPLES)), int(params.get("seed", DEFAULT_SEED)),
                  int(params.get("max_weight", MAX_WEIGHT)))
    return run


SUITES: Dict[str, Callable[[FamilyConfig, dict], CheckReport]] = {
    "jacobi": _sampled(_jacobi),
    "antisym": _sampled(_antisym),
    "bracket-formula": lambda c, p: _bracket_formula(
        c, int(p.get("samples", DEFAULT_SAMPLES)), int(p.get("seed", DEFAULT_SEED)),
        int(p.get("max_weight", MAX_WEIGHT)), bool(p.get("literal", True))),
    "grading": lambda c, p: _grading(c, int(p.get("jmax", 2))),
    "transitivity": lambda c, p: _transitivity(c, tuple(p.get("degrees", (0, 1, 2)))),
    "lemma-ll3": lambda c, p: _kernel_ad(c),
    "lemma-yuanl1": lambda c, p: hs.yuanl1_check(c),
    "prop-minus1": lambda c, p: hs.verify_prop_minus1(c, int(p.get("codomain_max", 2))),
    "prop-zero": lambda c, p: hs.verify_prop_zero(c, int(p.get("codomain_max", 2))),
    "theorem-step": lambda c, p: _theorem_step(c, tuple(p.get("levels", (1, 2)))),
    "hom-solve": lambda c, p: hs.hom_solve_report(c, int(p.get("codomain_max", 2)), bool(p.get("oracle", False))),
    "implied-rows": lambda c, p: hs.implied_rows_check(c, literal=bool(p.get("literal", True))),
}
SUITE_NAMES = tuple(SUITES)
SAMPLED = ("jacobi", "antisym", "bracket-formula")


def run_suite(name: str, config: FamilyConfig, params: Optional[dict] = None) -> CheckReport:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; expected one of {', '.join(SUITE_NAMES)}")
    params = dict(params or {})
    t0 = time.time()
    rep = SUITES[name](config, params)
    if rep.seed is None and name in SAMPLED:
        rep.seed = int(params.get("seed", DEFAULT_SEED))
    if rep.seconds is None:
        rep.seconds = time.time() - t0
    log.info("%s", rep.summary())
    return rep


# manifests -------------------------------------------------------------------------------------------------
def config_from_dict(d: dict) -> FamilyConfig:
    lam = d.get("lambda", d.get("lam", 0))
    return FamilyConfig(d["family"], int(d["m"]), int(d["n"]), Fraction(str(lam)))


def default_manifest(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> List[dict]:
    """Every acceptance check at the default desk configs."""
    out = []
    sp = {"samples": samples, "seed": seed, "max_weight": MAX_WEIGHT}
    implied = {("H", 4, 4), ("K", 5, 4), ("HO", 4, 4), ("KO", 4, 5)}
    for cfg in DEFAULT_CONFIGS:
        c = cfg.as_dict()
        out.append({"suite": "jacobi", "config": c, "params": sp})
        out.append({"suite": "antisym", "config": c, "params": sp})
        if cfg.family not in ("W", "S"):
            out.append({"suite": "bracket-formula", "config": c, "params": sp})
        for name in ("grading", "transitivity", "lemma-ll3", "lemma-yuanl1", "prop-minus1", "prop-zero",
                     "theorem-step"):
            out.append({"suite": name, "config": c, "params": {}})
        out.append({"suite": "hom-solve", "config": c, "params": {"oracle": cfg.family == "W"}})
        if (cfg.family, cfg.m, cfg.n) in implied:
            out.append({"suite": "implied-rows", "config": c, "params": {}})
    return out


def load_manifest(path) -> List[dict]:
    with open(path) as fh:
        data = json.load(fh)
    entries = data["checks"] if isinstance(data, dict) else data
    for e in entries:
        if e.get("suite") not in SUITES:
            raise UnknownSuite(f"manifest entry with unknown suite {e.get('suite')!r}")
        config_from_dict(e["config"])
    return entries


def _run_entry(entry: dict) -> dict:
    rep = run_suite(entry["suite"], config_from_dict(entry["config"]), entry.get("params"))
    return rep.as_dict()


def _by_config(entries: Sequence[dict]) -> List[List[int]]:
    groups: Dict[str, List[int]] = {}
    for i, e in enumerate(entries):
        groups.setdefault(json.dumps(e["config"], sort_keys=True), []).append(i)
    return list(groups.values())


def _run_group(entries: List[dict]) -> List[dict]:
    # one worker per config keeps the per-process caches warm
    return [_run_entry(e) for e in entries]


def run_all(manifest: Optional[Iterable[dict]] = None, jobs: int = 1,
            progress: Optional[Callable[[dict], None]] = None) -> dict:
    """Run a manifest; reports come back in manifest order."""
    entries = list(manifest if manifest is not None else default_manifest())
    t0 = time.time()
    results: List[Optional[dict]] = [None] * len(entries)
    groups = _by_config(entries)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {pool.submit(_run_group, [entries[i] for i in g]): g for g in groups}
            for fut, g in futs.items():
                for i, rep in zip(g, fut.result()):
                    results[i] = rep
                    if progress:
                        progress(rep)
    else:
        for g in groups:
            for i in g:
                results[i] = _run_entry(entries[i])
                if progress:
                    progress(results[i])
    status = worst(*(r["status"] for r in results)) if results else PASS
    counts = {s: sum(r["status"] == s for r in results) for s in (PASS, FAIL, INCONCLUSIVE)}
    from . import __version__

    return {"suite": "all", "status": status, "counts": counts, "seconds": round(time.time() - t0, 3),
            "reports": results, "version": __version__, "schema": 1}
