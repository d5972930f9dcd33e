"""Acceptance criteria 1-10, each reported as one PASS/FAIL line.

The criteria are evaluated on the built-in manifest (``cartanhom verify all``),
run once per session. Criteria that do not hold as literally stated are
marked ``xfail(strict=True)``: their line reads FAIL, and a companion test
pins down the exact extent of the failure and the reading that does hold.
"""
import json
import random
import subprocess
import sys
import time

import pytest

from cartanhom import homsolver as hs
from cartanhom import verify
from cartanhom.families import DEFAULT_CONFIGS
from cartanhom.parser import canonical, parse, to_text
from conftest import record_criterion
from exprgen import expression

LABELS = [c.label() for c in DEFAULT_CONFIGS]
FORMULA_FAMILIES = ("H", "K", "HO", "KO", "SHO", "SKO")
IMPLIED = ("H(4,4)", "K(5,4)", "HO(4,4)", "KO(4,5)")
TIME_BUDGET = 30 * 60


def _label(rep):
    return verify.config_from_dict(rep["config"]).label()


@pytest.fixture(scope="module")
def manifest_run():
    t0 = time.time()
    result = verify.run_all(verify.default_manifest())
    result["wall_seconds"] = time.time() - t0
    by = {}
    for rep in result["reports"]:
        by.setdefault(rep["suite"], {})[_label(rep)] = rep
    result["by_suite"] = by
    return result


def _statuses(run, suite, labels=None):
    reps = run["by_suite"][suite]
    return {k: v["status"] for k, v in reps.items() if labels is None or k in labels}


def _failing(statuses):
    return sorted(k for k, s in statuses.items() if s != "PASS")


# 1 ---------------------------------------------------------------------------------------------------------
def test_criterion_1_jacobi_antisymmetry(manifest_run):
    by = manifest_run["by_suite"]
    bad, slow = [], []
    for lab in LABELS:
        reps = [by["jacobi"][lab], by["antisym"][lab]]
        for r in reps:
            if r["status"] != "PASS" or r["details"]["samples"] < 500 or r["details"]["max_weight"] != 4:
                bad.append(f"{r['suite']} {lab}")
        if sum(r["seconds"] for r in reps) >= 60:
            slow.append(lab)
    detail = f"500 triples and 500 pairs per config; over the 60 s target: {slow or 'none'}"
    assert record_criterion(1, not bad, detail if not bad else f"failing: {bad}")


# 2 ---------------------------------------------------------------------------------------------------------
@pytest.mark.xfail(strict=True, reason="the displayed KO correction sign disagrees with the operators")
def test_criterion_2_bracket_formula(manifest_run):
    st = _statuses(manifest_run, "bracket-formula")
    assert set(st) == set(LABELS) - {"W(4,4)", "S(4,4)"}
    bad = _failing(st)
    fails = {k: manifest_run["by_suite"]["bracket-formula"][k]["details"]["failures"] for k in bad}
    assert record_criterion(2, not bad, f"literal sign fails for {fails} of 500" if bad else "500 pairs each")


def test_criterion_2_extent(manifest_run):
    reps = manifest_run["by_suite"]["bracket-formula"]
    for lab, r in reps.items():
        fam = r["config"]["family"]
        if fam in ("KO", "SKO"):
            assert r["status"] == "FAIL"
            assert r["details"]["sign_corrected"] == {"status": "PASS", "failures": 0}
        else:
            assert r["status"] == "PASS"


# 3 ---------------------------------------------------------------------------------------------------------
def test_criterion_3_grading(manifest_run):
    reps = manifest_run["by_suite"]["grading"]
    dims = {lab: {int(j): d for j, d in r["details"]["dims"].items()} for lab, r in reps.items()}
    derived = (dims["W(4,4)"][0], dims["S(4,4)"][0], dims["K(5,4)"][-1], dims["K(5,4)"][-2]) == (64, 63, 8, 1)
    spans = all(all(r["details"]["generators_match"].values()) for r in reps.values())
    ok = not _failing(_statuses(manifest_run, "grading")) and derived and spans and len(reps) == 10
    assert record_criterion(3, ok, "spans equal for j = -2, -1, 0; dims 64, 63, 8, 1")


# 4 ---------------------------------------------------------------------------------------------------------
def test_criterion_4_transitivity(manifest_run):
    reps = manifest_run["by_suite"]["transitivity"]
    ok = len(reps) == 10 and all(set(r["details"]["kernel_dims"].values()) == {0} for r in reps.values())
    assert record_criterion(4, ok, "kernel dimension 0 in degrees 0, 1, 2")


# 5 ---------------------------------------------------------------------------------------------------------
@pytest.mark.xfail(strict=True, reason="several degree-zero kernels are not perfect")
def test_criterion_5_degree_zero_kernels(manifest_run):
    bad = _failing(_statuses(manifest_run, "lemma-ll3"))
    assert record_criterion(5, not bad, f"kernel equals the asserted span everywhere; not perfect at {bad}")


def test_criterion_5_extent(manifest_run):
    reps = manifest_run["by_suite"]["lemma-ll3"]
    assert all(r["details"]["span_equal_all"] for r in reps.values())
    assert _failing(_statuses(manifest_run, "lemma-ll3")) == sorted(
        ["W(4,4)", "K(5,4)", "HO(4,4)", "KO(4,5)", "SKO(4,5;0)", "SKO(4,5;1)", "SKO(4,5;2/3)"])
    for lab, r in reps.items():
        if r["status"] == "FAIL":
            assert r["counterexample"]["kind"] == "kernel not perfect"
            for d in r["details"]["indices"].values():
                assert d["span_equal"]


# 6 ---------------------------------------------------------------------------------------------------------
@pytest.mark.xfail(strict=True, reason="some tuples allowed by the side conditions violate the membership")
def test_criterion_6_centralizer_brackets(manifest_run):
    reps = manifest_run["by_suite"]["lemma-yuanl1"]
    bad = {k: f"{r['details']['failures']}/{r['details']['tuples']}" for k, r in reps.items() if r["status"] != "PASS"}
    assert record_criterion(6, not bad, f"failing tuples: {bad}")


def test_criterion_6_extent(manifest_run):
    reps = manifest_run["by_suite"]["lemma-yuanl1"]
    passing = {"H(4,4)", "K(5,4)", "SKO(4,5;1)", "SKO(4,5;2/3)"}
    assert {k for k, r in reps.items() if r["status"] == "PASS"} == passing
    for lab in ("W(4,4)", "S(4,4)"):
        assert reps[lab]["details"]["failing_pattern"] == {"l==i": 392, "l==k'": 0, "other": 0}
    for lab in ("HO(4,4)", "KO(4,5)"):
        assert reps[lab]["details"]["failing_pattern"] == {"l==i": 0, "l==k'": 72, "other": 0}
    for c in DEFAULT_CONFIGS:
        if c.label() in ("SHO(4,4)", "SKO(4,5;0)"):
            # {i, j, k', l'} meets every pair {a, a'} exactly once
            tuples = reps[c.label()]["details"]["failing_tuples"]
            assert len(tuples) == 12
            for i, j, k, l in tuples:
                chosen = {i, j, c.maps.iprime(k), c.maps.iprime(l)}
                assert {min(a, c.maps.iprime(a)) for a in chosen} == {1, 2, 3, 4}


# 7 ---------------------------------------------------------------------------------------------------------
def test_criterion_7_hom_structures(manifest_run):
    by = manifest_run["by_suite"]
    bad = []
    for suite in ("hom-solve", "prop-minus1", "prop-zero", "theorem-step"):
        bad += [f"{suite} {k}" for k in _failing(_statuses(manifest_run, suite))]
    for lab, r in by["hom-solve"].items():
        d = r["details"]
        if d["solution_set"] != ["0", "id"] or not d["window_plus_one"]["unchanged"]:
            bad.append(f"hom-solve {lab}")
    for lab, r in by["theorem-step"].items():
        if any(r["details"][l]["annihilator_dim"] for l in ("1", "2")):
            bad.append(f"theorem-step {lab}")
    w = by["hom-solve"]["W(4,4)"]["details"]
    oracle = w["dense_oracle_nullspace_dim"] == w["nullspace_dim"] and w["reverify"] == "ok"
    ok = not bad and oracle and len(by["hom-solve"]) == 10
    assert record_criterion(7, ok, f"solution set {{0, id}} at 10 configs; W oracle nullspace "
                                   f"{w['dense_oracle_nullspace_dim']} = {w['nullspace_dim']}" if ok else str(bad))


# 8 ---------------------------------------------------------------------------------------------------------
@pytest.mark.xfail(strict=True, reason="the pairing signs of D(x_i), D(x_i') differ between indices for K and KO")
def test_criterion_8_implied_rows(manifest_run):
    reps = manifest_run["by_suite"]["implied-rows"]
    assert set(reps) == set(IMPLIED)
    bad = {k: r["details"]["pairing_failures"] for k, r in reps.items() if r["status"] != "PASS"}
    assert record_criterion(8, not bad, f"annihilator rows hold everywhere; literal pairing rows fail at {bad}")


def test_criterion_8_extent(manifest_run):
    reps = manifest_run["by_suite"]["implied-rows"]
    assert all(r["details"]["annihilator_failures"] == 0 for r in reps.values())
    assert {k for k, r in reps.items() if r["status"] == "PASS"} == {"H(4,4)", "HO(4,4)"}
    for c in DEFAULT_CONFIGS:
        if c.label() in ("K(5,4)", "KO(4,5)"):
            assert hs.implied_rows_check(c, literal=False).status == "PASS"


# 9 ---------------------------------------------------------------------------------------------------------
def _cli(*args):
    p = subprocess.run([sys.executable, "-m", "cartanhom.cli", *args], capture_output=True, text=True)
    return p.returncode, p.stdout


def test_criterion_9_cli():
    trips = 0
    for c in DEFAULT_CONFIGS:
        rng = random.Random(f"acceptance:{c.label()}")
        for _ in range(20):
            v = parse(expression(c, rng), c)
            text = to_text(v)
            trips += parse(text, c) == v and canonical(text, c) == text
    code1, out1 = _cli("verify", "jacobi", "--family", "W", "--m", "4", "--n", "4", "--samples", "500", "--seed", "7")
    code2, out2 = _cli("eval", "--family", "K", "--m", "5", "--n", "4", "D_K(1)")
    code3, out3 = _cli("basis", "--family", "K", "--m", "5", "--n", "4", "--degree", "-2")
    examples = (code1 == 0 and json.loads(out1)["status"] == "PASS", (code2, out2.strip()) == (0, "2*p5"),
                code3 == 0 and [ln for ln in out3.splitlines() if not ln.startswith("#")] == ["2*p5"])
    ok = trips == 200 and all(examples)
    assert record_criterion(9, ok, f"{trips}/200 round trips; examples {examples}")


# 10 --------------------------------------------------------------------------------------------------------
@pytest.mark.xfail(strict=True, reason="criteria 2, 5, 6 and 8 fail as stated")
def test_criterion_10_manifest(manifest_run):
    secs = manifest_run["wall_seconds"]
    ok = manifest_run["status"] == "PASS" and secs < TIME_BUDGET
    assert record_criterion(10, ok, f"{manifest_run['counts']} in {secs:.0f} s")


def test_criterion_10_extent(manifest_run):
    assert manifest_run["wall_seconds"] < TIME_BUDGET
    assert manifest_run["counts"]["INCONCLUSIVE"] == 0
    failing = {(r["suite"]) for r in manifest_run["reports"] if r["status"] != "PASS"}
    assert failing == {"bracket-formula", "lemma-ll3", "lemma-yuanl1", "implied-rows"}
