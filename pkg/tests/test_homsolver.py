import random
from fractions import Fraction

import pytest

from cartanhom import homsolver as hs
from cartanhom.families import TruncatedAlgebra, block_key
from cartanhom.linalg import SparseEchelon
from cartanhom.vectorfield import VectorField
from conftest import cfg


@pytest.fixture(scope="module")
def h_sigma():
    return hs.SigmaParam(TruncatedAlgebra(cfg("H"), 2))


def _sample_triples(sigma, k, seed=0):
    rng = random.Random(seed)
    return [tuple(sorted(rng.sample(sigma.domain, 3))) for _ in range(k)]


def test_identity_and_zero_satisfy_every_row(h_sigma):
    system = hs.generate_constraints(h_sigma, _sample_triples(h_sigma, 150))
    assert len(system) > 0
    assert not any(system.evaluate(h_sigma.identity()))
    assert not any(system.evaluate({}))


def test_rows_match_bracket_residual(h_sigma):
    # the linear rows are the coordinates of the Hom-Jacobi residual
    rng = random.Random(5)
    alg = h_sigma.alg
    for t in _sample_triples(h_sigma, 20, seed=1):
        smap = {}
        for a in t:
            for c in rng.sample(list(h_sigma.targets(a)), 4):
                smap[h_sigma.var(a, c)] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        rows = h_sigma.rows_for(t)
        want = {out: sum(r.get(v, 0) * c for v, c in smap.items()) for out, r in rows.items()}
        want = {k: v for k, v in want.items() if v}
        res = h_sigma.residual(smap, t)
        assert _coords(alg, res) == want


def _coords(alg, D):
    # residuals of a generic map mix blocks; coordinatize block by block
    parts = {}
    for k, v in D.terms.items():
        parts.setdefault(block_key(alg.config, VectorField(D.sig, {k: v})), {})[k] = v
    out = {}
    for terms in parts.values():
        for i, c in alg.coords(VectorField(D.sig, terms)).items():
            out[i] = out.get(i, 0) + c
    return {k: v for k, v in out.items() if v}


def test_nullspace_monotone_in_triples(h_sigma):
    triples = _sample_triples(h_sigma, 60, seed=2)
    dims = [hs.solve(hs.generate_constraints(h_sigma, triples[:k])).dim for k in (5, 15, 30, 60)]
    assert dims == sorted(dims, reverse=True)


def test_solved_basis_satisfies_rows(h_sigma):
    system = hs.generate_constraints(h_sigma, _sample_triples(h_sigma, 40, seed=3))
    sol = hs.solve(system)
    for v in sol.basis[:50]:
        assert not any(system.evaluate(v))


def test_triple_validation(h_sigma):
    with pytest.raises(ValueError):
        hs.generate_constraints(h_sigma, [(0, 1)])
    outside = max(h_sigma.alg.indices(2))
    with pytest.raises(ValueError):
        hs.generate_constraints(h_sigma, [(0, 1, outside)])


def test_naive_rank_matches_sparse():
    rng = random.Random(9)
    rows = [{rng.randrange(12): rng.randint(-3, 3) for _ in range(4)} for _ in range(15)]
    e = SparseEchelon()
    for r in rows:
        e.add(r)
    assert hs.naive_rank(rows) == e.rank


def test_pipeline_h():
    rep = hs.hom_solve_report(cfg("H"))
    assert rep.status == "PASS"
    assert rep.nullspace_dim == 1
    assert rep.details["solution_set"] == ["0", "id"]
    assert rep.details["window_plus_one"]["unchanged"]
    assert rep.details["identity_in_nullspace"]


def test_props_h():
    assert hs.verify_prop_minus1(cfg("H")).status == "PASS"
    assert hs.verify_prop_zero(cfg("H")).status == "PASS"


@pytest.mark.slow
def test_strict_system_witness_k():
    # inside V alone the Hom-Jacobi rows admit rho(x) = phi(x) D_K(1); rows from g_1 remove it
    c = cfg("K")
    strict = hs.run_pipeline(c, outer_degrees=())
    assert strict.dim > 2
    w = hs.grading_witness(strict.sigma, strict.basis)
    assert w["satisfies_strict_rows"] and w["in_final_nullspace"]
    assert w["multiplicative_on_V"] == {"rho": True, "id+rho": True}
    full = hs.run_pipeline(c)
    assert full.dim == 1
    assert hs.grading_witness(full.sigma, full.basis)["in_final_nullspace"] is False


@pytest.mark.parametrize("family", ["W", "K", "SHO"])
def test_theorem_step(family):
    for l in (1, 2):
        rep = hs.verify_theorem_step(cfg(family), l)
        assert rep.status == "PASS" and rep.details["annihilator_dim"] == 0


def test_theorem_step_detects_empty_span():
    rep = hs.verify_theorem_step(cfg("W"), 1, empty=True)
    assert rep.status == "FAIL"
    assert rep.details["annihilator_dim"] == rep.details["dim_X_l"] == 256


@pytest.mark.parametrize("family", ["S", "H", "SHO"])
def test_kernel_ad_passes(family):
    c = cfg(family)
    for i in c.maps.indices() if family != "S" else range(1, 9):
        rep = hs.kernel_ad_check(c, i)
        assert rep.status == "PASS", rep.counterexample


def test_kernel_ad_w_kernel_not_perfect():
    rep = hs.kernel_ad_check(cfg("W"), 1)
    d = rep.details
    assert d["span_equal"] and not d["perfect"]
    assert (d["kernel_dim"], d["bracket_span_dim"]) == (56, 55)
    assert rep.counterexample["missing_element"] == "x2*p2"


def test_centralizer_membership():
    assert hs.yuanl1_check(cfg("H")).status == "PASS"
    assert hs.yuanl1_check(cfg("K")).status == "PASS"
    w = hs.yuanl1_check(cfg("W"))
    assert w.status == "FAIL"
    assert w.counterexample["tuple"] == [1, 1, 2, 1]
    assert w.details["failing_pattern"]["other"] == 0


def test_implied_rows():
    assert hs.implied_rows_check(cfg("H")).status == "PASS"
    k = hs.implied_rows_check(cfg("K"))
    assert k.status == "FAIL" and k.details["annihilator_failures"] == 0
    assert hs.implied_rows_check(cfg("K"), literal=False).status == "PASS"
