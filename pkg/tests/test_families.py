import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cartanhom.families import (
    DEFAULT_CONFIGS, ConfigError, FamilyConfig, TruncatedAlgebra, component_basis, generators_match, load_algebra,
    member, grading_generators,
)
from cartanhom.homsolver import transitivity_kernel_dim
from cartanhom.superpoly import SuperPoly
from cartanhom.vectorfield import VectorField, bracket
from cartanhom.verify import random_element
from conftest import cfg, seeds

# dims of X_[j], j = -depth..2; counted by hand from the grading of Lambda(m, n)
DIMS = {
    "W(4,4)": {-1: 8, 0: 64, 1: 256, 2: 704},
    "S(4,4)": {-1: 8, 0: 63, 1: 248, 2: 672},
    "H(4,4)": {-1: 8, 0: 32, 1: 88, 2: 192},
    "K(5,4)": {-2: 1, -1: 8, 0: 33, 1: 96, 2: 225},
    "HO(4,4)": {-1: 8, 0: 32, 1: 88, 2: 192},
    "SHO(4,4)": {-1: 8, 0: 31, 1: 80, 2: 160},
    "KO(4,5)": {-2: 1, -1: 8, 0: 33, 1: 96, 2: 224},
    "SKO(4,5;0)": {-2: 1, -1: 8, 0: 32, 1: 88, 2: 192},
    "SKO(4,5;1)": {-2: 1, -1: 8, 0: 32, 1: 88, 2: 192},
    "SKO(4,5;2/3)": {-2: 1, -1: 8, 0: 32, 1: 88, 2: 192},
}

CONFIGS = list(DEFAULT_CONFIGS)
ids = [c.label() for c in CONFIGS]


@pytest.mark.parametrize("config", CONFIGS, ids=ids)
def test_component_dims(config):
    assert {j: component_basis(config, j).dim for j in range(-config.depth, 3)} == DIMS[config.label()]


@pytest.mark.parametrize("config", CONFIGS, ids=ids)
def test_basis_homogeneous(config):
    for j in range(-config.depth, 3):
        for b in component_basis(config, j).basis:
            assert b.weight(config.gamma) == j
            assert b.parity() in (0, 1)


@pytest.mark.parametrize("config", CONFIGS, ids=ids)
def test_generators_span_components(config):
    for j in range(-config.depth, 1):
        assert generators_match(config, j)


@pytest.mark.parametrize("config", CONFIGS, ids=ids)
def test_transitive(config):
    assert [transitivity_kernel_dim(config, j) for j in (0, 1, 2)] == [0, 0, 0]


def test_documented_bases():
    w = cfg("W")
    minus1 = component_basis(w, -1)
    assert {frozenset(b.terms) for b in minus1.basis} == {frozenset(VectorField.d(w.sig, i).terms)
                                                         for i in range(1, 9)}
    k = cfg("K")
    (top,) = component_basis(k, -2).basis
    assert top == VectorField.d(k.sig, 5).scale(2)


def test_below_depth_is_an_error():
    with pytest.raises(ConfigError):
        component_basis(cfg("K"), -3)
    with pytest.raises(ValueError):
        grading_generators(cfg("W"), 1)


@pytest.mark.parametrize("args", [("X", 4, 4), ("H", 5, 4), ("K", 4, 4), ("HO", 4, 5), ("KO", 4, 4),
                                  ("W", 0, 4), ("H", 4, 4, 1)])
def test_invalid_configs(args):
    with pytest.raises(ConfigError):
        FamilyConfig(*args)


@pytest.mark.parametrize("family", ["S", "H", "K", "HO", "KO", "SHO", "SKO"])
@given(s=seeds, t=seeds, a=st.integers(0, 1), b=st.integers(0, 1))
def test_closed_under_bracket(family, s, t, a, b):
    c = cfg(family)
    X = random_element(c, a, random.Random(s), 2)
    Y = random_element(c, b, random.Random(t), 2)
    Z = bracket(X, Y)
    for p in Z.parity_parts().values():
        for w, part in _weight_parts(c, p).items():
            if w <= 2:
                assert member(c, part)


def _weight_parts(c, D):
    out = {}
    for k, v in D.terms.items():
        out.setdefault(D.key_weight(k, c.gamma), {})[k] = v
    return {w: VectorField(D.sig, t) for w, t in out.items()}


def test_member_rejects_fields_outside():
    h = cfg("H")
    x1 = SuperPoly.var(h.sig, 1)
    assert member(h, VectorField.d(h.sig, 1))
    assert not member(h, VectorField.term(x1, 1))  # x_1 d_1 alone is not Hamiltonian
    sho = cfg("SHO")
    x = lambda i: SuperPoly.var(sho.sig, i)  # noqa: E731
    assert member(sho, sho.d_x(x(1) * x(2)), primed=True)
    assert not member(sho, sho.d_x(x(1) * x(5)), primed=True)


def test_sko_lambda_changes_degree_zero():
    a = component_basis(cfg("SKO", lam=0), 0)
    b = component_basis(cfg("SKO", lam=1), 0)
    assert a.dim == b.dim == 32
    assert not all(a.contains(v) for v in b.basis)


@pytest.mark.parametrize("config", [cfg("K"), cfg("SKO", lam=Fraction(2, 3))], ids=["K", "SKO"])
def test_algebra_round_trip(config, tmp_path):
    alg = TruncatedAlgebra(config, 1)
    text = alg.to_json()
    again = load_algebra(text)
    assert again.dims() == alg.dims()
    path = tmp_path / "alg.json"
    path.write_text(text)
    assert load_algebra(str(path)).dims() == alg.dims()
    data = json.loads(text)
    a, b, co = data["structure_constants"][0]
    k = next(iter(co))
    co[k] = str(Fraction(co[k]) + 1)
    with pytest.raises(ValueError):
        load_algebra(data)


def test_structure_constants_satisfy_jacobi():
    alg = TruncatedAlgebra(cfg("K"), 1)
    sc = alg.structure_constants()
    low = [a for a in range(len(alg.basis)) if alg.degree[a] < 0]
    mid = [a for a in range(len(alg.basis)) if alg.degree[a] <= 0]
    for x in low:
        for y in low:
            for z in mid:
                lhs = alg.vector(sc.get((x, y), {}))
                lhs = bracket(lhs, alg.basis[z])
                rhs = (bracket(alg.basis[x], bracket(alg.basis[y], alg.basis[z]))
                       - bracket(alg.basis[y], bracket(alg.basis[x], alg.basis[z])).scale(
                           -1 if alg.parity[x] and alg.parity[y] else 1))
                assert lhs == rhs
