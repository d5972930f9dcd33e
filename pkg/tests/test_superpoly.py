import random

import pytest
from hypothesis import given

from cartanhom.superpoly import (
    Signature, SignatureError, SuperMonomial, SuperPoly, mono_mul, monomials_of_weight, partial,
    random_homogeneous,
)
from conftest import SIG, parities, poly, seeds

x = lambda i: SuperPoly.var(SIG, i)  # noqa: E731


def mono(exps, odd=()):
    return SuperMonomial(tuple(exps), tuple(odd))


def test_mono_mul_examples():
    assert mono_mul(SIG, mono((2, 0, 0, 0)), mono((1, 0, 0, 0))) == (1, mono((3, 0, 0, 0)))
    assert mono_mul(SIG, mono((0,) * 4, (5,)), mono((0,) * 4, (5,))) == (0, None)
    assert mono_mul(SIG, mono((0,) * 4, (6,)), mono((0,) * 4, (5,))) == (-1, mono((0,) * 4, (5, 6)))


def test_mono_mul_signature_mismatch():
    with pytest.raises(SignatureError):
        mono_mul(SIG, mono((1, 0, 0)), mono((1, 0, 0, 0)))


def test_poly_mul_examples():
    assert (x(1) + x(5)) * (x(1) - x(5)) == x(1) ** 2
    p = x(2) * x(7) + x(3)
    assert p * SuperPoly.const(SIG) == p
    lhs = (x(5) * x(6)) * (x(7) * x(8))
    assert lhs == SuperPoly(SIG, {SIG.pack((0,) * 4, (5, 6, 7, 8))[1]: 1})
    assert x(6) * x(5) == -(x(5) * x(6))


def test_signature_mismatch_in_arithmetic():
    other = Signature(5, 4)
    with pytest.raises(SignatureError):
        x(1) * SuperPoly.var(other, 1)


def test_partial_sign_by_position():
    f = x(5) * x(6) * x(7)
    assert partial(6, f) == -(x(5) * x(7))
    assert partial(7, f) == x(5) * x(6)
    assert partial(1, x(1) ** 3 * x(2)) == (x(1) ** 2 * x(2)).scale(3)


def test_random_homogeneous_contract():
    a = random_homogeneous(SIG, 0, 3, 1)
    assert a == random_homogeneous(SIG, 0, 3, 1)
    assert random_homogeneous(SIG, 1, 0, 5).is_zero()
    assert random_homogeneous(SIG, 0, 2, 2) == random_homogeneous(SIG, 0, 2, 2)
    assert a.parity() == 0


def test_monomials_of_weight_counts():
    # weight 1 monomials of Lambda(4, 4) with the standard grading: the 8 variables
    assert len(monomials_of_weight(SIG, 1)) == 8
    assert len(monomials_of_weight(SIG, 0)) == 1


def sgn(a, b):
    return -1 if a and b else 1


@given(seeds, seeds, parities, parities)
def test_supercommutativity(s, t, a, b):
    p, q = poly(s, a), poly(t, b)
    assert p * q == (q * p).scale(sgn(a, b))


def test_supercommutativity_1000_pairs():
    rng = random.Random(11)
    for _ in range(1000):
        a, b = rng.randint(0, 1), rng.randint(0, 1)
        p = random_homogeneous(SIG, a, 3, rng)
        q = random_homogeneous(SIG, b, 3, rng)
        assert p * q == (q * p).scale(sgn(a, b))


@given(seeds, seeds, seeds, parities, parities, parities)
def test_associativity(s, t, u, a, b, c):
    p, q, r = poly(s, a), poly(t, b), poly(u, c)
    assert (p * q) * r == p * (q * r)


@given(seeds, seeds, parities, parities, parities)
def test_super_leibniz(s, t, a, b, rr):
    f, g = poly(s, a), poly(t, b)
    for r in range(1, 9):
        odd_r = int(SIG.is_odd(r))
        assert partial(r, f * g) == partial(r, f) * g + (f * partial(r, g)).scale(sgn(odd_r, a))


@given(seeds, parities)
def test_partials_supercommute(s, a):
    f = poly(s, a, max_weight=4)
    for r in range(1, 9):
        for q in range(1, 9):
            lhs = partial(r, partial(q, f))
            rhs = partial(q, partial(r, f)).scale(sgn(SIG.is_odd(r), SIG.is_odd(q)))
            assert lhs == rhs
        if SIG.is_odd(r):
            assert partial(r, partial(r, f)).is_zero()


@given(seeds, parities)
def test_normalize_idempotent(s, a):
    p = poly(s, a)
    assert p.normalize() == p.normalize().normalize() == p


@given(seeds, parities)
def test_pack_unpack_roundtrip(s, a):
    for k in poly(s, a).terms:
        m = SuperMonomial.unpack(SIG, k)
        assert m.pack(SIG) == k
        assert m.parity() == SIG.mono_parity(k)
