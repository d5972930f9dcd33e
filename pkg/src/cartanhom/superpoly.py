"""Exact arithmetic in the supercommutative algebra Lambda(m, n).

Lambda(m, n) is the polynomial algebra in the even variables x_1..x_m
tensored with the Grassmann algebra on the odd variables x_{m+1}..x_{m+n}.
Indices are global and 1-based everywhere in the public API.

Scalars are exact rationals: Python ``int`` when integral, otherwise
``fractions.Fraction`` (always reduced by construction).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Iterator, NamedTuple, Optional, Sequence, Tuple, Union

from . import _kernels as K

Scalar = Union[int, Fraction]
MIXED = "mixed"


def scalar(c) -> Scalar:
    """Coerce to an exact rational; integral values come back as ``int``."""
    if isinstance(c, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        return scalar(Fraction(c))
    if isinstance(c, float):
        raise TypeError("floating-point scalars are not allowed; use Fraction or a string")
    raise TypeError(f"cannot use {type(c).__name__} as an exact scalar")


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """Numbers of even (m) and odd (n) indeterminates."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"need m >= 1 and n >= 1, got ({self.m}, {self.n})")
        if self.m > 8 or self.m + self.n > 63:
            raise ValueError("signature too large for the packed monomial layout")

    @property
    def size(self) -> int:
        return self.m + self.n

    def standard_regime(self) -> bool:
        """True when m > 3 and n > 3."""
        return self.m > 3 and self.n > 3

    def is_odd(self, i: int) -> bool:
        self.check_index(i)
        return i > self.m

    def check_index(self, i: int) -> None:
        if not 1 <= i <= self.m + self.n:
            raise IndexError(f"index {i} out of range 1..{self.m + self.n}")

    @cached_property
    def guard(self) -> int:
        return K.guard_mask(self.m, self.n)

    @cached_property
    def odd_mask(self) -> int:
        return (1 << self.n) - 1

    # packing -------------------------------------------------------------
    def pack(self, exps: Sequence[int], odd: Iterable[int] = ()) -> Tuple[int, int]:
        """Pack exponents and an odd index list; return (sign, packed monomial).

        The sign accounts for sorting ``odd`` into ascending order; it is 0
        when an odd index repeats.
        """
        if len(exps) != self.m:
            raise SignatureError(f"expected {self.m} even exponents, got {len(exps)}")
        mono = 0
        for r, e in enumerate(exps):
            if e < 0 or e > K.EMASK:
                raise ValueError(f"even exponent {e} outside 0..{K.EMASK}")
            mono |= e << (self.n + K.EBITS * r)
        mask = 0
        sign = 1
        for i in odd:
            if not self.m < i <= self.m + self.n:
                raise IndexError(f"{i} is not an odd index for {self}")
            bit = 1 << (i - self.m - 1)
            if mask & bit:
                return 0, 0
            # moving x_i left past the larger indices already placed
            if (mask >> (i - self.m)).bit_count() & 1:
                sign = -sign
            mask |= bit
        return sign, mono | mask

    def exps(self, mono: int) -> Tuple[int, ...]:
        return tuple((mono >> (self.n + K.EBITS * r)) & K.EMASK for r in range(self.m))

    def odd_indices(self, mono: int) -> Tuple[int, ...]:
        mask = mono & self.odd_mask
        return tuple(self.m + 1 + p for p in range(self.n) if mask >> p & 1)

    def degree_vector(self, mono: int) -> Tuple[int, ...]:
        """Exponent of every variable (odd ones are 0/1)."""
        mask = mono & self.odd_mask
        return self.exps(mono) + tuple(mask >> p & 1 for p in range(self.n))

    def mono_weight(self, mono: int, gamma: Sequence[int]) -> int:
        return sum(e * g for e, g in zip(self.degree_vector(mono), gamma))

    def mono_parity(self, mono: int) -> int:
        return (mono & self.odd_mask).bit_count() & 1

    def mono_order_key(self, mono: int):
        dv = self.degree_vector(mono)
        return (sum(dv), tuple(-e for e in self.exps(mono)), self.odd_indices(mono))

    def __str__(self):
        return f"Lambda({self.m},{self.n})"


class SuperMonomial(NamedTuple):
    """x^even_exponents times the ascending product of the odd variables in odd_set."""

    even_exponents: Tuple[int, ...]
    odd_set: Tuple[int, ...]

    def parity(self) -> int:
        return len(self.odd_set) & 1

    def weight(self, gamma: Sequence[int]) -> int:
        return sum(e * g for e, g in zip(self.even_exponents, gamma)) + sum(gamma[j - 1] for j in self.odd_set)

    def pack(self, sig: Signature) -> int:
        if list(self.odd_set) != sorted(set(self.odd_set)):
            raise ValueError("odd_set must be strictly ascending")
        return sig.pack(self.even_exponents, self.odd_set)[1]

    @classmethod
    def unpack(cls, sig: Signature, mono: int) -> "SuperMonomial":
        return cls(sig.exps(mono), sig.odd_indices(mono))


def mono_mul(sig: Signature, a: SuperMonomial, b: SuperMonomial) -> Tuple[int, Optional[SuperMonomial]]:
    """Product of two monomials as (sign, monomial); (0, None) when it vanishes."""
    if len(a.even_exponents) != sig.m or len(b.even_exponents) != sig.m:
        raise SignatureError("monomial does not match the signature")
    pa, pb = a.pack(sig), b.pack(sig)
    am, bm = pa & sig.odd_mask, pb & sig.odd_mask
    if am & bm:
        return 0, None
    prod = pa + pb
    if prod & sig.guard:
        raise OverflowError("even exponent exceeds 127")
    return K.odd_sign(am, bm), SuperMonomial.unpack(sig, prod)


class SuperPoly:
    """Sparse element of Lambda(m, n) with exact rational coefficients.

    ``terms`` maps packed monomials to nonzero scalars. Instances are treated
    as immutable.
    """

    __slots__ = ("sig", "terms")

    def __init__(self, sig: Signature, terms: Optional[Dict[int, Scalar]] = None, *, _trusted=False):
        self.sig = sig
        if terms is None:
            terms = {}
        elif not _trusted:
            terms = {k: scalar(v) for k, v in terms.items() if v}
        self.terms = terms

    # constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, sig):
        return cls(sig, {}, _trusted=True)

    @classmethod
    def const(cls, sig, c=1):
        c = scalar(c)
        return cls(sig, {0: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, sig, i, c=1):
        sig.check_index(i)
        if i <= sig.m:
            exps = [0] * sig.m
            exps[i - 1] = 1
            _, mono = sig.pack(exps)
        else:
            _, mono = sig.pack([0] * sig.m, [i])
        return cls(sig, {mono: scalar(c)}, _trusted=True)

    @classmethod
    def monomial(cls, sig, exps, odd=(), c=1):
        """c * x^exps * x_{odd[0]} * x_{odd[1]} * ... in the given (not necessarily sorted) order."""
        sign, mono = sig.pack(exps, odd)
        c = scalar(c) * sign
        return cls(sig, {mono: c} if c else {}, _trusted=True)

    @classmethod
    def from_monomials(cls, sig, items: Iterable[Tuple[SuperMonomial, Scalar]]):
        out: Dict[int, Scalar] = {}
        for mono, c in items:
            k = mono.pack(sig)
            out[k] = out.get(k, 0) + scalar(c)
        return cls(sig, {k: v for k, v in out.items() if v}, _trusted=True)

    # basic protocol ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, SuperPoly):
            return None
        if other.sig != self.sig:
            raise SignatureError(f"signature mismatch: {self.sig} vs {other.sig}")
        return other

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, SuperPoly):
            return self.sig == other.sig and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == SuperPoly.const(self.sig, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.sig, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SuperPoly.const(self.sig, other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        K.axpy(out, other.terms, 1)
        return SuperPoly(self.sig, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return SuperPoly(self.sig, {k: -v for k, v in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SuperPoly.const(self.sig, other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        K.axpy(out, other.terms, -1)
        return SuperPoly(self.sig, out, _trusted=True)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "SuperPoly":
        c = scalar(c)
        if not c:
            return SuperPoly.zero(self.sig)
        return SuperPoly(self.sig, {k: scalar(v * c) for k, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        return SuperPoly(self.sig, K.poly_mul(self.terms, other.terms, self.sig.n, self.sig.guard), _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = SuperPoly.const(self.sig, 1)
        for _ in range(k):
            out = out * self
        return out

    # structure ---------------------------------------------------------------
    def partial(self, r: int) -> "SuperPoly":
        """Superderivation d_r (1-based index)."""
        self.sig.check_index(r)
        return SuperPoly(self.sig, K.poly_partial(self.terms, r - 1, self.sig.m, self.sig.n), _trusted=True)

    def parity(self):
        """0 or 1; None for the zero polynomial (compatible with both); MIXED otherwise."""
        ps = {self.sig.mono_parity(k) for k in self.terms}
        if not ps:
            return None
        if len(ps) > 1:
            return MIXED
        return ps.pop()

    def weight(self, gamma: Optional[Sequence[int]] = None):
        """Common gamma-weight of all terms, or MIXED. Raises on zero."""
        if not self.terms:
            raise ValueError("the weight of the zero polynomial is undefined")
        gamma = gamma or (1,) * self.sig.size
        ws = {self.sig.mono_weight(k, gamma) for k in self.terms}
        if len(ws) > 1:
            return MIXED
        return ws.pop()

    def parity_parts(self) -> Dict[int, "SuperPoly"]:
        parts: Dict[int, Dict[int, Scalar]] = {0: {}, 1: {}}
        for k, v in self.terms.items():
            parts[self.sig.mono_parity(k)][k] = v
        return {p: SuperPoly(self.sig, t, _trusted=True) for p, t in parts.items() if t}

    def coefficient(self, mono: SuperMonomial) -> Scalar:
        return self.terms.get(mono.pack(self.sig), 0)

    def items(self) -> Iterator[Tuple[SuperMonomial, Scalar]]:
        """Terms in graded lexicographic order."""
        for k in sorted(self.terms, key=self.sig.mono_order_key):
            yield SuperMonomial.unpack(self.sig, k), self.terms[k]

    def normalize(self) -> "SuperPoly":
        return SuperPoly(self.sig, {k: scalar(v) for k, v in self.terms.items() if v}, _trusted=True)

    def __str__(self):
        from .printing import format_poly

        return format_poly(self)

    def __repr__(self):
        return f"SuperPoly({self.sig.m},{self.sig.n}: {self})"


def poly_add(p: SuperPoly, q: SuperPoly) -> SuperPoly:
    return p + q


def poly_mul(p: SuperPoly, q: SuperPoly) -> SuperPoly:
    return p * q


def poly_scale(p: SuperPoly, c) -> SuperPoly:
    return p.scale(c)


def partial(r: int, p: SuperPoly) -> SuperPoly:
    return p.partial(r)


def weight(p: SuperPoly, gamma: Optional[Sequence[int]] = None):
    return p.weight(gamma)


# enumeration ------------------------------------------------------------------
def monomials_of_weight(sig: Signature, w: int, gamma: Optional[Sequence[int]] = None) -> list:
    """All packed monomials of exact gamma-weight ``w``, in graded-lex order."""
    gamma = tuple(gamma or (1,) * sig.size)
    if w < 0:
        return []
    out = []
    m, n = sig.m, sig.n
    odd_g = gamma[m:]

    def even_parts(r, rem, acc):
        if r == m:
            yield tuple(acc), rem
            return
        g = gamma[r]
        e = 0
        while e * g <= rem:
            acc.append(e)
            yield from even_parts(r + 1, rem - e * g, acc)
            acc.pop()
            e += 1

    for exps, rem in even_parts(0, w, []):
        for mask in range(1 << n):
            if sum(odd_g[p] for p in range(n) if mask >> p & 1) == rem:
                _, mono = sig.pack(exps)
                out.append(mono | mask)
    out.sort(key=sig.mono_order_key)
    return out


def random_homogeneous(sig: Signature, parity: int, max_weight: int, seed, *,
                       gamma: Optional[Sequence[int]] = None, max_terms: int = 4,
                       max_coeff: int = 5) -> SuperPoly:
    """Deterministic pseudo-random polynomial of a single parity.

    Monomials are drawn with gamma-weight <= max_weight; equal seeds give
    equal results.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    pool = [k for w in range(max_weight + 1) for k in monomials_of_weight(sig, w, gamma)
            if sig.mono_parity(k) == parity]
    if not pool:
        return SuperPoly.zero(sig)
    terms: Dict[int, Scalar] = {}
    for _ in range(rng.randint(1, max_terms)):
        c = rng.randint(1, max_coeff) * rng.choice((-1, 1))
        if rng.random() < 0.2:
            c = Fraction(c, rng.randint(2, 4))
        k = rng.choice(pool)
        terms[k] = scalar(terms.get(k, 0) + c)
    return SuperPoly(sig, terms)
