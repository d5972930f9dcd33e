"""Vector fields on Lambda(m, n): elements sum_r f_r d_r of W(m, n).

Besides the bracket and the action on functions, this module carries the
named constructions used to cut the Cartan-type families out of W(m, n):
D_ij, D_H, D_K, D_HO, D_KO, the divergences and the Euler field.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple

from . import _kernels as K
from .superpoly import MIXED, Scalar, Signature, SignatureError, SuperPoly, scalar

RBITS = K.RBITS
RMASK = K.RMASK

FAMILIES = ("W", "S", "H", "K", "HO", "KO", "SHO", "SKO")


class ParityError(ValueError):
    """An operation that needs a parity-homogeneous input received a mixed one."""


def _sgn(e: int) -> int:
    return -1 if e & 1 else 1


class VectorField:
    """Sparse vector field; ``terms`` maps ``(mono << RBITS) | (r-1)`` to a scalar."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: Signature, terms: Optional[Dict[int, Scalar]] = None, *, _trusted=False):
        self.sig = sig
        if terms is None:
            terms = {}
        elif not _trusted:
            terms = {k: scalar(v) for k, v in terms.items() if v}
        self.terms = terms

    @classmethod
    def zero(cls, sig):
        return cls(sig, {}, _trusted=True)

    @classmethod
    def d(cls, sig: Signature, r: int, coeff=1) -> "VectorField":
        """The coordinate field coeff * d_r."""
        sig.check_index(r)
        c = scalar(coeff)
        return cls(sig, {r - 1: c} if c else {}, _trusted=True)

    @classmethod
    def from_components(cls, sig: Signature, comps: Mapping[int, SuperPoly]) -> "VectorField":
        terms: Dict[int, Scalar] = {}
        for r, f in comps.items():
            sig.check_index(r)
            if f.sig != sig:
                raise SignatureError("component signature mismatch")
            for mono, c in f.terms.items():
                terms[(mono << RBITS) | (r - 1)] = c
        return cls(sig, terms, _trusted=True)

    @classmethod
    def term(cls, f: SuperPoly, r: int) -> "VectorField":
        """f * d_r."""
        return cls.from_components(f.sig, {r: f})

    # arithmetic ---------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, VectorField):
            return None
        if other.sig != self.sig:
            raise SignatureError(f"signature mismatch: {self.sig} vs {other.sig}")
        return other

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, VectorField):
            return self.sig == other.sig and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.sig, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        K.axpy(out, other.terms, 1)
        return VectorField(self.sig, out, _trusted=True)

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        K.axpy(out, other.terms, -1)
        return VectorField(self.sig, out, _trusted=True)

    def __neg__(self):
        return VectorField(self.sig, {k: -v for k, v in self.terms.items()}, _trusted=True)

    def scale(self, c) -> "VectorField":
        c = scalar(c)
        if not c:
            return VectorField.zero(self.sig)
        return VectorField(self.sig, {k: scalar(v * c) for k, v in self.terms.items()}, _trusted=True)

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def lmul(self, f: SuperPoly) -> "VectorField":
        """The field f * D (coefficients multiplied on the left)."""
        out: Dict[int, Scalar] = {}
        for r, comp in self.components().items():
            for mono, c in (f * comp).terms.items():
                out[(mono << RBITS) | (r - 1)] = c
        return VectorField(self.sig, out, _trusted=True)

    # structure ------------------------------------------------------------------
    def components(self) -> Dict[int, SuperPoly]:
        """Nonzero coefficients, keyed by the 1-based index r of d_r."""
        comps: Dict[int, Dict[int, Scalar]] = {}
        for key, c in self.terms.items():
            comps.setdefault((key & RMASK) + 1, {})[key >> RBITS] = c
        return {r: SuperPoly(self.sig, t, _trusted=True) for r, t in sorted(comps.items())}

    def component(self, r: int) -> SuperPoly:
        self.sig.check_index(r)
        return SuperPoly(self.sig, {k >> RBITS: c for k, c in self.terms.items() if (k & RMASK) == r - 1},
                         _trusted=True)

    def key_parity(self, key: int) -> int:
        return ((key >> RBITS) & self.sig.odd_mask).bit_count() + ((key & RMASK) >= self.sig.m) & 1

    def parity(self):
        """0/1, None for the zero field, MIXED when terms disagree."""
        ps = {self.key_parity(k) for k in self.terms}
        if not ps:
            return None
        if len(ps) > 1:
            return MIXED
        return ps.pop()

    def key_weight(self, key: int, gamma: Sequence[int]) -> int:
        return self.sig.mono_weight(key >> RBITS, gamma) - gamma[key & RMASK]

    def weight(self, gamma: Optional[Sequence[int]] = None):
        if not self.terms:
            raise ValueError("the weight of the zero field is undefined")
        gamma = gamma or (1,) * self.sig.size
        ws = {self.key_weight(k, gamma) for k in self.terms}
        if len(ws) > 1:
            return MIXED
        return ws.pop()

    def parity_parts(self) -> Dict[int, "VectorField"]:
        parts: Dict[int, Dict[int, Scalar]] = {0: {}, 1: {}}
        for k, v in self.terms.items():
            parts[self.key_parity(k)][k] = v
        return {p: VectorField(self.sig, t, _trusted=True) for p, t in parts.items() if t}

    def homogeneous_parity(self) -> int:
        p = self.parity()
        if p == MIXED:
            raise ParityError("vector field is not parity-homogeneous")
        return 0 if p is None else p

    def items(self) -> Iterator[Tuple[int, SuperPoly]]:
        return iter(self.components().items())

    def normalize(self) -> "VectorField":
        return VectorField(self.sig, {k: scalar(v) for k, v in self.terms.items() if v}, _trusted=True)

    # action -----------------------------------------------------------------------
    def apply(self, f: SuperPoly) -> SuperPoly:
        """D(f) = sum_r f_r d_r(f)."""
        if f.sig != self.sig:
            raise SignatureError("signature mismatch")
        s = self.sig
        return SuperPoly(s, K.vf_apply(self.terms, f.terms, s.m, s.n, s.guard), _trusted=True)

    __call__ = apply

    def bracket(self, other: "VectorField") -> "VectorField":
        return bracket(self, other)

    def __str__(self):
        from .printing import format_field

        return format_field(self)

    def __repr__(self):
        return f"VectorField({self.sig.m},{self.sig.n}: {self})"


def apply(D: VectorField, f: SuperPoly) -> SuperPoly:
    return D.apply(f)


def bracket(D: VectorField, E: VectorField) -> VectorField:
    """Supercommutator [D, E] of parity-homogeneous fields."""
    if E.sig != D.sig:
        raise SignatureError("signature mismatch")
    pd, pe = D.homogeneous_parity(), E.homogeneous_parity()
    s = D.sig
    sign = -1 if pd & pe else 1
    return VectorField(s, K.vf_bracket(D.terms, E.terms, sign, s.m, s.n, s.guard), _trusted=True)


def bracket_any(D: VectorField, E: VectorField) -> VectorField:
    """Bilinear extension of the bracket to inhomogeneous fields."""
    out = VectorField.zero(D.sig)
    for a in D.parity_parts().values():
        for b in E.parity_parts().values():
            out = out + bracket(a, b)
    return out


def _homog(f: SuperPoly) -> int:
    p = f.parity()
    if p == MIXED:
        raise ParityError("polynomial is not parity-homogeneous")
    return 0 if p is None else p


def div(D: VectorField) -> SuperPoly:
    """div(sum f_r d_r) = sum (-1)^{|d_r||f_r|} d_r(f_r)."""
    s = D.sig
    out = SuperPoly.zero(s)
    for r, f in D.components().items():
        pf = _homog(f)
        term = f.partial(r)
        if r > s.m and pf:
            term = -term
        out = out + term
    return out


def euler(sig: Signature, upto: Optional[int] = None) -> VectorField:
    """The field sum_{i<=upto} x_i d_i; ``upto`` defaults to 2m."""
    upto = 2 * sig.m if upto is None else upto
    out = VectorField.zero(sig)
    for i in range(1, upto + 1):
        out = out + VectorField.term(SuperPoly.var(sig, i), i)
    return out


# index maps ------------------------------------------------------------------------
class IndexMaps:
    """The involution i -> i', the sign tau and the distinguished index nu of a family."""

    def __init__(self, family: str, m: int, n: int):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        self.family, self.m, self.n = family, m, n
        if family in ("H", "K"):
            if family == "H" and m % 2:
                raise ValueError("H needs even m")
            if family == "K" and not m % 2:
                raise ValueError("K needs odd m")
            self.r = m // 2
        elif family in ("HO", "SHO"):
            if n != m:
                raise ValueError(f"{family} needs n = m")
        elif family in ("KO", "SKO"):
            if n != m + 1:
                raise ValueError(f"{family} needs n = m + 1")

    @property
    def nu(self) -> Optional[int]:
        if self.family == "K":
            return self.m
        if self.family in ("KO", "SKO"):
            return 2 * self.m + 1
        return None

    def iprime(self, i: int) -> int:
        m, fam = self.m, self.family
        if not 1 <= i <= m + self.n:
            raise IndexError(f"index {i} out of range")
        if fam in ("H", "K"):
            r = self.r
            if i <= r:
                return i + r
            if i <= 2 * r:
                return i - r
            if i > m:
                return i
            raise IndexError(f"i' is undefined for the distinguished index {i}")
        if fam in ("HO", "KO", "SHO", "SKO"):
            if i <= m:
                return i + m
            if i <= 2 * m:
                return i - m
            raise IndexError(f"i' is undefined for the distinguished index {i}")
        raise ValueError(f"family {fam} has no index involution")

    def tau(self, i: int) -> int:
        if self.family not in ("H", "K"):
            raise ValueError("tau is defined for H and K only")
        if not 1 <= i <= self.m + self.n:
            raise IndexError(f"index {i} out of range")
        r = self.r
        if i <= r:
            return 1
        if i <= 2 * r:
            return -1
        if i > self.m:
            return 1
        raise IndexError(f"tau is undefined for the distinguished index {i}")

    def indices(self):
        """1..m+n with nu removed."""
        return [i for i in range(1, self.m + self.n + 1) if i != self.nu]


# the named operators ------------------------------------------------------------------
def _field_term(f: SuperPoly, r: int, c: int = 1) -> Dict[int, Scalar]:
    return {(mono << RBITS) | (r - 1): c * v for mono, v in f.terms.items()}


def _accumulate(out: Dict[int, Scalar], f: SuperPoly, r: int, c: int) -> None:
    K.axpy(out, _field_term(f, r), c)


def d_ij(i: int, j: int, f: SuperPoly) -> VectorField:
    """D_ij(f) = (-1)^{|d_i||d_j|} d_i(f) d_j - (-1)^{(|d_i|+|d_j|)|f|} d_j(f) d_i."""
    s = f.sig
    s.check_index(i)
    s.check_index(j)
    pf = _homog(f)
    pi, pj = int(i > s.m), int(j > s.m)
    out: Dict[int, Scalar] = {}
    _accumulate(out, f.partial(i), j, _sgn(pi * pj))
    _accumulate(out, f.partial(j), i, -_sgn((pi + pj) * pf))
    return VectorField(s, {k: v for k, v in out.items() if v}, _trusted=True)


def d_h(f: SuperPoly, maps: IndexMaps) -> VectorField:
    """D_H(f) = sum_i tau(i) (-1)^{|d_i||f|} d_i(f) d_{i'}."""
    s = f.sig
    if s.m % 2:
        raise ValueError("D_H needs even m")
    if maps.family not in ("H",) or maps.m != s.m or maps.n != s.n:
        raise ValueError("D_H needs the index maps of H(m, n)")
    pf = _homog(f)
    out: Dict[int, Scalar] = {}
    for i in range(1, s.size + 1):
        c = maps.tau(i) * (_sgn(pf) if i > s.m else 1)
        _accumulate(out, f.partial(i), maps.iprime(i), c)
    return VectorField(s, {k: v for k, v in out.items() if v}, _trusted=True)


def d_k(f: SuperPoly, maps: IndexMaps) -> VectorField:
    """D_K(f): the contact field of f, m = 2r + 1 with distinguished index m."""
    s = f.sig
    if not s.m % 2:
        raise ValueError("D_K needs odd m")
    if maps.family != "K" or maps.m != s.m or maps.n != s.n:
        raise ValueError("D_K needs the index maps of K(m, n)")
    pf = _homog(f)
    m = s.m
    dm = f.partial(m)
    out: Dict[int, Scalar] = {}
    euler_f = SuperPoly.zero(s)
    for i in range(1, s.size + 1):
        if i == m:
            continue
        ip = maps.iprime(i)
        xi = SuperPoly.var(s, i)
        coef = xi * dm + f.partial(ip).scale(maps.tau(ip))
        _accumulate(out, coef, i, _sgn(pf) if i > m else 1)
        euler_f = euler_f + xi * f.partial(i)
    _accumulate(out, f.scale(2) - euler_f, m, 1)
    return VectorField(s, {k: v for k, v in out.items() if v}, _trusted=True)


def _d_ho_part(f: SuperPoly, m: int) -> Dict[int, Scalar]:
    s = f.sig
    pf = _homog(f)
    out: Dict[int, Scalar] = {}
    for i in range(1, 2 * m + 1):
        ip = i + m if i <= m else i - m
        _accumulate(out, f.partial(i), ip, _sgn(pf) if i > m else 1)
    return out


def d_ho(f: SuperPoly, maps: IndexMaps) -> VectorField:
    """D_HO(f) = sum_{i<=2m} (-1)^{|d_i||f|} d_i(f) d_{i'}."""
    s = f.sig
    if s.n != s.m:
        raise ValueError("D_HO needs n = m")
    if maps.family not in ("HO", "SHO") or maps.m != s.m:
        raise ValueError("D_HO needs the index maps of HO(m, m)")
    out = _d_ho_part(f, s.m)
    return VectorField(s, {k: v for k, v in out.items() if v}, _trusted=True)


def _euler_apply(f: SuperPoly, m: int) -> SuperPoly:
    s = f.sig
    out = SuperPoly.zero(s)
    for i in range(1, 2 * m + 1):
        out = out + SuperPoly.var(s, i) * f.partial(i)
    return out


def d_ko(f: SuperPoly, maps: IndexMaps) -> VectorField:
    """D_KO(f) = D_HO(f) + (-1)^{|f|} d_{2m+1}(f) E + (E(f) - 2f) d_{2m+1}, E the Euler field."""
    s = f.sig
    if s.n != s.m + 1:
        raise ValueError("D_KO needs n = m + 1")
    if maps.family not in ("KO", "SKO") or maps.m != s.m:
        raise ValueError("D_KO needs the index maps of KO(m, m+1)")
    m = s.m
    pf = _homog(f)
    out = _d_ho_part(f, m)
    t = f.partial(2 * m + 1)
    if t:
        c = _sgn(pf)
        for i in range(1, 2 * m + 1):
            _accumulate(out, t * SuperPoly.var(s, i), i, c)
    _accumulate(out, _euler_apply(f, m) - f.scale(2), 2 * m + 1, 1)
    return VectorField(s, {k: v for k, v in out.items() if v}, _trusted=True)


def div_lambda(f: SuperPoly, lam, maps: IndexMaps) -> SuperPoly:
    """div_lambda(f) = (-1)^{|f|} 2 (sum_{i<=m} d_i d_{i'}(f) + (E - m lam) d_{2m+1}(f))."""
    s = f.sig
    if s.n != s.m + 1:
        raise ValueError("div_lambda needs the signature (m, m+1)")
    lam = scalar(lam)
    m = s.m
    pf = _homog(f)
    acc = SuperPoly.zero(s)
    for i in range(1, m + 1):
        acc = acc + f.partial(i + m).partial(i)
    t = f.partial(2 * m + 1)
    acc = acc + _euler_apply(t, m) - t.scale(m * lam)
    return acc.scale(2 * _sgn(pf))


def operator_for(family: str):
    """The D_X presentation map for a family (None for W and S)."""
    return {"H": d_h, "K": d_k, "HO": d_ho, "SHO": d_ho, "KO": d_ko, "SKO": d_ko}.get(family)


def nu_of(family: str, m: int) -> Optional[int]:
    if family == "K":
        return m
    if family in ("KO", "SKO"):
        return 2 * m + 1
    return None


def bracket_formula(family: str, f: SuperPoly, g: SuperPoly, maps: Optional[IndexMaps] = None,
                    literal: bool = True) -> VectorField:
    """D_X(D_X(f)(g) - 2(delta_{X,K} - (-1)^{|f|} delta_{X,KO}) d_nu(f) g).

    SKO takes the KO correction and SHO the HO one (no correction). With
    ``literal=False`` the KO term is -(-1)^{|f|} instead of (-1)^{|f|}; that
    is the identity the operators above satisfy.
    """
    op = operator_for(family)
    if op is None:
        raise ValueError(f"family {family} has no D_X presentation")
    s = f.sig
    maps = maps or IndexMaps(family, s.m, s.n)
    inner = op(f, maps).apply(g)
    nu = maps.nu
    if nu is not None:
        if family == "K":
            c = 1
        else:
            c = -_sgn(_homog(f)) if literal else _sgn(_homog(f))
        corr = f.partial(nu) * g
        inner = inner - corr.scale(2 * c)
    return op(inner, maps) if inner else VectorField.zero(s)
