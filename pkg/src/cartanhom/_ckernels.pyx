# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in _pykernels.

Monomial arithmetic runs on unsigned 64-bit words; coefficients stay Python
objects (int or Fraction), so results are identical to the reference code.
Signatures whose packed keys would not fit in 63 bits are delegated to the
pure-Python functions.
"""
from . import _pykernels as _py

RBITS = _py.RBITS
RMASK = _py.RMASK
EBITS = _py.EBITS
EMASK = _py.EMASK

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long)
    int __builtin_ctzll(unsigned long long)


cdef inline bint _fits(int m, int n):
    return n + EBITS * m + RBITS <= 62


cdef inline int _odd_parity(u64 a, u64 b):
    # parity of the number of transpositions sorting x_A x_B
    cdef int s = 0
    cdef int p
    while b:
        p = __builtin_ctzll(b)
        s ^= __builtin_popcountll(a >> (p + 1)) & 1
        b &= b - 1
    return s


def guard_mask(m, n):
    return _py.guard_mask(m, n)


def odd_sign(a, b):
    if a >= (1 << 63) or b >= (1 << 63):
        return _py.odd_sign(a, b)
    return -1 if _odd_parity(a, b) else 1


def poly_mul(dict p, dict q, int n, guard):
    if guard.bit_length() > 62:
        return _py.poly_mul(p, q, n, guard)
    cdef u64 oddm = (1ULL << n) - 1
    cdef u64 g = guard
    cdef u64 ma, mb, am, bm, mono
    cdef dict out = {}
    for ka, ca in p.items():
        ma = ka
        am = ma & oddm
        for kb, cb in q.items():
            mb = kb
            bm = mb & oddm
            if am & bm:
                continue
            mono = ma + mb
            if mono & g:
                raise OverflowError("even exponent exceeds 127")
            c = ca * cb
            if am and bm and _odd_parity(am, bm):
                c = -c
            key = mono
            out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


def poly_partial(dict p, int r, int m, int n):
    if not _fits(m, n):
        return _py.poly_partial(p, r, m, n)
    cdef dict out = {}
    cdef u64 mono, unit, bit, below
    cdef int shift
    cdef unsigned int e
    if r < m:
        shift = n + EBITS * r
        unit = 1ULL << shift
        for k, c in p.items():
            mono = k
            e = (mono >> shift) & EMASK
            if e:
                out[mono - unit] = c * e
    else:
        bit = 1ULL << (r - m)
        below = bit - 1
        for k, c in p.items():
            mono = k
            if mono & bit:
                out[mono ^ bit] = -c if __builtin_popcountll(mono & below) & 1 else c
    return out


cdef _apply_into(dict out, dict D, dict E, scale, int m, int n, u64 guard):
    cdef u64 oddm = (1ULL << n) - 1
    cdef u64 kd, ke, a, am, b, bm, mono, unit, bit, below, key
    cdef int r, shift
    cdef long e
    cdef int neg
    for kdo, c in D.items():
        kd = kdo
        r = kd & RMASK
        a = kd >> RBITS
        am = a & oddm
        cs = scale * c
        if r < m:
            shift = n + EBITS * r
            unit = 1ULL << shift
            for keo, d in E.items():
                ke = keo
                b = ke >> RBITS
                e = (b >> shift) & EMASK
                if not e:
                    continue
                b -= unit
                bm = b & oddm
                if am & bm:
                    continue
                mono = a + b
                if mono & guard:
                    raise OverflowError("even exponent exceeds 127")
                if am and bm and _odd_parity(am, bm):
                    e = -e
                key = (mono << RBITS) | (ke & RMASK)
                out[key] = out.get(key, 0) + cs * d * e
        else:
            bit = 1ULL << (r - m)
            below = bit - 1
            for keo, d in E.items():
                ke = keo
                b = ke >> RBITS
                if not b & bit:
                    continue
                neg = __builtin_popcountll(b & below) & 1
                b ^= bit
                bm = b & oddm
                if am & bm:
                    continue
                mono = a + b
                if mono & guard:
                    raise OverflowError("even exponent exceeds 127")
                if am and bm and _odd_parity(am, bm):
                    neg ^= 1
                key = (mono << RBITS) | (ke & RMASK)
                if neg:
                    out[key] = out.get(key, 0) - cs * d
                else:
                    out[key] = out.get(key, 0) + cs * d


def vf_bracket(dict D, dict E, sign, int m, int n, guard):
    if not _fits(m, n):
        return _py.vf_bracket(D, E, sign, m, n, guard)
    cdef dict out = {}
    _apply_into(out, D, E, 1, m, n, guard)
    _apply_into(out, E, D, -sign, m, n, guard)
    return {k: v for k, v in out.items() if v}


def vf_apply(dict D, dict f, int m, int n, guard):
    if not _fits(m, n):
        return _py.vf_apply(D, f, m, n, guard)
    cdef u64 oddm = (1ULL << n) - 1
    cdef u64 g = guard
    cdef u64 kd, a, am, b, bm, mono
    cdef int r
    cdef dict out = {}
    cdef dict cache = {}
    for kdo, c in D.items():
        kd = kdo
        r = kd & RMASK
        a = kd >> RBITS
        am = a & oddm
        df = cache.get(r)
        if df is None:
            df = cache[r] = poly_partial(f, r, m, n)
        for bo, d in (<dict>df).items():
            b = bo
            bm = b & oddm
            if am & bm:
                continue
            mono = a + b
            if mono & g:
                raise OverflowError("even exponent exceeds 127")
            v = c * d
            if am and bm and _odd_parity(am, bm):
                v = -v
            out[mono] = out.get(mono, 0) + v
    return {k: v for k, v in out.items() if v}


def axpy(dict dst, dict src, c):
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)


def combine(dict x, a, dict y, b):
    cdef dict out = {k: a * v for k, v in x.items()}
    for k, v in y.items():
        w = out.get(k, 0) + b * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out
