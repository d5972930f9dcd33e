"""Pure-Python reference kernels.

Monomials of Lambda(m, n) are packed into a single int::

    mono = (e_1 << n) | (e_2 << (n + 8)) | ... | odd_mask

Each even exponent owns an 8-bit field whose top bit is a carry guard, so
exponents are limited to 127. The odd part is a bit mask over the n odd
variables (bit p <-> x_{m+1+p}), and the product of two monomials with
disjoint odd masks is simply ``a + b``.

A vector-field term f * d_r is keyed by ``(mono << RBITS) | r`` with r the
zero-based global index.

Every function here has a drop-in compiled twin in ``_ckernels.pyx``.
"""

RBITS = 6
RMASK = (1 << RBITS) - 1
EBITS = 8
EMASK = 0x7F


def guard_mask(m, n):
    g = 0
    for r in range(m):
        g |= 0x80 << (n + EBITS * r)
    return g


def odd_sign(a, b):
    """Sign (+1/-1) of sorting the concatenation x_A x_B into ascending order."""
    s = 0
    while b:
        low = b & -b
        s ^= (a >> low.bit_length()).bit_count() & 1
        b ^= low
    return -1 if s else 1


def poly_mul(p, q, n, guard):
    oddm = (1 << n) - 1
    out = {}
    get = out.get
    for ma, ca in p.items():
        am = ma & oddm
        for mb, cb in q.items():
            bm = mb & oddm
            if am & bm:
                continue
            mono = ma + mb
            if mono & guard:
                raise OverflowError("even exponent exceeds 127")
            c = ca * cb
            if bm and am and odd_sign(am, bm) < 0:
                c = -c
            out[mono] = get(mono, 0) + c
    return {k: v for k, v in out.items() if v}


def poly_partial(p, r, m, n):
    out = {}
    if r < m:
        shift = n + EBITS * r
        unit = 1 << shift
        for mono, c in p.items():
            e = (mono >> shift) & EMASK
            if e:
                out[mono - unit] = c * e
    else:
        bit = 1 << (r - m)
        below = bit - 1
        for mono, c in p.items():
            if mono & bit:
                out[mono ^ bit] = -c if (mono & below).bit_count() & 1 else c
    return out


def _apply_into(out, D, E, scale, m, n, guard):
    # out += scale * sum_k D(E_k) d_k, with D and E given as vector-field term maps
    oddm = (1 << n) - 1
    get = out.get
    for kd, c in D.items():
        r = kd & RMASK
        a = kd >> RBITS
        am = a & oddm
        cs = scale * c
        if r < m:
            shift = n + EBITS * r
            unit = 1 << shift
            for ke, d in E.items():
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
                coef = e
                if am and bm and odd_sign(am, bm) < 0:
                    coef = -coef
                key = (mono << RBITS) | (ke & RMASK)
                out[key] = get(key, 0) + cs * d * coef
        else:
            bit = 1 << (r - m)
            below = bit - 1
            for ke, d in E.items():
                b = ke >> RBITS
                if not b & bit:
                    continue
                coef = -1 if (b & below).bit_count() & 1 else 1
                b ^= bit
                bm = b & oddm
                if am & bm:
                    continue
                mono = a + b
                if mono & guard:
                    raise OverflowError("even exponent exceeds 127")
                if am and bm and odd_sign(am, bm) < 0:
                    coef = -coef
                key = (mono << RBITS) | (ke & RMASK)
                out[key] = get(key, 0) + cs * d * coef


def vf_bracket(D, E, sign, m, n, guard):
    """Terms of [D, E] = sum_k (D(E_k) - sign * E(D_k)) d_k, sign = (-1)^{|D||E|}."""
    out = {}
    _apply_into(out, D, E, 1, m, n, guard)
    _apply_into(out, E, D, -sign, m, n, guard)
    return {k: v for k, v in out.items() if v}


def vf_apply(D, f, m, n, guard):
    """sum_r D_r * d_r(f) for a vector field D and a polynomial f."""
    oddm = (1 << n) - 1
    out = {}
    get = out.get
    cache = {}
    for kd, c in D.items():
        r = kd & RMASK
        a = kd >> RBITS
        am = a & oddm
        df = cache.get(r)
        if df is None:
            df = cache[r] = poly_partial(f, r, m, n)
        for b, d in df.items():
            bm = b & oddm
            if am & bm:
                continue
            mono = a + b
            if mono & guard:
                raise OverflowError("even exponent exceeds 127")
            v = c * d
            if am and bm and odd_sign(am, bm) < 0:
                v = -v
            out[mono] = get(mono, 0) + v
    return {k: v for k, v in out.items() if v}


def axpy(dst, src, c):
    """dst += c * src in place, dropping entries that cancel."""
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)


def combine(x, a, y, b):
    """Return a * x + b * y as a new sparse vector."""
    out = {k: a * v for k, v in x.items()}
    for k, v in y.items():
        w = out.get(k, 0) + b * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out
