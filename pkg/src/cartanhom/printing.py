"""Canonical text forms: ``3*x1^2*x5 - 1/2*x6``, ``x1*p2 + 2*p5``."""
from __future__ import annotations

from fractions import Fraction

from .superpoly import SuperPoly, scalar


def format_scalar(c) -> str:
    c = scalar(c)
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def format_monomial(sig, mono: int) -> str:
    parts = []
    for r, e in enumerate(sig.exps(mono), start=1):
        if e == 1:
            parts.append(f"x{r}")
        elif e > 1:
            parts.append(f"x{r}^{e}")
    parts.extend(f"x{i}" for i in sig.odd_indices(mono))
    return "*".join(parts)


def _join(chunks) -> str:
    # chunks: (coefficient, body) pairs; body "" means a bare scalar
    if not chunks:
        return "0"
    out = []
    for idx, (c, body) in enumerate(chunks):
        neg = c < 0
        a = -c if neg else c
        if body:
            txt = body if a == 1 else f"{format_scalar(a)}*{body}"
        else:
            txt = format_scalar(a)
        if idx == 0:
            out.append(("-" if neg else "") + txt)
        else:
            out.append((" - " if neg else " + ") + txt)
    return "".join(out)


def format_poly(p: SuperPoly) -> str:
    sig = p.sig
    chunks = [(p.terms[k], format_monomial(sig, k)) for k in sorted(p.terms, key=sig.mono_order_key)]
    return _join(chunks)


def field_term_key(sig, key: int):
    from .vectorfield import RBITS, RMASK

    return (sig.mono_order_key(key >> RBITS), key & RMASK)


def format_field(D) -> str:
    from .vectorfield import RBITS, RMASK

    sig = D.sig
    chunks = []
    for k in sorted(D.terms, key=lambda k: field_term_key(sig, k)):
        mono = format_monomial(sig, k >> RBITS)
        p = f"p{(k & RMASK) + 1}"
        chunks.append((D.terms[k], f"{mono}*{p}" if mono else p))
    return _join(chunks)


def odd_header(sig) -> str:
    odd = ", ".join(f"x{i}" for i in range(sig.m + 1, sig.size + 1))
    return f"# Lambda({sig.m},{sig.n}): odd variables {odd}; p<k> is the derivation d_k"
