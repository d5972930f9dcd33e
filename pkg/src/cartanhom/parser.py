"""Surface syntax for functions and vector fields.

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INT)?
    atom   := INT ("/" INT)? | x<k> | p<k> | "(" expr ")"
            | D_H(expr) | D_K(expr) | D_HO(expr) | D_KO(expr)
            | D(i, j; expr) | div(expr) | div_lambda(rat; expr) | bracket(expr, expr)

Indices are global (1..m+n). ``p<k>`` is the derivation d_k. Products are
taken left to right with Grassmann signs, so ``x6*x5`` is ``-x5*x6``;
a function times a field is the field with its coefficients multiplied on
the left. Errors carry the byte offset of the offending token.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .families import FamilyConfig
from .printing import format_field, format_poly
from .superpoly import SuperPoly
from .vectorfield import ParityError, VectorField, bracket_any, d_ij, div, div_lambda

Value = Union[SuperPoly, VectorField]

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<head>D_HO|D_KO|D_H|D_K|div_lambda|div|bracket|D)(?![A-Za-z0-9_])
  | (?P<var>[xp])(?P<idx>\d+)
  | (?P<int>\d+)
  | (?P<op>[-+*/^(),;])
""", re.VERBOSE)

_HEAD_FAMILIES = {"D_H": ("H",), "D_K": ("K",), "D_HO": ("HO", "SHO"), "D_KO": ("KO", "SKO")}


class ParseError(ValueError):
    """Syntax or semantic error at a byte offset of the input."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        self.message = message
        super().__init__(f"{message} at byte {offset}")

    def pointer(self) -> str:
        # caret line under the input (character column)
        raw = self.text.encode("utf-8")
        col = len(raw[:self.offset].decode("utf-8", errors="ignore"))
        return f"{self.text}\n{' ' * col}^"


class _Tok:
    __slots__ = ("kind", "text", "pos", "idx")

    def __init__(self, kind, text, pos, idx=None):
        self.kind, self.text, self.pos, self.idx = kind, text, pos, idx


def tokenize(text: str) -> List[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte(text, pos), text)
        kind = m.lastgroup
        if kind == "idx":
            kind = "var"
        if kind != "ws":
            idx = int(m.group("idx")) if m.group("idx") else None
            out.append(_Tok(kind, m.group(0) if kind != "var" else m.group("var"), pos, idx))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


def _byte(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class Parser:
    def __init__(self, text: str, config: FamilyConfig):
        self.text = text
        self.config = config
        self.sig = config.sig
        self.toks = tokenize(text)
        self.i = 0

    # helpers -----------------------------------------------------------------------
    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek
        raise ParseError(msg, _byte(self.text, tok.pos), self.text)

    @property
    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.peek
        if t.kind != "op" or t.text != text:
            self.error(f"expected {text!r}" + (f", found {t.text!r}" if t.text else ", found end of input"))
        return self.take()

    def at(self, text: str) -> bool:
        t = self.peek
        return t.kind == "op" and t.text == text

    # grammar -----------------------------------------------------------------------
    def parse(self) -> Value:
        v = self.expr()
        if self.peek.kind != "end":
            self.error(f"unexpected {self.peek.text!r}")
        return v

    def expr(self) -> Value:
        v = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()
            w = self.term()
            v = self._add(v, w, op.text == "-", op)
        return v

    def term(self) -> Value:
        v = self.unary()
        while self.at("*"):
            op = self.take()
            w = self.unary()
            v = self._mul(v, w, op)
        return v

    def unary(self) -> Value:
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Value:
        v = self.atom()
        if self.at("^"):
            op = self.take()
            t = self.peek
            if t.kind != "int":
                self.error("exponent must be a nonnegative integer")
            self.take()
            if isinstance(v, VectorField):
                self.error("a vector field cannot be raised to a power", op)
            v = v ** int(t.text)
        return v

    def _number(self) -> Fraction:
        t = self.take()
        num = int(t.text)
        if self.at("/"):
            self.take()
            d = self.peek
            if d.kind != "int":
                self.error("expected an integer denominator")
            self.take()
            if int(d.text) == 0:
                self.error("zero denominator", d)
            return Fraction(num, int(d.text))
        return Fraction(num)

    def _rational(self) -> Fraction:
        neg = False
        if self.at("-"):
            self.take()
            neg = True
        if self.peek.kind != "int":
            self.error("expected a rational number")
        q = self._number()
        return -q if neg else q

    def _index(self, tok: _Tok, k: int) -> int:
        if not 1 <= k <= self.sig.m + self.sig.n:
            self.error(f"index {k} out of range 1..{self.sig.m + self.sig.n} for {self.config.label()}", tok)
        return k

    def _int_arg(self) -> Tuple[int, _Tok]:
        t = self.peek
        if t.kind != "int":
            self.error("expected an index")
        self.take()
        return self._index(t, int(t.text)), t

    def atom(self) -> Value:
        t = self.peek
        if t.kind == "int":
            return SuperPoly.const(self.sig, self._number())
        if t.kind == "var":
            self.take()
            k = self._index(t, t.idx)
            if t.text == "x":
                return SuperPoly.var(self.sig, k)
            return VectorField.d(self.sig, k)
        if self.at("("):
            self.take()
            v = self.expr()
            self.expect(")")
            return v
        if t.kind == "head":
            return self.call()
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")

    def call(self) -> Value:
        head = self.take()
        name = head.text
        self.expect("(")
        try:
            if name in _HEAD_FAMILIES:
                fams = _HEAD_FAMILIES[name]
                if self.config.family not in fams:
                    self.error(f"{name} is not defined for {self.config.label()}", head)
                f = self._function(self.expr(), head)
                out = self.config.d_x(f)
            elif name == "D":
                i, _ = self._int_arg()
                self.expect(",")
                j, _ = self._int_arg()
                self.expect(";")
                out = d_ij(i, j, self._function(self.expr(), head))
            elif name == "div":
                D = self.expr()
                if not isinstance(D, VectorField):
                    self.error("div expects a vector field", head)
                out = div(D)
            elif name == "div_lambda":
                if self.config.family not in ("KO", "SKO"):
                    self.error(f"div_lambda is not defined for {self.config.label()}", head)
                lam = self._rational()
                self.expect(";")
                out = div_lambda(self._function(self.expr(), head), lam, self.config.maps)
            elif name == "bracket":
                a = self.expr()
                self.expect(",")
                b = self.expr()
                if not (isinstance(a, VectorField) and isinstance(b, VectorField)):
                    self.error("bracket expects two vector fields", head)
                out = bracket_any(a, b)
            else:  # pragma: no cover - the tokenizer only yields the heads above
                self.error(f"unknown operator {name}", head)
        except ParityError as exc:
            raise ParseError(str(exc), _byte(self.text, head.pos), self.text) from None
        self.expect(")")
        return out

    def _function(self, v: Value, head: _Tok) -> SuperPoly:
        if not isinstance(v, SuperPoly):
            self.error(f"{head.text} expects a function argument", head)
        return v

    def _add(self, a: Value, b: Value, sub: bool, op: _Tok) -> Value:
        if isinstance(a, SuperPoly) and isinstance(b, SuperPoly):
            return a - b if sub else a + b
        if isinstance(a, VectorField) and isinstance(b, VectorField):
            return a - b if sub else a + b
        # a zero function (e.g. x5^2) added to a field is harmless
        if isinstance(a, SuperPoly) and not a.terms:
            return -b if sub else b
        if isinstance(b, SuperPoly) and not b.terms:
            return a
        self.error("cannot add a function and a vector field", op)

    def _mul(self, a: Value, b: Value, op: _Tok) -> Value:
        if isinstance(a, SuperPoly) and isinstance(b, SuperPoly):
            return a * b
        if isinstance(a, SuperPoly) and isinstance(b, VectorField):
            return b.lmul(a)
        if isinstance(a, VectorField) and isinstance(b, SuperPoly) and _is_constant(b):
            return a.scale(b.terms.get(0, 0))
        self.error("product not defined here; use bracket(a, b) for vector fields", op)


def _is_constant(f: SuperPoly) -> bool:
    return all(k == 0 for k in f.terms)


def parse(text: str, config: FamilyConfig) -> Value:
    """Evaluate an expression under a family configuration."""
    return Parser(text, config).parse()


def to_text(v: Value) -> str:
    """Canonical form; parse(to_text(v)) == v."""
    if isinstance(v, VectorField):
        return format_field(v)
    return format_poly(v)


def canonical(text: str, config: FamilyConfig) -> str:
    return to_text(parse(text, config))
