"""Exact rational linear algebra.

Two engines live here:

* :func:`bareiss_echelon` -- dense fraction-free (Bareiss) elimination used
  by the matrix-level helpers (:func:`rank`, :func:`nullspace`, :func:`solve`).
* :class:`SparseEchelon` -- incremental sparse elimination over integer rows
  with content removal. Vectors are ``dict`` column -> scalar with orderable
  column keys; the pivot of a row is its smallest column.

Both use the deterministic pivot rule "first nonzero column".
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from . import _kernels as K
from .superpoly import scalar

Vector = Dict[Hashable, object]


class DimensionError(ValueError):
    pass


class RationalMatrix:
    """Sparse rows x cols matrix of exact rationals."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Dict[Tuple[int, int], object]] = None):
        self.rows, self.cols = rows, cols
        self.entries = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionError(f"entry ({i}, {j}) outside {rows}x{cols}")
            v = scalar(v)
            if v:
                self.entries[(i, j)] = v

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "RationalMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise DimensionError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    ent[(i, j)] = v
        return cls(len(rows), cols, ent)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols)

    def dense(self) -> List[List]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self) -> List[Dict[int, object]]:
        out: List[Dict[int, object]] = [{} for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def mul_vector(self, v: Sequence) -> List:
        if len(v) != self.cols:
            raise DimensionError("vector length does not match column count")
        out = [0] * self.rows
        for (i, j), a in self.entries.items():
            out[i] += a * v[j]
        return [scalar(x) for x in out]

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _integer_row(row: Sequence) -> List[int]:
    den = 1
    for v in row:
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    return [int(v * den) for v in row]


def bareiss_echelon(rows: Sequence[Sequence]) -> Tuple[List[List[int]], List[int]]:
    """Fraction-free row echelon form of a dense rational matrix.

    Rows are first scaled to integers; returns (echelon rows, pivot columns).
    All divisions in the sweep are exact.
    """
    a = [_integer_row(r) for r in rows]
    if not a:
        return [], []
    nr, nc = len(a), len(a[0])
    pivots: List[int] = []
    prev = 1
    r = 0
    for c in range(nc):
        if r == nr:
            break
        p = next((i for i in range(r, nr) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, nr):
            aic = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, nc):
                row_i[j] = (piv * row_i[j] - aic * row_r[j]) // prev
            row_i[c] = 0
        # rows above the sweep keep their values; only the sub-block is updated
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _as_dense(A: Union[RationalMatrix, Sequence[Sequence]]) -> Tuple[List[List], int]:
    if isinstance(A, RationalMatrix):
        return A.dense(), A.cols
    rows = [list(r) for r in A]
    return rows, (len(rows[0]) if rows else 0)


def rank(A) -> int:
    rows, _ = _as_dense(A)
    return len(bareiss_echelon(rows)[1])


def _rref_from_echelon(ech: List[List[int]], pivots: List[int]) -> List[List]:
    rows = [[Fraction(v) for v in r] for r in ech]
    for k in range(len(rows) - 1, -1, -1):
        c = pivots[k]
        inv = 1 / rows[k][c]
        rows[k] = [v * inv for v in rows[k]]
        for i in range(k):
            f = rows[i][c]
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    return rows


def nullspace(A) -> List[List]:
    """Basis of {v : A v = 0}, one vector per free column (that entry equal to 1)."""
    rows, nc = _as_dense(A)
    if not rows:
        return [[int(i == j) for i in range(nc)] for j in range(nc)]
    ech, piv = bareiss_echelon(rows)
    rref = _rref_from_echelon(ech, piv)
    pivset = set(piv)
    basis = []
    for f in range(nc):
        if f in pivset:
            continue
        v = [0] * nc
        v[f] = 1
        for k, c in enumerate(piv):
            v[c] = scalar(-rref[k][f])
        basis.append(v)
    return basis


def solve(A, b: Sequence):
    """One exact solution of A x = b, or the string "inconsistent"."""
    rows, nc = _as_dense(A)
    if len(b) != len(rows):
        raise DimensionError("right-hand side length does not match row count")
    aug = [list(r) + [bv] for r, bv in zip(rows, b)]
    if not aug:
        return [0] * nc
    ech, piv = bareiss_echelon(aug)
    if piv and piv[-1] == nc:
        return "inconsistent"
    rref = _rref_from_echelon(ech, piv)
    x = [0] * nc
    for k, c in enumerate(piv):
        x[c] = scalar(rref[k][nc])
    return x


# sparse vectors ------------------------------------------------------------------------
def _to_sparse(v) -> Dict:
    if isinstance(v, dict):
        return {k: x for k, x in v.items() if x}
    return {i: x for i, x in enumerate(v) if x}


def _content_normalize(row: Dict) -> Dict:
    # integer row with gcd 1 and positive leading (pivot) entry
    den = 0
    for v in row.values():
        if isinstance(v, Fraction):
            den = lcm(den or 1, v.denominator)
    if den:
        row = {k: int(v * den) for k, v in row.items()}
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    piv = min(row)
    if row[piv] < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


class SparseEchelon:
    """Incrementally maintained echelon basis of a span of sparse vectors.

    ``add`` returns True when the vector enlarged the span. Stored rows are
    primitive integer vectors whose pivot (smallest column) is positive.
    """

    def __init__(self):
        self.rows: Dict[Hashable, Dict] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v) -> Dict:
        """Remainder of v (scaled to integers) after elimination; {} when v is in the span."""
        v = _to_sparse(v)
        if not v:
            return v
        v = _content_normalize(v)
        rows = self.rows
        while True:
            hit = None
            for k in v:
                if k in rows and (hit is None or k < hit):
                    hit = k
            if hit is None:
                return v
            p = rows[hit]
            a, b = v[hit], p[hit]
            g = gcd(a, b)
            v = K.combine(v, b // g, p, -(a // g))
            if not v:
                return v
            v = _content_normalize(v)

    def add(self, v) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        self.rows[min(r)] = r
        return True

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def rref(self) -> Dict[Hashable, Dict]:
        """Reduced rows (Fraction entries, pivot 1) keyed by pivot column."""
        out: Dict[Hashable, Dict] = {}
        for piv in sorted(self.rows, reverse=True):
            row = {k: Fraction(v, self.rows[piv][piv]) for k, v in self.rows[piv].items()}
            for q in [k for k in row if k in out and k != piv]:
                c = row[q]
                K.axpy(row, out[q], -c)
            out[piv] = row
        return out

    def nullspace(self, columns: Iterable[Hashable]) -> List[Dict]:
        """Basis of the vectors annihilated by every stored row, over ``columns``."""
        rref = self.rref()
        basis = []
        for f in columns:
            if f in rref:
                continue
            v = {f: 1}
            for piv, row in rref.items():
                c = row.get(f)
                if c:
                    v[piv] = scalar(-c)
            basis.append(v)
        return basis


def sparse_rank(vectors: Iterable) -> int:
    e = SparseEchelon()
    for v in vectors:
        e.add(v)
    return e.rank


def in_span(v, U: Iterable) -> bool:
    e = SparseEchelon()
    for u in U:
        e.add(u)
    return e.contains(v)


def span_equal(U: Iterable, V: Iterable) -> bool:
    """Exact equality of the spans of two vector families."""
    U, V = list(U), list(V)
    eu, ev = SparseEchelon(), SparseEchelon()
    for u in U:
        eu.add(u)
    for v in V:
        ev.add(v)
    if eu.rank != ev.rank:
        return False
    return all(eu.contains(v) for v in V)


def independent_subset(vectors: Sequence) -> List[int]:
    """Indices of the first-come independent subset."""
    e = SparseEchelon()
    return [i for i, v in enumerate(vectors) if e.add(v)]


def dot(u: Dict, v: Dict):
    if len(u) > len(v):
        u, v = v, u
    s = 0
    for k, a in u.items():
        b = v.get(k)
        if b is not None:
            s += a * b
    return s


class Coordinatizer:
    """Coordinates with respect to a fixed independent family of sparse vectors.

    Keeps the reduced row echelon form of the family together with the
    combinations producing each reduced row, so the coordinates of a vector
    in the span are read off its pivot entries.
    """

    def __init__(self, basis: Sequence[Dict]):
        self.size = len(basis)
        work: Dict[Hashable, Tuple[Dict, Dict]] = {}
        for idx, b in enumerate(basis):
            v = {k: Fraction(x) for k, x in b.items() if x}
            t = {idx: Fraction(1)}
            while True:
                hit = min((k for k in v if k in work), default=None)
                if hit is None:
                    break
                row, tr = work[hit]
                c = v[hit]
                K.axpy(v, row, -c)
                K.axpy(t, tr, -c)
            if not v:
                raise ValueError(f"basis vector {idx} is dependent on the previous ones")
            piv = min(v)
            inv = 1 / v[piv]
            v = {k: x * inv for k, x in v.items()}
            t = {k: x * inv for k, x in t.items()}
            # keep the stored rows fully reduced at the new pivot
            for q, (row, tr) in work.items():
                c = row.get(piv)
                if c:
                    K.axpy(row, v, -c)
                    K.axpy(tr, t, -c)
            work[piv] = (v, t)
        self.rows = {p: r for p, (r, _) in work.items()}
        self.trans = {p: {k: scalar(x) for k, x in t.items()} for p, (_, t) in work.items()}

    def coords(self, v: Dict, check: bool = True) -> Optional[Dict[int, object]]:
        """Sparse coordinate vector of v, or None when v is outside the span (with check)."""
        out: Dict[int, object] = {}
        for k, x in v.items():
            t = self.trans.get(k)
            if t is not None:
                K.axpy(out, t, x)
        if check:
            resid = dict(v)
            for k, x in v.items():
                row = self.rows.get(k)
                if row is not None:
                    K.axpy(resid, row, -x)
            if resid:
                return None
        return {k: scalar(x) for k, x in out.items()}
