"""Exact rational helpers: parsing, vectors and small dense linear algebra."""
from __future__ import annotations

import math
import re
from fractions import Fraction as Q
from typing import Iterable, List, Optional, Sequence, Tuple

Vector = Tuple[Q, ...]
Matrix = Tuple[Vector, ...]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Q:
    """Parse ``"3"``, ``"-3/2"`` or ``"0.25"`` into an exact Fraction."""
    if isinstance(text, (int, Q)):
        return Q(text)
    m = _RATIONAL_RE.match(text)
    if m:
        num, den = m.groups()
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Q(int(num), int(den) if den else 1)
    try:
        # decimal literals are exact in Fraction's string constructor
        return Q(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def fmt(q: Q) -> str:
    """Serialize a rational as ``num/den`` (or ``num`` when integral)."""
    q = Q(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable) -> Vector:
    return tuple(Q(x) for x in xs)


def add(x: Sequence[Q], y: Sequence[Q]) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Sequence[Q], y: Sequence[Q]) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def scale(c: Q, x: Sequence[Q]) -> Vector:
    return tuple(c * a for a in x)


def dot(x: Sequence[Q], y: Sequence[Q]) -> Q:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(x, y)), Q(0))


def matvec(m: Sequence[Sequence[Q]], x: Sequence[Q]) -> Vector:
    return tuple(dot(row, x) for row in m)


def bilinear(g: Sequence[Sequence[Q]], x: Sequence[Q], y: Sequence[Q]) -> Q:
    return dot(x, matvec(g, y))


def ceil_q(q: Q) -> int:
    return -((-q.numerator) // q.denominator)


def floor_q(q: Q) -> int:
    return q.numerator // q.denominator


def solve(a: Sequence[Sequence[Q]], b: Sequence[Q]) -> Optional[Vector]:
    """Solve a square system exactly; None when singular."""
    n = len(a)
    rows = [list(map(Q, a[i])) + [Q(b[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
    return tuple(rows[i][n] for i in range(n))


def inverse(a: Sequence[Sequence[Q]]) -> Matrix:
    n = len(a)
    cols = []
    for j in range(n):
        e = [Q(int(i == j)) for i in range(n)]
        c = solve(a, e)
        if c is None:
            raise ValueError("singular matrix")
        cols.append(c)
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def row_reduce(rows: Sequence[Sequence[Q]]) -> List[List[Q]]:
    """Reduced row echelon form (nonzero rows only)."""
    m = [list(map(Q, r)) for r in rows]
    out: List[List[Q]] = []
    if not m:
        return out
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [v - f * w for v, w in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r]]


def rank(rows: Sequence[Sequence[Q]]) -> int:
    return len(row_reduce(rows)) if rows else 0


def nullspace(rows: Sequence[Sequence[Q]], ncols: int) -> List[Vector]:
    """Basis of {v : row . v = 0 for all rows}."""
    rref = row_reduce(rows) if rows else []
    pivots = []
    for row in rref:
        pivots.append(next(i for i, v in enumerate(row) if v != 0))
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Q(0)] * ncols
        v[f] = Q(1)
        for row, pc in zip(rref, pivots):
            v[pc] = -row[f]
        basis.append(tuple(v))
    return basis


def primitive(v: Sequence[Q]) -> Vector:
    """Positive rescaling of v to a primitive integer vector."""
    den = 1
    for q in v:
        den = den * q.denominator // math.gcd(den, q.denominator)
    ints = [int(q * den) for q in v]
    g = 0
    for i in ints:
        g = math.gcd(g, abs(i))
    if g == 0:
        return tuple(Q(0) for _ in v)
    return tuple(Q(i, g) for i in ints)
