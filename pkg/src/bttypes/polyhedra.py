"""Exact rational polyhedra with open and closed facets.

A constraint ``a . p + c (kind) 0`` has kind ``>=``, ``>`` or ``==``.
Emptiness and witnesses come from Fourier-Motzkin elimination with
strictness tracking; dimensions here are tiny, so the blow-up is harmless.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import Vector, dot, inverse, matvec, nullspace, rank, sub, vec

GE, GT, EQ = ">=", ">", "=="


@dataclass(frozen=True)
class Constraint:
    coeffs: Vector
    const: Q
    kind: str = GE

    def __post_init__(self):
        if self.kind not in (GE, GT, EQ):
            raise ValueError(f"bad constraint kind {self.kind!r}")

    def value(self, p: Sequence[Q]) -> Q:
        return dot(self.coeffs, p) + self.const

    def holds(self, p: Sequence[Q]) -> bool:
        v = self.value(p)
        return v == 0 if self.kind == EQ else (v > 0 if self.kind == GT else v >= 0)

    def normalized(self) -> "Constraint":
        lead = next((c for c in self.coeffs if c != 0), None)
        if lead is None:
            return self
        s = abs(lead) if self.kind != EQ else lead
        return Constraint(tuple(c / s for c in self.coeffs), self.const / s, self.kind)

    def closed(self) -> "Constraint":
        return Constraint(self.coeffs, self.const, GE) if self.kind == GT else self

    def negations(self) -> List["Constraint"]:
        """Convex pieces of the complement."""
        neg = Constraint(tuple(-c for c in self.coeffs), -self.const, GT)
        if self.kind == GE:
            return [neg]
        if self.kind == GT:
            return [Constraint(neg.coeffs, neg.const, GE)]
        return [neg, Constraint(self.coeffs, self.const, GT)]


def halfspace(coeffs, const, kind=GE) -> Constraint:
    return Constraint(vec(coeffs), Q(const), kind)


@dataclass(frozen=True)
class Polyhedron:
    dim: int
    constraints: Tuple[Constraint, ...] = ()

    def __post_init__(self):
        for c in self.constraints:
            if len(c.coeffs) != self.dim:
                raise ValueError("constraint dimension mismatch")

    @classmethod
    def whole(cls, dim: int) -> "Polyhedron":
        return cls(dim, ())

    @classmethod
    def box(cls, lo: Sequence[Q], hi: Sequence[Q]) -> "Polyhedron":
        n = len(lo)
        cs = []
        for i in range(n):
            e = tuple(Q(int(i == j)) for j in range(n))
            cs.append(Constraint(e, -Q(lo[i])))
            cs.append(Constraint(tuple(-v for v in e), Q(hi[i])))
        return cls(n, tuple(cs))

    @classmethod
    def affine(cls, point: Sequence[Q], directions: Sequence[Sequence[Q]]) -> "Polyhedron":
        """The affine subspace ``point + span(directions)``."""
        n = len(point)
        dirs = [vec(d) for d in directions]
        normals = nullspace(dirs, n) if dirs and rank(dirs) else [
            tuple(Q(int(i == j)) for j in range(n)) for i in range(n)
        ]
        cs = tuple(Constraint(nv, -dot(nv, point), EQ) for nv in normals)
        return cls(n, cs)

    def with_constraints(self, extra: Iterable[Constraint]) -> "Polyhedron":
        return Polyhedron(self.dim, _dedupe(self.constraints + tuple(extra)))

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return self.with_constraints(other.constraints)

    def contains(self, p: Sequence[Q]) -> bool:
        return all(c.holds(p) for c in self.constraints)

    def closure(self) -> "Polyhedron":
        return Polyhedron(self.dim, tuple(c.closed() for c in self.constraints))

    def witness(self) -> Optional[Vector]:
        return _fm_witness(self.dim, list(self.constraints))

    def is_empty(self) -> bool:
        return self.witness() is None

    def difference(self, other: "Polyhedron") -> List["Polyhedron"]:
        """``self \\ other`` as a list of disjoint convex pieces, empties dropped."""
        pieces = []
        prefix: List[Constraint] = []
        for c in other.constraints:
            for neg in c.negations():
                cand = self.with_constraints(prefix + [neg])
                if not cand.is_empty():
                    pieces.append(cand)
            prefix.append(c)
        return pieces

    def interval_on_segment(self, p: Sequence[Q], q: Sequence[Q]):
        """Parameters ``lam`` in [0, 1] with ``p + lam (q - p)`` inside.

        Returns ``(lo, lo_strict, hi, hi_strict)`` or None when empty.
        """
        d = sub(q, p)
        lo, hi = (Q(0), False), (Q(1), False)
        for c in self.constraints:
            a = dot(c.coeffs, d)
            if a == 0:
                if not c.holds(p):
                    return None
                continue
            b = -c.value(p) / a
            strict = c.kind == GT
            if c.kind == EQ or a > 0:
                if b > lo[0] or (b == lo[0] and strict):
                    lo = (b, strict)
            if c.kind == EQ or a < 0:
                if b < hi[0] or (b == hi[0] and strict):
                    hi = (b, strict)
        if lo[0] > hi[0] or (lo[0] == hi[0] and (lo[1] or hi[1])):
            return None
        return lo[0], lo[1], hi[0], hi[1]

    def vertices_2d(self) -> List[Vector]:
        """Counter-clockwise vertices of a bounded planar polyhedron (closure)."""
        if self.dim != 2:
            raise ValueError("vertices_2d needs a planar polyhedron")
        cs = [c.closed() for c in self.constraints]
        eqs = [c for c in cs if c.kind == EQ]
        cs = [c for c in cs if c.kind != EQ] + [
            x for e in eqs for x in (Constraint(e.coeffs, e.const), Constraint(tuple(-v for v in e.coeffs), -e.const))
        ]
        pts = set()
        for c1, c2 in itertools.combinations(cs, 2):
            m = (c1.coeffs, c2.coeffs)
            if rank(m) < 2:
                continue
            inv = inverse(m)
            v = matvec(inv, (-c1.const, -c2.const))
            if all(c.holds(v) for c in cs):
                pts.add(v)
        return _ccw(list(pts))

    def __str__(self) -> str:
        parts = []
        for c in self.constraints:
            terms = " + ".join(f"{_f(a)}*p{i}" for i, a in enumerate(c.coeffs) if a != 0) or "0"
            parts.append(f"{terms} + {_f(c.const)} {c.kind} 0")
        return " and ".join(parts) if parts else "everything"


def _f(q: Q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _dedupe(cs: Sequence[Constraint]) -> Tuple[Constraint, ...]:
    seen: Dict[Tuple[Vector, Q], Constraint] = {}
    order = []
    for c in cs:
        n = c.normalized()
        key = (n.coeffs, n.const, n.kind)
        if key not in seen:
            seen[key] = n
            order.append(key)
    return tuple(seen[k] for k in order)


def _ccw(pts: List[Vector]) -> List[Vector]:
    if len(pts) < 3:
        return sorted(pts)
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    # float angles only order the vertices; coordinates stay exact
    return sorted(pts, key=lambda p: math.atan2(float(p[1] - cy), float(p[0] - cx)))


def _fm_witness(n: int, cs: List[Constraint]) -> Optional[Vector]:
    rows = []
    for c in cs:
        if c.kind == EQ:
            rows.append((list(c.coeffs), c.const, False))
            rows.append(([-a for a in c.coeffs], -c.const, False))
        else:
            rows.append((list(c.coeffs), c.const, c.kind == GT))
    stages = []
    for k in reversed(range(n)):
        stages.append((k, rows))
        pos = [r for r in rows if r[0][k] > 0]
        neg = [r for r in rows if r[0][k] < 0]
        new = [r for r in rows if r[0][k] == 0]
        for (a, c, s), (b, d, t) in itertools.product(pos, neg):
            fa, fb = -b[k], a[k]
            coeffs = [fa * x + fb * y for x, y in zip(a, b)]
            coeffs[k] = Q(0)
            new.append((coeffs, fa * c + fb * d, s or t))
        rows = _prune(new)
    for _, c, s in rows:
        if c < 0 or (s and c == 0):
            return None
    point = [Q(0)] * n
    for k, stage in reversed(stages):
        lo, lo_s, hi, hi_s = None, False, None, False
        for a, c, s in stage:
            if a[k] == 0:
                continue
            rest = sum(a[j] * point[j] for j in range(n) if j != k) + c
            b = -rest / a[k]
            if a[k] > 0:
                if lo is None or b > lo or (b == lo and s):
                    lo, lo_s = b, s or (lo_s and b == lo)
            else:
                if hi is None or b < hi or (b == hi and s):
                    hi, hi_s = b, s or (hi_s and b == hi)
        point[k] = _choose(lo, lo_s, hi, hi_s)
    return tuple(point)


def _choose(lo, lo_s, hi, hi_s) -> Q:
    if lo is None and hi is None:
        return Q(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    if lo == hi:
        return lo
    return (lo + hi) / 2


def _prune(rows):
    out, seen = [], set()
    for a, c, s in rows:
        lead = next((abs(x) for x in a if x != 0), None)
        if lead is None:
            if c > 0 or (c == 0 and not s):
                continue  # trivially true
            out.append((a, c, s))
            continue
        a2 = tuple(x / lead for x in a)
        key = (a2, c / lead, s)
        if key in seen:
            continue
        seen.add(key)
        out.append((list(a2), c / lead, s))
    return _drop_dominated(out)


def _drop_dominated(rows):
    # same normal: keep only the tightest bound
    best = {}
    trivial = []
    for a, c, s in rows:
        if all(x == 0 for x in a):
            trivial.append((a, c, s))
            continue
        key = tuple(a)
        cur = best.get(key)
        if cur is None or c < cur[1] or (c == cur[1] and s and not cur[2]):
            best[key] = (a, c, s)
    return trivial + list(best.values())


def nearest_point(
    poly: Polyhedron, p: Sequence[Q], gram: Sequence[Sequence[Q]]
) -> Optional[Tuple[Vector, Q, bool]]:
    """Nearest point of the closure of ``poly`` to ``p`` in the gram metric.

    Enumerates faces (sets of active constraints), projects onto each affine
    hull and keeps feasible candidates.  Returns ``(point, squared distance,
    unique)`` or None for an empty polyhedron.
    """
    closed = poly.closure()
    if closed.is_empty():
        return None
    if closed.contains(p):
        return tuple(p), Q(0), True
    eqs = [c for c in closed.constraints if c.kind == EQ]
    ineqs = [c for c in closed.constraints if c.kind != EQ]
    ginv = inverse(gram)
    best: Dict[Vector, Q] = {}
    for size in range(0, poly.dim + 1):
        for active in itertools.combinations(ineqs, size):
            rows = eqs + list(active)
            cand = _affine_projection(p, rows, ginv)
            if cand is None or not closed.contains(cand):
                continue
            d = sub(cand, p)
            best[cand] = dot(d, matvec(gram, d))
    if not best:  # pragma: no cover - a nonempty closed polyhedron has a nearest point
        raise AssertionError("face enumeration found no candidate")
    dmin = min(best.values())
    winners = sorted(c for c, v in best.items() if v == dmin)
    return winners[0], dmin, len(winners) == 1


def _affine_projection(p, rows, ginv) -> Optional[Vector]:
    if not rows:
        return tuple(p)
    a = [list(r.coeffs) for r in rows]
    if rank(a) < len(a):
        keep = []
        for r in rows:
            if rank([list(x.coeffs) for x in keep] + [list(r.coeffs)]) > len(keep):
                keep.append(r)
            elif not _consistent(keep, r):
                return None
        rows = keep
        a = [list(r.coeffs) for r in rows]
    resid = [r.value(p) for r in rows]
    ag = [matvec(ginv, row) for row in a]  # columns of G^-1 A^T
    m = [[dot(a[i], ag[j]) for j in range(len(a))] for i in range(len(a))]
    try:
        mi = inverse(m)
    except ValueError:
        return None
    mu = matvec(mi, resid)
    shift = [sum(ag[j][k] * mu[j] for j in range(len(a))) for k in range(len(p))]
    return tuple(pk - sk for pk, sk in zip(p, shift))


def _consistent(keep, r) -> bool:
    # r is a combination of the kept normals; its constant must match
    rows = [list(x.coeffs) + [x.const] for x in keep] + [list(r.coeffs) + [r.const]]
    return rank(rows) == len(keep)
