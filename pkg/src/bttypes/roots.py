"""Finite reduced root systems of rank <= 2 with exact Weyl-invariant forms.

Roots and apartment points share one coordinate frame; the pairing of a root
with a point is ``alpha^T G p`` for the Gram matrix ``G``.  Extra *central*
coordinates can be appended; roots vanish on them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction as Q
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .exact import Vector, bilinear, nullspace, rank, scale, sub, vec

LABEL_ALIASES = {
    "A1": "A1",
    "A1xA1": "A1xA1",
    "A1×A1": "A1xA1",
    "A1*A1": "A1xA1",
    "A2": "A2",
    "B2": "C2",
    "C2": "C2",
    "B2/C2": "C2",
    "G2": "G2",
}


def _positive(label: str) -> Tuple[List[Tuple[int, ...]], List[List[int]]]:
    if label == "A1":
        return [(1,)], [[2]]
    if label == "A1xA1":
        return [(1, 0), (0, 1)], [[2, 0], [0, 2]]
    if label == "A2":
        return [(1, 0), (0, 1), (1, 1)], [[2, -1], [-1, 2]]
    if label == "C2":
        # e-coordinates: short e1 +- e2, long 2e1, 2e2
        return [(1, -1), (1, 1), (2, 0), (0, 2)], [[1, 0], [0, 1]]
    if label == "G2":
        # simple-root coordinates: a short, b long
        return [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)], [[2, -3], [-3, 6]]
    raise ValueError(f"unsupported root system label: {label!r}")


@dataclass(frozen=True)
class ChevalleyTerm:
    i: int
    j: int
    magnitude: int


@dataclass(frozen=True)
class CommutatorTerm:
    root: Vector
    valuation: Q
    exact: bool


@dataclass(frozen=True)
class RootSystem:
    label: str
    rank: int
    roots: Tuple[Vector, ...]
    gram: Tuple[Vector, ...]
    central: int = 0
    chevalley: Dict[Tuple[int, int], Tuple[ChevalleyTerm, ...]] = field(
        default_factory=dict, compare=False, hash=False, repr=False
    )

    @property
    def dim(self) -> int:
        return self.rank + self.central

    def pair(self, alpha: Sequence[Q], p: Sequence[Q]) -> Q:
        """Value of the root functional ``alpha`` at the point ``p``."""
        return bilinear(self.gram, alpha, p)

    def inner(self, u: Sequence[Q], v: Sequence[Q]) -> Q:
        return bilinear(self.gram, u, v)

    def norm2(self, u: Sequence[Q]) -> Q:
        return bilinear(self.gram, u, u)

    def index(self, alpha: Sequence[Q]) -> int:
        try:
            return self._index[tuple(Q(a) for a in alpha)]
        except KeyError:
            raise ValueError(f"{tuple(alpha)} is not a root of {self.label}") from None

    def is_root(self, v: Sequence[Q]) -> bool:
        return tuple(Q(a) for a in v) in self._index

    @property
    def _index(self) -> Dict[Vector, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {r: i for i, r in enumerate(self.roots)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def coroot(self, alpha: Sequence[Q]) -> Vector:
        return scale(2 / self.norm2(alpha), alpha)

    def reflect(self, alpha: Sequence[Q], v: Sequence[Q]) -> Vector:
        return sub(v, scale(self.inner(alpha, v) * 2 / self.norm2(alpha), alpha))

    def is_long(self, alpha: Sequence[Q]) -> bool:
        return self.norm2(alpha) == max(self.norm2(r) for r in self.roots)

    def full(self) -> "RootSubsystem":
        return RootSubsystem(self, frozenset(range(len(self.roots))))

    def empty(self) -> "RootSubsystem":
        return RootSubsystem(self, frozenset())

    def subsystem(self, roots: Iterable[Sequence[Q]]) -> "RootSubsystem":
        return RootSubsystem(self, frozenset(self.index(r) for r in roots))

    def _r(self, gamma: Vector, delta: Vector) -> int:
        k = 0
        while self.is_root(sub(delta, scale(Q(k + 1), gamma))):
            k += 1
        return k


def build_root_system(label: str, central: int = 0) -> RootSystem:
    """Standard realization of a supported root system.

    Short roots have squared length 2 (every root, for simply-laced types).
    """
    key = LABEL_ALIASES.get(label)
    if key is None:
        raise ValueError(f"unsupported root system label: {label!r}")
    if central < 0:
        raise ValueError("central dimension must be >= 0")
    pos, gram = _positive(key)
    rk = len(gram)
    pad = (0,) * central
    roots = []
    for r in pos:
        roots.append(vec(tuple(r) + pad))
        roots.append(vec(tuple(-a for a in r) + pad))
    roots.sort()
    g = [list(map(Q, row)) + [Q(0)] * central for row in gram]
    for i in range(central):
        g.append([Q(0)] * rk + [Q(int(i == j)) for j in range(central)])
    rs = RootSystem(key, rk, tuple(roots), tuple(tuple(r) for r in g), central)
    object.__setattr__(rs, "chevalley", _chevalley_table(rs))
    return rs


def _chevalley_table(rs: RootSystem) -> Dict[Tuple[int, int], Tuple[ChevalleyTerm, ...]]:
    # magnitudes of Chevalley commutator constants C_ij for an ordered pair
    table = {}
    for a, alpha in enumerate(rs.roots):
        for b, beta in enumerate(rs.roots):
            if a == b or rs.is_root(scale(Q(-1), alpha)) and scale(Q(-1), alpha) == beta:
                continue
            terms = []
            for i in range(1, 4):
                for j in range(1, 4):
                    gamma = tuple(i * x + j * y for x, y in zip(alpha, beta))
                    if not rs.is_root(gamma):
                        continue
                    if j == 1:
                        mag = comb(rs._r(alpha, beta) + i, i)
                    elif i == 1:
                        mag = comb(rs._r(beta, alpha) + j, j)
                    elif (i, j) == (3, 2):
                        s = tuple(x + y for x, y in zip(alpha, beta))
                        mag = comb(rs._r(s, alpha) + 2, 2) // 3
                    elif (i, j) == (2, 3):
                        s = tuple(x + y for x, y in zip(alpha, beta))
                        mag = 2 * comb(rs._r(beta, s) + 2, 2) // 3
                    else:  # pragma: no cover - does not occur in rank 2
                        raise AssertionError((i, j))
                    terms.append(ChevalleyTerm(i, j, mag))
            if terms:
                table[(a, b)] = tuple(terms)
    return table


def chevalley_commutator(
    rs: RootSystem,
    alpha: Sequence[Q],
    beta: Sequence[Q],
    val_a: Q,
    val_b: Q,
    p: int = 5,
) -> List[CommutatorTerm]:
    """Valuations of the terms of ``[x_alpha(a), x_beta(b)]``.

    Each term ``i*alpha + j*beta`` carries the bound ``i*val(a) + j*val(b)``;
    it is exact when the structure constant is a unit mod ``p``.
    """
    a, b = rs.index(alpha), rs.index(beta)
    alpha, beta = rs.roots[a], rs.roots[b]
    if rank([alpha, beta]) < 2:
        raise ValueError("chevalley_commutator needs non-proportional roots")
    out = []
    for t in rs.chevalley.get((a, b), ()):
        root = tuple(t.i * x + t.j * y for x, y in zip(alpha, beta))
        out.append(
            CommutatorTerm(root, t.i * Q(val_a) + t.j * Q(val_b), t.magnitude % p != 0)
        )
    return out


@dataclass(frozen=True)
class RootSubsystem:
    parent: RootSystem
    members: FrozenSet[int]

    def __post_init__(self):
        rs = self.parent
        for m in self.members:
            if rs.index(scale(Q(-1), rs.roots[m])) not in self.members:
                raise ValueError("subsystem not closed under negation")
        for m, n in itertools.combinations(sorted(self.members), 2):
            s = tuple(x + y for x, y in zip(rs.roots[m], rs.roots[n]))
            if rs.is_root(s) and rs.index(s) not in self.members:
                raise ValueError("subsystem not closed under root addition")

    @property
    def roots(self) -> Tuple[Vector, ...]:
        return tuple(self.parent.roots[i] for i in sorted(self.members))

    def __contains__(self, alpha) -> bool:
        if isinstance(alpha, int):
            return alpha in self.members
        return self.parent.is_root(alpha) and self.parent.index(alpha) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: "RootSubsystem") -> bool:
        return self.members <= other.members

    def __lt__(self, other: "RootSubsystem") -> bool:
        return self.members < other.members

    def span_rank(self) -> int:
        return rank(list(self.roots)) if self.members else 0

    def intersect(self, other: "RootSubsystem") -> "RootSubsystem":
        return RootSubsystem(self.parent, self.members & other.members)


def is_closed(rs: RootSystem, members: Iterable[int]) -> bool:
    try:
        RootSubsystem(rs, frozenset(members))
    except ValueError:
        return False
    return True


def exists_proper_parabolic_containing(
    phi_q: RootSubsystem, subset: Iterable[Sequence[Q]]
) -> Optional[Vector]:
    """Functional lambda != 0 on span(phi_q) with <lambda, a> >= 0 on ``subset``.

    Any nonzero lambda in the span is negative on some root of ``phi_q``
    (roots come in +- pairs and span the space), so the parabolic
    ``{a : <lambda, a> >= 0}`` is proper.  Returns None if no such lambda
    exists, i.e. if ``subset`` lies in no proper parabolic subset.
    """
    rs = phi_q.parent
    s = [tuple(Q(c) for c in a) for a in subset]
    for a in s:
        if a not in phi_q:
            raise ValueError(f"{a} is not a root of the given subsystem")
    basis = _span_basis(list(phi_q.roots))
    k = len(basis)
    if k == 0:
        return None
    # coordinates: lambda = sum c_i basis_i, constraint rows <basis_i, a>
    rows = {a: tuple(rs.inner(bv, a) for bv in basis) for a in s}
    cands: List[Vector] = []
    distinct = list(dict.fromkeys(rows.values()))
    for size in range(0, k):
        for combo in itertools.combinations(distinct, size):
            if rank(list(combo)) != size:
                continue
            for ns in _orth_line(list(combo), k):
                cands.append(ns)
    for c in cands:
        for sign in (1, -1):
            cc = scale(Q(sign), c)
            if all(sum(x * y for x, y in zip(cc, row)) >= 0 for row in rows.values()):
                lam = tuple(sum(ci * bv[t] for ci, bv in zip(cc, basis)) for t in range(rs.dim))
                return _nice_functional(phi_q, lam)
    return None


def _orth_line(rows: List[Vector], k: int) -> List[Vector]:
    return nullspace(rows, k)


def _span_basis(vectors: List[Vector]) -> List[Vector]:
    basis: List[Vector] = []
    for v in vectors:
        if rank(basis + [v]) > len(basis):
            basis.append(v)
    return basis


def _nice_functional(phi_q: RootSubsystem, lam: Vector) -> Vector:
    # prefer a coroot when lambda points along one
    rs = phi_q.parent
    for a in phi_q.roots:
        cv = rs.coroot(a)
        if rank([cv, lam]) == 1 and rs.inner(cv, lam) > 0:
            return cv
    return lam


def parabolic_subset(phi_q: RootSubsystem, lam: Sequence[Q]) -> FrozenSet[int]:
    rs = phi_q.parent
    return frozenset(i for i in phi_q.members if rs.inner(lam, rs.roots[i]) >= 0)


def weyl_invariance_defect(rs: RootSystem) -> List[str]:
    """Empty list iff every root reflection permutes the roots and preserves gram."""
    problems = []
    rset = set(rs.roots)
    for a in rs.roots:
        img = {rs.reflect(a, r) for r in rs.roots}
        if img != rset:
            problems.append(f"reflection in {a} does not permute roots")
        for u, v in itertools.product(rs.roots, repeat=2):
            if rs.inner(rs.reflect(a, u), rs.reflect(a, v)) != rs.inner(u, v):
                problems.append(f"reflection in {a} breaks the form")
                break
    return problems
