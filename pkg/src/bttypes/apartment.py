"""Points, affine roots, depths and filtration profiles of one apartment."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction as Q
from functools import total_ordering
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from .exact import Vector, ceil_q, floor_q, fmt, parse_rational, rank, vec
from .roots import RootSubsystem, RootSystem

ApartmentPoint = Vector


def make_point(rs: RootSystem, coords: Iterable) -> ApartmentPoint:
    p = vec(coords)
    if len(p) != rs.dim:
        raise ValueError(f"point has {len(p)} coordinates, expected {rs.dim}")
    return p


def origin(rs: RootSystem) -> ApartmentPoint:
    return (Q(0),) * rs.dim


@total_ordering
@dataclass(frozen=True)
class Depth:
    """A depth ``r``, ``r+`` or infinity (``value is None``)."""

    value: Optional[Q]
    plus: bool = False

    def __post_init__(self):
        if self.value is not None:
            object.__setattr__(self, "value", Q(self.value))
            if self.value < 0:
                raise ValueError("depth must be >= 0")
        elif self.plus:
            object.__setattr__(self, "plus", False)

    @classmethod
    def of(cls, value, plus: bool = False) -> "Depth":
        return cls(Q(value), plus)

    @classmethod
    def parse(cls, text: str) -> "Depth":
        text = text.strip()
        if text in ("inf", "oo", "∞"):
            return INF
        plus = text.endswith("+")
        return cls(parse_rational(text[:-1] if plus else text), plus)

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def _key(self):
        return (1, Q(0), False) if self.value is None else (0, self.value, self.plus)

    def __lt__(self, other: "Depth") -> bool:
        return self._key() < other._key()

    def __add__(self, other: "Depth") -> "Depth":
        if self.is_inf or other.is_inf:
            return INF
        return Depth(self.value + other.value, self.plus or other.plus)

    def __str__(self) -> str:
        if self.value is None:
            return "inf"
        return fmt(self.value) + ("+" if self.plus else "")

    def admits(self, v: Q) -> bool:
        """True when the evaluation ``v`` reaches this depth."""
        if self.value is None:
            return False
        return v > self.value if self.plus else v >= self.value

    def plus_of(self) -> "Depth":
        return self if self.is_inf else Depth(self.value, True)


INF = Depth(None)
ZERO = Depth(Q(0))
ZERO_PLUS = Depth(Q(0), True)


def n_min(value_at_x: Q, d: Depth) -> Optional[int]:
    """Least integer n with ``value_at_x + n`` reaching depth ``d``."""
    if d.is_inf:
        return None
    n = ceil_q(d.value - value_at_x)
    if d.plus and value_at_x + n == d.value:
        n += 1
    return n


@dataclass(frozen=True)
class AffineRoot:
    root: int
    offset: int

    def evaluate(self, rs: RootSystem, p: Sequence[Q]) -> Q:
        return rs.pair(rs.roots[self.root], p) + self.offset


def evaluate(rs: RootSystem, psi: AffineRoot, p: Sequence[Q]) -> Q:
    if len(p) != rs.dim:
        raise ValueError("dimension mismatch")
    return psi.evaluate(rs, p)


@dataclass(frozen=True)
class FiltrationProfile:
    """Depth assignment on the roots, the split torus and the level-0 center.

    ``root_depths`` is indexed like ``rs.roots``.  An infinite
    ``center_depth`` means the group has no generators from that center.
    """

    rs: RootSystem = field(repr=False)
    base: ApartmentPoint
    torus_depth: Depth
    root_depths: Tuple[Depth, ...]
    center_depth: Depth = None

    def __post_init__(self):
        if len(self.root_depths) != len(self.rs.roots):
            raise ValueError("profile must assign a depth to every root")
        if self.center_depth is None:
            object.__setattr__(self, "center_depth", INF)

    def depth(self, alpha) -> Depth:
        i = alpha if isinstance(alpha, int) else self.rs.index(alpha)
        return self.root_depths[i]

    def min_affine_root(self, i: int) -> Optional[AffineRoot]:
        n = n_min(self.rs.pair(self.rs.roots[i], self.base), self.root_depths[i])
        return None if n is None else AffineRoot(i, n)

    def min_affine_roots(self) -> Tuple[AffineRoot, ...]:
        out = (self.min_affine_root(i) for i in range(len(self.rs.roots)))
        return tuple(a for a in out if a is not None)

    def meet(self, other: "FiltrationProfile") -> "FiltrationProfile":
        """Intersection of the two groups: pointwise maximum of depths."""
        self._compatible(other)
        return FiltrationProfile(
            self.rs,
            self.base,
            max(self.torus_depth, other.torus_depth),
            tuple(max(a, b) for a, b in zip(self.root_depths, other.root_depths)),
            max(self.center_depth, other.center_depth),
        )

    def join(self, other: "FiltrationProfile") -> "FiltrationProfile":
        """Group generated by both: pointwise minimum of depths."""
        self._compatible(other)
        return FiltrationProfile(
            self.rs,
            self.base,
            min(self.torus_depth, other.torus_depth),
            tuple(min(a, b) for a, b in zip(self.root_depths, other.root_depths)),
            min(self.center_depth, other.center_depth),
        )

    def __le__(self, other: "FiltrationProfile") -> bool:
        """Subgroup test: every depth of ``self`` is at least that of ``other``."""
        self._compatible(other)
        if self.torus_depth < other.torus_depth:
            return False
        if any(a < b for a, b in zip(self.root_depths, other.root_depths)):
            return False
        return self.center_depth >= other.center_depth

    def filtered(self, t: Depth) -> "FiltrationProfile":
        """Intersection with the constant-``t`` Moy-Prasad group at the base."""
        return self.meet(mp_profile(self.rs, self.base, t))

    def is_concave(self) -> bool:
        return not concavity_violations(self)

    def _compatible(self, other: "FiltrationProfile"):
        if self.rs is not other.rs and self.rs != other.rs:
            raise ValueError("profiles live over different root systems")


def concavity_violations(f: FiltrationProfile):
    rs = f.rs
    bad = []
    for i, a in enumerate(rs.roots):
        for j, b in enumerate(rs.roots):
            s = tuple(x + y for x, y in zip(a, b))
            if rs.is_root(s):
                k = rs.index(s)
                if f.root_depths[k] > f.root_depths[i] + f.root_depths[j]:
                    bad.append((i, j, k))
    return bad


def constant_profile(rs: RootSystem, x, r: Depth, center: Optional[Depth] = None) -> FiltrationProfile:
    return FiltrationProfile(
        rs, make_point(rs, x), r, (r,) * len(rs.roots), r if center is None else center
    )


def mp_profile(rs: RootSystem, x, r: Depth) -> FiltrationProfile:
    """Profile of the Moy-Prasad group of depth ``r`` at ``x``."""
    if r.is_inf:
        raise ValueError("Moy-Prasad depth must be finite")
    return constant_profile(rs, x, r)


def quotient_root_system(rs: RootSystem, x: Sequence[Q]) -> RootSubsystem:
    """Roots with an affine root vanishing at ``x``."""
    members = frozenset(
        i for i, a in enumerate(rs.roots) if rs.pair(a, x).denominator == 1
    )
    return RootSubsystem(rs, members)


@dataclass(frozen=True)
class Facet:
    """Cell of the wall arrangement containing a point.

    ``cells[i]`` is ``(k, open)``: the value of root i lies at k or in (k, k+1).
    """

    zero_set: FrozenSet[AffineRoot]
    sign_vector: Tuple[Tuple[AffineRoot, int], ...]
    cells: Tuple[Tuple[int, bool], ...]
    dimension: int


def facet_of(rs: RootSystem, x: Sequence[Q]) -> Facet:
    cells, zeros, signs = [], set(), []
    for i, a in enumerate(rs.roots):
        v = rs.pair(a, x)
        k = floor_q(v)
        is_open = v != k
        cells.append((k, is_open))
        if not is_open:
            zeros.add(AffineRoot(i, -k))
        for n in (-k - 1, -k, -k + 1):
            w = v + n
            signs.append((AffineRoot(i, n), (w > 0) - (w < 0)))
    dim = rs.dim - (rank([rs.roots[z.root] for z in zeros]) if zeros else 0)
    return Facet(frozenset(zeros), tuple(signs), tuple(cells), dim)


def in_closure(f1: Facet, f2: Facet) -> bool:
    """True when the facet f1 lies in the closure of f2."""
    for (k1, o1), (k2, o2) in zip(f1.cells, f2.cells):
        if o2:
            if o1 and k1 != k2:
                return False
            if not o1 and k1 not in (k2, k2 + 1):
                return False
        elif o1 or k1 != k2:
            return False
    return True


def adjacency(f1: Facet, f2: Facet) -> bool:
    return in_closure(f1, f2) or in_closure(f2, f1)


def is_vertex(rs: RootSystem, x: Sequence[Q]) -> bool:
    """Vertex of the reduced building: the vanishing roots span the root space."""
    return quotient_root_system(rs, x).span_rank() == rs.rank


def reduced_coords(rs: RootSystem, x: Sequence[Q]) -> Tuple[Vector, Vector]:
    """Split ``x`` into its root-span part ``[x]`` and its central part."""
    x = make_point(rs, x)
    return x[: rs.rank], x[rs.rank :]


def same_fiber(rs: RootSystem, x: Sequence[Q], y: Sequence[Q]) -> bool:
    return reduced_coords(rs, x)[0] == reduced_coords(rs, y)[0]


def alcove_walls(rs: RootSystem) -> Tuple[AffineRoot, ...]:
    """Walls of the fundamental alcove (positive side contains the alcove)."""
    bary = alcove_barycenter(rs)
    walls = []
    for i, a in enumerate(rs.roots):
        v = rs.pair(a, bary)
        n = -floor_q(v)
        # affine root a + n vanishes on the lower wall of the strip containing bary
        walls.append(AffineRoot(i, n))
    verts = alcove_vertices(rs)
    return tuple(
        w for w in dict.fromkeys(walls)
        if sum(1 for p in verts if w.evaluate(rs, p) == 0) >= rs.rank
    )


def alcove_vertices(rs: RootSystem) -> Tuple[Vector, ...]:
    """Vertices of a fundamental alcove in the realization of ``build_root_system``."""
    table = {
        "A1": [(0,), (Q(1, 2),)],
        "A1xA1": [(0, 0), (Q(1, 2), 0), (0, Q(1, 2)), (Q(1, 2), Q(1, 2))],
        "A2": [(0, 0), (Q(2, 3), Q(1, 3)), (Q(1, 3), Q(2, 3))],
        "C2": [(0, 0), (Q(1, 2), 0), (Q(1, 2), Q(1, 2))],
        "G2": [(0, 0), (Q(1, 2), Q(1, 3)), (Q(2, 3), Q(1, 3))],
    }
    pad = (0,) * rs.central
    return tuple(vec(tuple(p) + pad) for p in table[rs.label])


def alcove_barycenter(rs: RootSystem) -> Vector:
    verts = alcove_vertices(rs)
    return tuple(sum(c) / len(verts) for c in zip(*verts))


def with_base(f: FiltrationProfile, x) -> FiltrationProfile:
    return replace(f, base=make_point(f.rs, x))
