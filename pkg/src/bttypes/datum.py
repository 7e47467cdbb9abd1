"""Combinatorial skeleton of a cuspidal datum and the profiles built from it."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import List, Optional, Sequence, Tuple

from .apartment import (
    INF,
    ZERO,
    ZERO_PLUS,
    ApartmentPoint,
    Depth,
    FiltrationProfile,
    make_point,
    mp_profile,
)
from .exact import Vector, ceil_q, floor_q, rank
from .polyhedra import EQ, Constraint
from .roots import RootSubsystem, RootSystem

CENTER_MODELS = ("anisotropic", "split")


@dataclass(frozen=True)
class LeviChain:
    """Nested closed subsystems ``levels[0] < ... < levels[d] = ambient``.

    ``center_model`` picks how the center of each level acts off its own
    building: ``anisotropic`` (a bounded slab around it, default) or
    ``split`` (fixes the whole apartment).  Central filtration jumps sit at
    the multiples of ``center_step``.
    """

    ambient: RootSystem
    levels: Tuple[RootSubsystem, ...]
    center_model: str = "anisotropic"
    center_step: Q = Q(1)

    def __post_init__(self):
        if not self.levels:
            raise ValueError("a Levi chain needs at least one level")
        for lv in self.levels:
            if lv.parent != self.ambient:
                raise ValueError("level belongs to a different root system")
        for a, b in zip(self.levels, self.levels[1:]):
            if not a < b:
                raise ValueError("levels must be strictly nested")
        if len(self.levels[-1]) != len(self.ambient.roots):
            raise ValueError("the top level must be the whole root system")
        if self.center_model not in CENTER_MODELS:
            raise ValueError(f"center_model must be one of {CENTER_MODELS}")
        object.__setattr__(self, "center_step", Q(self.center_step))
        if self.center_step <= 0:
            raise ValueError("center_step must be positive")

    @property
    def d(self) -> int:
        return len(self.levels) - 1

    def level_of(self, i: int) -> int:
        """Smallest level containing root index ``i``."""
        return next(k for k, lv in enumerate(self.levels) if i in lv.members)

    def center_jump(self, t: Depth) -> Q:
        """Smallest central jump reaching depth ``t``."""
        e = self.center_step
        k = ceil_q(t.value / e)
        if t.plus and k * e == t.value:
            k += 1
        return k * e


@dataclass(frozen=True)
class DepthSequence:
    r: Tuple[Q, ...]

    def __post_init__(self):
        r = tuple(Q(v) for v in self.r)
        object.__setattr__(self, "r", r)
        if not r:
            raise ValueError("depth sequence is empty")
        if r[0] < 0:
            raise ValueError("depth order violated: need 0 <= r_0")
        d = len(r) - 1
        for i in range(d - 1):
            if not r[i] < r[i + 1]:
                raise ValueError(
                    f"depth order violated: need r_{i} < r_{i + 1} (got {r[i]} >= {r[i + 1]})"
                )
        if d >= 1 and not r[d - 1] <= r[d]:
            raise ValueError(f"depth order violated: need r_{d - 1} <= r_{d}")

    @property
    def s(self) -> Tuple[Q, ...]:
        return tuple(v / 2 for v in self.r[:-1])


@dataclass(frozen=True)
class DatumSkeleton:
    chain: LeviChain
    x: ApartmentPoint
    depths: DepthSequence
    p: int = 5
    cuspidal: bool = True

    def __post_init__(self):
        rs = self.chain.ambient
        object.__setattr__(self, "x", make_point(rs, self.x))
        if len(self.depths.r) != self.chain.d + 1:
            raise ValueError(
                f"need {self.chain.d + 1} depths for {self.chain.d + 1} levels, "
                f"got {len(self.depths.r)}"
            )
        if self.p < 2:
            raise ValueError("residue characteristic must be a prime >= 2")
        lv0 = self.chain.levels[0]
        hit = [a for a in lv0.roots if rs.pair(a, self.x).denominator == 1]
        if (rank(hit) if hit else 0) != lv0.span_rank():
            raise ValueError("x is not a vertex for the level-0 affine root structure")

    @property
    def rs(self) -> RootSystem:
        return self.chain.ambient

    @property
    def d(self) -> int:
        return self.chain.d

    @property
    def s(self) -> Tuple[Q, ...]:
        return self.depths.s

    def _levelwise(self, level0: Depth, upper, top: int, torus: Depth, center: Depth):
        # upper(i) gives the depth on levels[i] \ levels[i-1]
        depths = []
        for k in range(len(self.rs.roots)):
            lv = self.chain.level_of(k)
            if lv > top:
                depths.append(INF)
            elif lv == 0:
                depths.append(level0)
            else:
                depths.append(upper(lv))
        return FiltrationProfile(self.rs, self.x, torus, tuple(depths), center)


def j_profile(sk: DatumSkeleton, level: Optional[int] = None) -> FiltrationProfile:
    """Profile of J (or of J^level, which lives inside that level)."""
    top = sk.d if level is None else level
    return sk._levelwise(ZERO, lambda i: Depth(sk.s[i - 1]), top, ZERO, ZERO)


def j_plus_profile(sk: DatumSkeleton) -> FiltrationProfile:
    return sk._levelwise(ZERO_PLUS, lambda i: Depth(sk.s[i - 1]), sk.d, ZERO_PLUS, ZERO_PLUS)


def h_profile(sk: DatumSkeleton, level: Optional[int] = None) -> FiltrationProfile:
    top = sk.d if level is None else level
    return sk._levelwise(ZERO, lambda i: Depth(sk.s[i - 1], True), top, ZERO, ZERO)


def h_plus_profile(sk: DatumSkeleton) -> FiltrationProfile:
    return sk._levelwise(
        ZERO_PLUS, lambda i: Depth(sk.s[i - 1], True), sk.d, ZERO_PLUS, ZERO_PLUS
    )


def level0_profile(sk: DatumSkeleton) -> FiltrationProfile:
    """The parahoric of the level-0 group at x, nothing outside it."""
    return j_profile(sk, 0)


BASES = {
    "J": j_profile,
    "J+": j_plus_profile,
    "H": h_profile,
    "H+": h_plus_profile,
}


def filtered_profile(base: str, t: Depth, sk: DatumSkeleton) -> FiltrationProfile:
    """The base group intersected with the depth-``t`` filtration at x."""
    if base not in BASES:
        raise ValueError(f"base must be one of {sorted(BASES)}")
    if t.is_inf:
        raise ValueError("filtration depth must be finite")
    return BASES[base](sk).meet(mp_profile(sk.rs, sk.x, t))


def script_j_profiles(i: int, sk: DatumSkeleton) -> Tuple[FiltrationProfile, FiltrationProfile]:
    if not 0 <= i < sk.d:
        raise ValueError(f"level index {i} out of range 0..{sk.d - 1}")
    r_i, s_i = Depth(sk.depths.r[i]), sk.s[i]
    inner, outer = sk.chain.levels[i], sk.chain.levels[i + 1]
    out = []
    for plus in (False, True):
        depths = []
        for k in range(len(sk.rs.roots)):
            if k in inner.members:
                depths.append(r_i)
            elif k in outer.members:
                depths.append(Depth(s_i, plus))
            else:
                depths.append(INF)
        out.append(FiltrationProfile(sk.rs, sk.x, r_i, tuple(depths), r_i))
    return out[0], out[1]


@dataclass(frozen=True)
class Wall:
    root: int
    offset: int
    level: Q
    constraint: Constraint


def genericity_walls(
    i: int, levi: RootSubsystem, sk: DatumSkeleton, box: Sequence[Tuple[Q, Q]]
) -> List[Wall]:
    """Walls ``alpha(p) + n = s_{i-1}`` for roots of level i outside ``levi``.

    ``box`` lists per-coordinate bounds; only walls meeting it are returned.
    """
    if not 1 <= i <= sk.d:
        raise ValueError(f"level index {i} out of range 1..{sk.d}")
    lv = sk.chain.levels[i]
    if not levi <= lv:
        raise ValueError("candidate Levi must lie in the level's root system")
    rs = sk.rs
    s = sk.s[i - 1]
    walls = []
    for k in sorted(lv.members - levi.members):
        a = rs.roots[k]
        coeffs = tuple(sum(a[u] * rs.gram[u][v] for u in range(rs.dim)) for v in range(rs.dim))
        lo = sum(min(c * b[0], c * b[1]) for c, b in zip(coeffs, box))
        hi = sum(max(c * b[0], c * b[1]) for c, b in zip(coeffs, box))
        # alpha(p) = s - n must land in [lo, hi]
        for n in range(ceil_q(s - hi), floor_q(s - lo) + 1):
            walls.append(Wall(k, n, s, Constraint(coeffs, Q(n) - s, EQ)))
    return walls


def build_skeleton(
    rs: RootSystem,
    levels: Sequence[Sequence[Vector]],
    r: Sequence,
    x: Sequence,
    p: int = 5,
    center_model: str = "anisotropic",
    center_step=Q(1),
) -> DatumSkeleton:
    """Convenience constructor; ``levels`` excludes the implicit top level."""
    subs = [rs.subsystem(lv) for lv in levels]
    if not subs or len(subs[-1]) != len(rs.roots):
        subs.append(rs.full())
    chain = LeviChain(rs, tuple(subs), center_model, Q(center_step))
    return DatumSkeleton(chain, make_point(rs, x), DepthSequence(tuple(Q(v) for v in r)), p)
