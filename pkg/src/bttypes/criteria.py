"""Decision procedures classifying points of the patch."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .apartment import Depth, n_min, quotient_root_system, same_fiber
from .atlas import (
    Atlas,
    AtlasPoint,
    HorizonError,
    NoCommonChart,
    Projection,
    Region,
    fixed_region_profile,
    fixed_region_torus,
    project_to_trace,
    trace_subbuilding,
    trace_of_subsystem,
)
from .datum import DatumSkeleton, filtered_profile, j_profile
from .exact import Vector, ceil_q, floor_q, scale, sub
from .polyhedra import GE, Constraint, Polyhedron
from .roots import RootSubsystem, exists_proper_parabolic_containing

TYPE_BEARING = "TypeBearing"
ATYPICAL_A = "AtypicalThmA"
ATYPICAL_B = "AtypicalThmB"
UNDECIDED = "Undecided"
KINDS = (TYPE_BEARING, ATYPICAL_A, ATYPICAL_B, UNDECIDED)


@dataclass(frozen=True)
class Shadow:
    quotient: RootSubsystem
    present: FrozenSet[int]
    torus_present: bool = True

    @property
    def surjective(self) -> bool:
        return self.present == self.quotient.members


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: Optional[dict] = None
    annotations: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        expects = {ATYPICAL_A: "functional", ATYPICAL_B: "t"}
        key = expects.get(self.kind)
        if key is not None and (self.witness is None or key not in self.witness):
            raise ValueError(f"{self.kind} needs a {key} witness")
        if key is None and self.witness is not None:
            raise ValueError(f"{self.kind} carries no witness")


@dataclass(frozen=True)
class ComplementaryChain:
    name: str
    roots: RootSubsystem


class Context:
    """Cached regions for one skeleton, atlas and set of complementary chains."""

    def __init__(self, sk: DatumSkeleton, atlas: Atlas, chains: Sequence[ComplementaryChain] = ()):
        if sk.rs != atlas.rs or sk.x != atlas.x:
            raise ValueError("skeleton and atlas disagree on the root system or on x")
        self.sk, self.atlas, self.chains = sk, atlas, tuple(chains)
        self.quotient = quotient_root_system(sk.rs, sk.x).intersect(sk.chain.levels[0])
        self.x_point = atlas.point(0, sk.x)
        self._theta: Dict[Q, Region] = {}
        self._fix_j: Optional[Region] = None
        self._trace0: Optional[Region] = None
        self._chain_traces: Optional[List[Tuple[str, Region]]] = None

    @property
    def fix_j(self) -> Region:
        if self._fix_j is None:
            self._fix_j = fixed_region_profile(j_profile(self.sk), self.atlas, self.sk)
        return self._fix_j

    @property
    def trace0(self) -> Region:
        if self._trace0 is None:
            self._trace0 = trace_subbuilding(0, self.sk, self.atlas)
        return self._trace0

    @property
    def chain_traces(self) -> List[Tuple[str, Region]]:
        if self._chain_traces is None:
            self._chain_traces = [
                (c.name, trace_of_subsystem(c.roots, self.atlas)) for c in self.chains
            ]
        return self._chain_traces

    def theta(self, t: Q) -> Region:
        if t not in self._theta:
            self._theta[t] = theta_region(t, self.sk, self.atlas)
        return self._theta[t]


@lru_cache(maxsize=32)
def _context(sk: DatumSkeleton, atlas: Atlas, chains: Tuple[ComplementaryChain, ...]) -> Context:
    return Context(sk, atlas, chains)


def context(sk: DatumSkeleton, atlas: Atlas, chains: Sequence[ComplementaryChain] = ()) -> Context:
    return _context(sk, atlas, tuple(chains))


def shadow_at(z: AtlasPoint, sk: DatumSkeleton, atlas: Atlas) -> Shadow:
    """Quotient roots whose affine root through x stays >= 0 at ``z``."""
    z = atlas.canonical(z)
    rs = sk.rs
    quot = context(sk, atlas).quotient
    present = frozenset(
        i for i in quot.members if rs.pair(rs.roots[i], sub(z.coords, sk.x)) >= 0
    )
    return Shadow(quot, present)


def _projection(ctx: Context, z: AtlasPoint) -> Optional[Projection]:
    try:
        return project_to_trace(z, ctx.trace0)
    except HorizonError:
        return None


def in_delta(z: AtlasPoint, ctx: Context) -> Optional[bool]:
    """Whether the projection of ``z`` lands in the fiber of x (None if unknown)."""
    pr = _projection(ctx, z)
    if pr is None or not pr.certified:
        return None
    return pr.point.chart == 0 and same_fiber(ctx.sk.rs, pr.point.coords, ctx.sk.x)


def complementary_memberships(z: AtlasPoint, ctx: Context) -> Tuple[List[str], List[str]]:
    """Chains whose trace holds ``z`` and lies in Delta there, and those off Delta."""
    z = ctx.atlas.canonical(z)
    hits = [name for name, tr in ctx.chain_traces if tr.contains(z)]
    if not hits:
        return [], []
    return (hits, []) if in_delta(z, ctx) else ([], hits)


def thmA_applies(
    z: AtlasPoint,
    sk: DatumSkeleton,
    atlas: Atlas,
    chains: Sequence[ComplementaryChain] = (),
) -> Optional[Vector]:
    """Functional cutting a proper parabolic that contains the shadow at ``z``."""
    ctx = context(sk, atlas, chains)
    if complementary_memberships(z, ctx)[0]:
        return None
    sh = shadow_at(z, sk, atlas)
    return exists_proper_parabolic_containing(sh.quotient, [sk.rs.roots[i] for i in sh.present])


def _enclosure(ctx: Context, z: AtlasPoint) -> Polyhedron:
    # half-spaces psi >= 0 with psi(x) >= 0 and psi(z) >= 0, in z's chart
    rs, atlas = ctx.sk.rs, ctx.atlas
    cs = []
    for i, a in enumerate(rs.roots):
        n = max(n_min(rs.pair(a, ctx.sk.x), Depth(Q(0))), n_min(rs.pair(a, z.coords), Depth(Q(0))))
        cs.append(Constraint(atlas.root_row(a), Q(n), GE))
    return Polyhedron(rs.dim, tuple(cs)).intersect(atlas.box_polyhedron())


def projection_criterion(z: AtlasPoint, sk: DatumSkeleton, atlas: Atlas) -> Optional[bool]:
    """True when the projection to the level-0 trace leaves the fiber of x.

    None means the patch cannot decide (trace beyond the horizon).
    """
    ctx = context(sk, atlas)
    z = atlas.canonical(z)
    pr = _projection(ctx, z)
    if pr is None or not pr.certified:
        return None
    return not (pr.point.chart == 0 and same_fiber(sk.rs, pr.point.coords, sk.x))


def gamma_refinement(z: AtlasPoint, sk: DatumSkeleton, atlas: Atlas) -> Optional[AtlasPoint]:
    """A point of the enclosure of x and ``z`` projecting off the fiber of x.

    The enclosure is the intersection of the half-apartments through both
    points, a subset of the true common fixed set, so a hit is sound.
    """
    return _gamma_refinement(context(sk, atlas), atlas.canonical(z))


def _gamma_refinement(ctx: Context, z: AtlasPoint) -> Optional[AtlasPoint]:
    if ctx.sk.rs.dim != 2:
        return None
    enc = _enclosure(ctx, z)
    for v in enc.vertices_2d():
        pr = _projection(ctx, AtlasPoint(z.chart, v))
        if pr is None or not pr.certified:
            continue
        if not (pr.point.chart == 0 and same_fiber(ctx.sk.rs, pr.point.coords, ctx.sk.x)):
            return pr.point
    return None


def _level_for(t: Q, sk: DatumSkeleton) -> int:
    return sum(1 for s in sk.s if s < t)


def _as_value(t) -> Q:
    if isinstance(t, Depth):
        if t.is_inf or t.plus:
            raise ValueError("theta depth must be a plain rational")
        return t.value
    return Q(t)


def theta_region(t, sk: DatumSkeleton, atlas: Atlas) -> Region:
    """Points fixed by H_{t+} but not by the depth-t center of level i."""
    t = _as_value(t)
    if sk.d == 0 or t <= 0 or t > sk.s[-1]:
        raise ValueError(f"t = {t} outside (0, s_(d-1)]")
    i = _level_for(t, sk)
    fix_h = fixed_region_profile(filtered_profile("H+", Depth(t, True), sk), atlas, sk)
    fix_z = fixed_region_torus(i, Depth(t), sk, atlas)
    return fix_h.difference(fix_z)


def critical_depths(sk: DatumSkeleton) -> List[Q]:
    """Depths where a theta region can change, plus one sample per open gap."""
    if sk.d == 0:
        return []
    top = sk.s[-1]
    crit = {top}
    crit.update(s for s in sk.s if 0 < s <= top)
    den = 1
    for a in sk.rs.roots:
        den = max(den, sk.rs.pair(a, sk.x).denominator)
    step = Q(1, den)
    k = 1
    while k * step <= top:
        crit.add(k * step)
        k += 1
    e = sk.chain.center_step
    k = 1
    while k * e <= top:
        crit.add(k * e)
        k += 1
    pts = sorted(crit)
    out, prev = [], Q(0)
    for c in pts:
        out.append((prev + c) / 2)
        out.append(c)
        prev = c
    return out


def theta_union(sk: DatumSkeleton, atlas: Atlas) -> Region:
    acc = atlas.empty_region()
    ctx = context(sk, atlas)
    for t in critical_depths(sk):
        acc = acc.union(ctx.theta(t))
    return acc


def thmB_applies(z: AtlasPoint, sk: DatumSkeleton, atlas: Atlas) -> Optional[Tuple[Q, AtlasPoint]]:
    """First critical ``t`` whose theta region meets the geodesic from x to ``z``."""
    ctx = context(sk, atlas)
    seg = atlas.geodesic(ctx.x_point, z)
    for t in critical_depths(sk):
        w = atlas.segment_meets(seg, ctx.theta(t))
        if w is not None:
            return t, w
    return None


def _projection_functional(ctx: Context, foot: AtlasPoint) -> Vector:
    rs = ctx.sk.rs
    v = sub(foot.coords, ctx.sk.x)
    basis = []
    for a in ctx.quotient.roots:
        w = a
        for b in basis:
            w = sub(w, scale(rs.inner(b, w) / rs.inner(b, b), b))
        if any(w):
            basis.append(w)
    comp = (Q(0),) * rs.dim
    for b in basis:
        c = rs.inner(b, v) / rs.inner(b, b)
        comp = tuple(x + c * y for x, y in zip(comp, b))
    return comp if any(comp) else v


def classify(
    z: AtlasPoint,
    sk: DatumSkeleton,
    atlas: Atlas,
    chains: Sequence[ComplementaryChain] = (),
) -> Verdict:
    ctx = context(sk, atlas, chains)
    z = atlas.canonical(z)
    notes: List[str] = []
    if ctx.fix_j.tainted:
        notes.append("tainted: valid under tameness assumption")
    if ctx.fix_j.contains(z):
        notes.append("up to component group")
        return Verdict(TYPE_BEARING, None, tuple(notes))

    sh = shadow_at(z, sk, atlas)
    notes.append("shadow surjective" if sh.surjective else "shadow not surjective")
    comp_in, comp_off = complementary_memberships(z, ctx)
    for name in comp_in:
        notes.append(f"on complementary trace {name}: shadow criterion excluded")
    for name in comp_off:
        notes.append(f"on complementary trace {name} outside Delta: inconsistent input")
    delta = in_delta(z, ctx)
    notes.append({True: "in Delta", False: "outside Delta", None: "Delta unknown (horizon)"}[delta])
    pr = _projection(ctx, z)
    if pr is None or not pr.certified:
        notes.append("horizon: projection not certified")

    lam = None if comp_in else exists_proper_parabolic_containing(
        sh.quotient, [sk.rs.roots[i] for i in sh.present]
    )
    if lam is not None:
        return Verdict(ATYPICAL_A, {"functional": lam, "via": "shadow"}, tuple(notes))
    if not comp_in:
        crit = projection_criterion(z, sk, atlas)
        foot, via = (pr.point, "projection") if crit else (None, None)
        if crit is False:
            foot, via = _gamma_refinement(ctx, z), "gamma-refinement"
        if foot is not None:
            return Verdict(
                ATYPICAL_A,
                {"functional": _projection_functional(ctx, foot), "via": via, "foot": foot},
                tuple(notes),
            )
    try:
        hit = thmB_applies(z, sk, atlas)
    except NoCommonChart:
        hit = None
        notes.append("horizon: no common chart with x")
    if hit is not None:
        if any(ctx.theta(t).tainted for t in [hit[0]]):
            notes.append("tainted: valid under tameness assumption")
        return Verdict(ATYPICAL_B, {"t": hit[0], "point": hit[1]}, tuple(notes))
    notes.append("undecided: representation-theoretic input required")
    return Verdict(UNDECIDED, None, tuple(notes))
