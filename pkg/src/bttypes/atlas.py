"""A finite patch of the building: a base apartment plus folded charts.

Chart 0 is the base apartment.  Chart k >= 1 is the apartment ``u . A`` for a
root element ``u`` of the fold root ``beta`` with valuation ``m``; it shares
the half-apartment ``{beta + m >= 0}`` with the base and uses the developed
coordinates, so shared points carry identical coordinates in both charts.
A point of the shared half is always represented in chart 0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .apartment import INF, Depth, FiltrationProfile, make_point, n_min
from .datum import DatumSkeleton, LeviChain
from .exact import Vector, add, ceil_q, dot, floor_q, inverse, matvec, scale, sub, vec
from .polyhedra import EQ, GE, GT, Constraint, Polyhedron, nearest_point
from .roots import RootSystem, chevalley_commutator


class NoCommonChart(Exception):
    """No chart of the patch contains both points."""


class HorizonError(Exception):
    """The requested object is not visible within one fold of the patch."""


@dataclass(frozen=True)
class Fold:
    root: int
    depth: Q
    parent: int = 0


@dataclass(frozen=True, order=True)
class AtlasPoint:
    chart: int
    coords: Vector

    def __str__(self) -> str:
        from .exact import fmt

        return f"chart {self.chart} ({', '.join(fmt(c) for c in self.coords)})"


@dataclass(frozen=True)
class Segment:
    chart: int
    start: Vector
    end: Vector

    def point(self, lam: Q) -> Vector:
        return add(self.start, scale(lam, sub(self.end, self.start)))


@dataclass(frozen=True)
class Atlas:
    rs: RootSystem
    x: Vector
    folds: Tuple[Fold, ...]
    box: Tuple[Tuple[Q, Q], ...]
    p: int = 5

    def __post_init__(self):
        object.__setattr__(self, "x", make_point(self.rs, self.x))
        if len(self.box) != self.rs.dim:
            raise ValueError("bounding box must bound every coordinate")
        object.__setattr__(self, "box", tuple((Q(a), Q(b)) for a, b in self.box))
        for lo, hi in self.box:
            if lo > hi:
                raise ValueError("bounding box has lo > hi")
        for f in self.folds:
            if f.parent != 0:
                raise ValueError("folds must hang off the base chart")
            if not 0 <= f.root < len(self.rs.roots):
                raise ValueError("fold root index out of range")
            if self.rs.pair(self.rs.roots[f.root], self.x) + f.depth < 0:
                raise ValueError("x must lie in every fold's shared half-space")
        if len(set(self.folds)) != len(self.folds):
            raise ValueError("duplicate fold")

    @property
    def dim(self) -> int:
        return self.rs.dim

    @property
    def charts(self) -> Tuple[int, ...]:
        return tuple(range(len(self.folds) + 1))

    def fold(self, chart: int) -> Fold:
        if not 1 <= chart <= len(self.folds):
            raise ValueError(f"chart {chart} is not a folded chart")
        return self.folds[chart - 1]

    def root_row(self, alpha: Sequence[Q]) -> Vector:
        """Coefficients of the functional ``p -> alpha^T G p``."""
        return matvec(self.rs.gram, alpha)

    def shared(self, chart: int, kind: str = GE) -> Constraint:
        f = self.fold(chart)
        return Constraint(self.root_row(self.rs.roots[f.root]), f.depth, kind)

    def outside(self, chart: int) -> Constraint:
        f = self.fold(chart)
        row = self.root_row(self.rs.roots[f.root])
        return Constraint(tuple(-c for c in row), -f.depth, GT)

    def box_polyhedron(self) -> Polyhedron:
        return Polyhedron.box([b[0] for b in self.box], [b[1] for b in self.box])

    def reflect(self, chart: int, p: Sequence[Q]) -> Vector:
        """Reflection across the wall along which ``chart`` is glued."""
        f = self.fold(chart)
        beta = self.rs.roots[f.root]
        v = self.rs.pair(beta, p) + f.depth
        return sub(p, scale(v, self.rs.coroot(beta)))

    def point(self, chart: int, coords: Iterable) -> AtlasPoint:
        if chart not in self.charts:
            raise ValueError(f"unknown chart {chart}")
        return self.canonical(AtlasPoint(chart, make_point(self.rs, coords)))

    def canonical(self, ap: AtlasPoint) -> AtlasPoint:
        if ap.chart != 0 and self.shared(ap.chart).holds(ap.coords):
            return AtlasPoint(0, ap.coords)
        return ap

    def in_patch(self, ap: AtlasPoint) -> bool:
        return self.box_polyhedron().contains(ap.coords)

    def extended(self, n: int) -> "Atlas":
        """Add up to ``n`` folds along the nearest walls not yet folded."""
        if n < 0:
            raise ValueError("extension count must be >= 0")
        have = {(f.root, f.depth) for f in self.folds}
        extra = []
        for i, a in enumerate(self.rs.roots):
            m = Q(ceil_q(-self.rs.pair(a, self.x)))
            if (i, m) not in have:
                extra.append(Fold(i, m))
        return Atlas(self.rs, self.x, self.folds + tuple(extra[:n]), self.box, self.p)

    # regions -----------------------------------------------------------

    def region(self, per_chart: Dict[int, Iterable[Polyhedron]], tainted: bool = False) -> "Region":
        """Canonical region from per-chart polyhedra in full chart coordinates."""
        boxp = self.box_polyhedron()
        pieces: Dict[int, Tuple[Polyhedron, ...]] = {}
        for c in self.charts:
            out = []
            for poly in per_chart.get(c, ()):
                clipped = poly.intersect(boxp)
                if c != 0:
                    clipped = clipped.with_constraints([self.outside(c)])
                if not clipped.is_empty() and clipped not in out:
                    out.append(clipped)
            pieces[c] = tuple(out)
        return Region(self, pieces, tainted)

    def empty_region(self) -> "Region":
        return Region(self, {c: () for c in self.charts}, False)

    def whole_region(self) -> "Region":
        return self.region({c: [Polyhedron.whole(self.dim)] for c in self.charts})

    def point_region(self, ap: AtlasPoint) -> "Region":
        ap = self.canonical(ap)
        return self.region({ap.chart: [Polyhedron.affine(ap.coords, [])]})

    # distances and geodesics -------------------------------------------

    def distance2(self, p: AtlasPoint, q: AtlasPoint) -> Tuple[Q, bool]:
        """Squared distance and whether it is certified by the model."""
        p, q = self.canonical(p), self.canonical(q)
        if p.chart == q.chart:
            return self._norm2(sub(p.coords, q.coords)), True
        if p.chart == 0:
            p, q = q, p
        if q.chart == 0:
            k = p.chart
            if self.shared(k).holds(q.coords):
                return self._norm2(sub(p.coords, q.coords)), True
            return self._norm2(sub(self.reflect(k, p.coords), q.coords)), True
        # two distinct folded charts: glue through the base, an upper bound only
        return self._norm2(sub(self.reflect(q.chart, q.coords), self.reflect(p.chart, p.coords))), False

    def _norm2(self, v: Sequence[Q]) -> Q:
        return self.rs.inner(v, v)

    def common_chart(self, p: AtlasPoint, q: AtlasPoint) -> int:
        p, q = self.canonical(p), self.canonical(q)
        if p.chart == q.chart:
            return p.chart
        if p.chart == 0 and self.shared(q.chart).holds(p.coords):
            return q.chart
        if q.chart == 0 and self.shared(p.chart).holds(q.coords):
            return p.chart
        raise NoCommonChart(f"no chart contains both {p} and {q}")

    def geodesic(self, p: AtlasPoint, q: AtlasPoint) -> Segment:
        c = self.common_chart(p, q)
        return Segment(c, p.coords, q.coords)

    def segment_meets(self, seg: Segment, region: "Region") -> Optional[AtlasPoint]:
        """An exact point of ``seg`` inside ``region`` (interior when possible)."""
        polys = list(region.pieces.get(seg.chart, ()))
        if seg.chart != 0:
            inside = [self.shared(seg.chart)]
            polys += [pl.with_constraints(inside) for pl in region.pieces.get(0, ())]
        best = None
        for poly in polys:
            iv = poly.interval_on_segment(seg.start, seg.end)
            if iv is None:
                continue
            lo, _, hi, _ = iv
            lam = (lo + hi) / 2
            cand = self.canonical(AtlasPoint(seg.chart, seg.point(lam)))
            if best is None or (lam, cand) < best:
                best = (lam, cand)
        return None if best is None else best[1]

    # vertices ------------------------------------------------------------

    def chart_vertices(self) -> List[AtlasPoint]:
        """Vertices of the wall arrangement inside the patch, canonical and sorted."""
        rs = self.rs
        if rs.central:
            raise ValueError("vertex enumeration needs a semisimple root system")
        boxp = self.box_polyhedron()
        pos = [a for a in rs.roots if a > tuple(Q(0) for _ in a)]
        walls = []
        for a in pos:
            row = self.root_row(a)
            lo = sum(min(c * b[0], c * b[1]) for c, b in zip(row, self.box))
            hi = sum(max(c * b[0], c * b[1]) for c, b in zip(row, self.box))
            for n in range(ceil_q(-hi), floor_q(-lo) + 1):
                walls.append((row, Q(n)))
        pts = set()
        for combo in itertools.combinations(walls, rs.rank):
            m = [w[0] for w in combo]
            try:
                inv = inverse(m)
            except ValueError:
                continue
            v = matvec(inv, [-w[1] for w in combo])
            if boxp.contains(v):
                pts.add(v)
        out = set()
        for c in self.charts:
            for v in pts:
                ap = AtlasPoint(c, v)
                if c == 0 or not self.shared(c).holds(v):
                    out.add(ap)
        return sorted(out)


@dataclass(frozen=True)
class Region:
    atlas: Atlas = field(repr=False, compare=False)
    pieces: Dict[int, Tuple[Polyhedron, ...]]
    tainted: bool = False

    def __hash__(self):  # pragma: no cover - regions are not used as keys
        return id(self)

    def polyhedra(self) -> List[Tuple[int, Polyhedron]]:
        return [(c, p) for c in sorted(self.pieces) for p in self.pieces[c]]

    def contains(self, ap: AtlasPoint) -> bool:
        ap = self.atlas.canonical(ap)
        return any(p.contains(ap.coords) for p in self.pieces.get(ap.chart, ()))

    def is_empty(self) -> bool:
        return not any(self.pieces.values())

    def witness(self) -> Optional[AtlasPoint]:
        for c, poly in self.polyhedra():
            w = poly.witness()
            if w is not None:
                return AtlasPoint(c, w)
        return None

    def intersect(self, other: "Region") -> "Region":
        out = {}
        for c in self.atlas.charts:
            acc = []
            for a in self.pieces.get(c, ()):
                for b in other.pieces.get(c, ()):
                    ab = a.intersect(b)
                    if not ab.is_empty() and ab not in acc:
                        acc.append(ab)
            out[c] = tuple(acc)
        return Region(self.atlas, out, self.tainted or other.tainted)

    def union(self, other: "Region") -> "Region":
        out = {}
        for c in self.atlas.charts:
            acc = list(self.pieces.get(c, ()))
            acc += [b for b in other.pieces.get(c, ()) if b not in acc]
            out[c] = tuple(acc)
        return Region(self.atlas, out, self.tainted or other.tainted)

    def difference(self, other: "Region") -> "Region":
        out = {}
        for c in self.atlas.charts:
            acc = list(self.pieces.get(c, ()))
            for b in other.pieces.get(c, ()):
                acc = [piece for a in acc for piece in a.difference(b)]
            out[c] = tuple(acc)
        return Region(self.atlas, out, self.tainted or other.tainted)

    def restrict(self, chart: int) -> Tuple[Polyhedron, ...]:
        return self.pieces.get(chart, ())


# fixed-point regions ------------------------------------------------------


def _affine(atlas: Atlas, root: Sequence[Q], offset: Q) -> Constraint:
    return Constraint(atlas.root_row(root), Q(offset), GE)


def _root_element_constraints(
    atlas: Atlas, gamma: int, offset: int, chart: int
) -> Tuple[List[Constraint], bool]:
    rs = atlas.rs
    g = rs.roots[gamma]
    base = [_affine(atlas, g, offset)]
    if chart == 0:
        return base, False
    f = atlas.fold(chart)
    b = rs.roots[f.root]
    if gamma == f.root:
        return base, False
    if g == scale(Q(-1), b):
        # u^-1 v u for v in U_{-beta}: lower entry val N, upper entry val N + 2m
        m = f.depth
        return [_affine(atlas, g, offset), _affine(atlas, b, offset + 2 * m)], False
    out, taint = list(base), False
    for term in chevalley_commutator(rs, g, b, Q(offset), f.depth, atlas.p):
        out.append(_affine(atlas, term.root, term.valuation))
        taint = taint or not term.exact
    return out, taint


def fixed_region_root_element(gamma: int, depth: Depth, atlas: Atlas, base=None) -> Region:
    """Points fixed by a root element of ``gamma`` at ``depth`` measured at ``base``."""
    base = atlas.x if base is None else make_point(atlas.rs, base)
    n = n_min(atlas.rs.pair(atlas.rs.roots[gamma], base), depth)
    if n is None:
        return atlas.whole_region()
    per, taint = {}, False
    for c in atlas.charts:
        cs, t = _root_element_constraints(atlas, gamma, n, c)
        per[c] = [Polyhedron(atlas.dim, tuple(cs))]
        taint = taint or t
    return atlas.region(per, taint)


def _jump(d: Depth) -> int:
    """Smallest integer reaching depth ``d``."""
    k = ceil_q(d.value)
    return k + 1 if d.plus and k == d.value else k


def _split_torus_constraints(atlas: Atlas, d: Depth, chart: int) -> List[Constraint]:
    if d.is_inf or chart == 0:
        return []
    f = atlas.fold(chart)
    return [_affine(atlas, atlas.rs.roots[f.root], f.depth + _jump(d))]


def _projector(rs: RootSystem, keep: Sequence[Vector]) -> Tuple[Vector, ...]:
    """Gram-orthogonal projector onto the complement of span(keep) in the root span."""
    n = rs.dim
    # first drop central directions
    proj = [tuple(Q(int(i == j and i < rs.rank)) for j in range(n)) for i in range(n)]
    basis = []
    for v in keep:
        w = v
        for b in basis:
            w = sub(w, scale(rs.inner(b, w) / rs.inner(b, b), b))
        if any(w):
            basis.append(w)
    for b in basis:
        nb = rs.inner(b, b)
        # P <- P - b b^T G / |b|^2, applied on the left
        gb = matvec(rs.gram, b)
        proj = [tuple(proj[i][j] - b[i] * gb[j] / nb for j in range(n)) for i in range(n)]
    return tuple(proj)


def _center_constraints(
    atlas: Atlas, chain: LeviChain, level: int, t: Depth, chart: int
) -> List[Constraint]:
    """Constraints cutting out the fixed set of a level's center at depth ``t``."""
    rs = atlas.rs
    if t.is_inf:
        return []
    lv = chain.levels[level]
    if level == chain.d:
        return []
    eff = chain.center_jump(t)
    out: List[Constraint] = []
    if chain.center_model == "anisotropic":
        proj = _projector(rs, lv.roots)
        x = atlas.x
        for k, b in enumerate(rs.roots):
            if k in lv.members:
                continue
            row = atlas.root_row(b)
            # coefficients of p -> b(P (p - x))
            coeffs = tuple(sum(row[i] * proj[i][j] for i in range(rs.dim)) for j in range(rs.dim))
            if not any(coeffs):
                continue
            out.append(Constraint(coeffs, eff - dot(coeffs, x), GE))
    if chart != 0:
        f = atlas.fold(chart)
        if f.root not in lv.members:
            out.append(_affine(atlas, rs.roots[f.root], f.depth + eff))
    return out


def fixed_region_torus(level: int, t: Depth, sk: DatumSkeleton, atlas: Atlas) -> Region:
    """Fixed set of the depth-``t`` part of the center of the level-``level`` group."""
    if not 0 <= level <= sk.d:
        raise ValueError(f"level {level} out of range 0..{sk.d}")
    per = {}
    for c in atlas.charts:
        cs = _center_constraints(atlas, sk.chain, level, t, c)
        per[c] = [Polyhedron(atlas.dim, tuple(cs))]
    return atlas.region(per)


def profile_polyhedra(
    f: FiltrationProfile, atlas: Atlas, chain: Optional[LeviChain] = None
) -> Tuple[Dict[int, Polyhedron], bool]:
    """Per-chart fixed polyhedra of a profile, in full chart coordinates."""
    per, taint = {}, False
    for c in atlas.charts:
        cs: List[Constraint] = list(_split_torus_constraints(atlas, f.torus_depth, c))
        if chain is not None and not f.center_depth.is_inf:
            cs += _center_constraints(atlas, chain, 0, f.center_depth, c)
        for i in range(len(atlas.rs.roots)):
            n = f.min_affine_root(i)
            if n is None:
                continue
            more, t = _root_element_constraints(atlas, i, n.offset, c)
            cs += more
            taint = taint or t
        per[c] = Polyhedron(atlas.dim, tuple(cs)).with_constraints(())
    return per, taint


def fixed_region_profile(
    f: FiltrationProfile, atlas: Atlas, sk: Optional[DatumSkeleton] = None
) -> Region:
    """Points fixed by every generator the profile records."""
    per, taint = profile_polyhedra(f, atlas, None if sk is None else sk.chain)
    return atlas.region({c: [p] for c, p in per.items()}, taint)


def trace_of_subsystem(sub_roots, atlas: Atlas) -> Region:
    """Trace of the building of the Levi with roots ``sub_roots`` through x.

    It is ``x + span(sub_roots) + central directions`` in the base chart, the
    same developed subspace in a chart folded along one of its roots, and
    only the shared half elsewhere.
    """
    rs = atlas.rs
    dirs = list(sub_roots.roots) + [
        tuple(Q(int(j == rs.rank + i)) for j in range(rs.dim)) for i in range(rs.central)
    ]
    flat = Polyhedron.affine(atlas.x, dirs)
    per = {0: [flat]}
    for c in atlas.charts[1:]:
        if atlas.fold(c).root in sub_roots.members:
            per[c] = [flat]
    return atlas.region(per)


def trace_subbuilding(level: int, sk: DatumSkeleton, atlas: Atlas) -> Region:
    """Trace of the level-``level`` building on the patch."""
    if not 0 <= level <= sk.d:
        raise ValueError(f"level {level} out of range 0..{sk.d}")
    if level == sk.d:
        return atlas.whole_region()
    return trace_of_subsystem(sk.chain.levels[level], atlas)


@dataclass(frozen=True)
class Projection:
    point: AtlasPoint
    distance2: Q
    certified: bool
    unique: bool


def project_to_trace(p: AtlasPoint, trace: Region) -> Projection:
    """Nearest point of ``trace`` to ``p`` among charts within one fold."""
    atlas = trace.atlas
    p = atlas.canonical(p)
    gram = atlas.rs.gram
    cands: List[Tuple[Q, AtlasPoint]] = []
    certified = True
    for c, poly in trace.polyhedra():
        if c == p.chart:
            views = [(poly, p.coords)]
        elif p.chart == 0:
            f = c
            if atlas.shared(f).holds(p.coords):
                views = [(poly, p.coords)]
            else:
                views = [(poly, atlas.reflect(f, p.coords))]
        elif c == 0:
            k = p.chart
            views = [
                (poly.with_constraints([atlas.shared(k)]), p.coords),
                (poly.with_constraints([atlas.outside(k)]), atlas.reflect(k, p.coords)),
            ]
        else:
            certified = False
            continue
        for pl, q in views:
            res = nearest_point(pl, q, gram)
            if res is None:
                continue
            foot, d2, _ = res
            cands.append((d2, atlas.canonical(AtlasPoint(c, foot))))
    if not cands:
        raise HorizonError(f"trace not visible from {p} within one fold")
    dmin = min(d for d, _ in cands)
    feet = sorted({a for d, a in cands if d == dmin})
    return Projection(feet[0], dmin, certified, len(feet) == 1)
