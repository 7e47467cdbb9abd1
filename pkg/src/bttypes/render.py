"""SVG and ASCII pictures of a patch of the building.

The base chart is drawn flat.  Every folded chart is drawn as a sheared
copy of its outside half-space, so the sheets visibly separate once they
leave the wall they share with the base.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Dict, List, Optional, Sequence, Tuple

from .atlas import Atlas, AtlasPoint, Region
from .config import ConfigFile, lattice_points
from .criteria import (
    ATYPICAL_A,
    ATYPICAL_B,
    TYPE_BEARING,
    UNDECIDED,
    classify,
    context,
    in_delta,
)
from .exact import Vector, ceil_q, floor_q, inverse, matvec, rank
from .polyhedra import EQ, GT, Constraint, Polyhedron

DEFAULT_COLORS = {
    "walls": "#c8c8c8",
    "trace0": "#1b2a80",
    "delta": "#ffffff",
    "complementary": "#c2188f",
    "projection+": "#f2d36b",
    "projection-": "#a9cbe8",
    "theta": "#ef8a2a",
    TYPE_BEARING: "#000000",
    ATYPICAL_A: "#2e8b57",
    ATYPICAL_B: "#c0392b",
    UNDECIDED: "#8a8a8a",
}
ASCII_MARKS = {TYPE_BEARING: "X", ATYPICAL_A: "A", ATYPICAL_B: "B", UNDECIDED: "?"}
SIZE = 480
SHEAR = 0.6


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    chart: int
    vertices: Tuple[Vector, ...]
    inner: Vector


# geometry ----------------------------------------------------------------


def _embedding(atlas: Atlas) -> Tuple[Tuple[float, float], ...]:
    """Rows of a 2 x dim matrix E with E^T E equal to the Gram matrix."""
    g = [[float(v) for v in row] for row in atlas.rs.gram]
    if atlas.dim == 1:
        return ((math.sqrt(g[0][0]),), (0.0,))
    a = math.sqrt(g[0][0])
    b = g[0][1] / a
    c = math.sqrt(g[1][1] - b * b)
    return ((a, b), (0.0, c))


class _View:
    def __init__(self, atlas: Atlas):
        self.atlas = atlas
        self.emb = _embedding(atlas)
        corners = list(itertools.product(*atlas.box))
        pts = [self._flat(c) for c in corners]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
        reach = 1 + SHEAR if len(atlas.charts) > 1 else 1
        self.scale = SIZE / (span * (reach + 0.4))
        self.cx, self.cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
        self.shears = {c: self._shear(c) for c in atlas.charts[1:]}

    def _flat(self, v: Sequence[Q]) -> Tuple[float, float]:
        return tuple(sum(e * float(x) for e, x in zip(row, v)) for row in self.emb)

    def _shear(self, chart: int) -> Tuple[float, float]:
        f = self.atlas.fold(chart)
        beta = self.atlas.rs.roots[f.root]
        sign = 1 if chart % 2 else -1
        if self.atlas.dim == 1:
            return (0.0, sign * SHEAR)
        nx, ny = self._flat(self.atlas.rs.coroot(beta))
        n = math.hypot(nx, ny) or 1.0
        return (-ny / n * SHEAR * sign, nx / n * SHEAR * sign)

    def xy(self, chart: int, v: Sequence[Q]) -> Tuple[float, float]:
        x, y = self._flat(v)
        if chart:
            out = max(0.0, -float(self.atlas.shared(chart).value(v)))
            sx, sy = self.shears[chart]
            x, y = x + out * sx, y + out * sy
        px = SIZE / 2 + (x - self.cx) * self.scale
        py = SIZE / 2 - (y - self.cy) * self.scale
        return px, py


def _vertices(poly: Polyhedron) -> List[Vector]:
    """Vertices of the closure of a bounded polyhedron of dimension <= 2."""
    n = poly.dim
    cs = [c.closed() for c in poly.constraints]
    pts = set()
    for combo in itertools.combinations(cs, n):
        m = [c.coeffs for c in combo]
        if rank(m) < n:
            continue
        v = matvec(inverse(m), [-c.const for c in combo])
        if all(c.holds(v) for c in cs):
            pts.add(v)
    out = sorted(pts)
    if n == 2 and len(out) > 2:
        out = _ccw(out)
    return out


def _ccw(pts: List[Vector]) -> List[Vector]:
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: (math.atan2(float(p[1] - cy), float(p[0] - cx)), p))


def chart_domain(atlas: Atlas, chart: int) -> Polyhedron:
    box = atlas.box_polyhedron()
    return box if chart == 0 else box.with_constraints([atlas.outside(chart)])


def wall_rows(atlas: Atlas) -> List[Tuple[Vector, Q]]:
    """(functional row, integer k) for every wall ``alpha(p) = k`` meeting the box."""
    rs = atlas.rs
    out = []
    for a in rs.roots:
        if not a > tuple(Q(0) for _ in a):
            continue
        row = atlas.root_row(a)
        lo = sum(min(c * b[0], c * b[1]) for c, b in zip(row, atlas.box))
        hi = sum(max(c * b[0], c * b[1]) for c, b in zip(row, atlas.box))
        out.append((row, lo, hi))
    return out


def chambers(atlas: Atlas, chart: int) -> List[Cell]:
    """Open chambers of the wall arrangement inside one chart's drawn domain."""
    rows = wall_rows(atlas)
    found: List[Cell] = []

    def grow(poly: Polyhedron, k: int):
        if k == len(rows):
            vs = _vertices(poly)
            if len(vs) > atlas.dim:
                inner = tuple(sum(v[i] for v in vs) / len(vs) for i in range(atlas.dim))
                found.append(Cell(chart, tuple(vs), inner))
            return
        row, lo, hi = rows[k]
        for j in range(floor_q(lo), ceil_q(hi)):
            band = poly.with_constraints([
                Constraint(row, Q(-j), GT),
                Constraint(tuple(-c for c in row), Q(j + 1), GT),
            ])
            if not band.is_empty():
                grow(band, k + 1)

    grow(chart_domain(atlas, chart), 0)
    return sorted(found, key=lambda c: c.inner)


def _walls_in(atlas: Atlas, chart: int) -> List[Tuple[Vector, Vector]]:
    dom = chart_domain(atlas, chart)
    segs = []
    for row, lo, hi in wall_rows(atlas):
        for k in range(ceil_q(lo), floor_q(hi) + 1):
            piece = dom.with_constraints([Constraint(row, Q(-k), EQ)])
            if piece.is_empty():
                continue
            vs = _vertices(piece.closure())
            if len(vs) >= 1:
                segs.append((vs[0], vs[-1]))
    return segs


# svg -----------------------------------------------------------------------


def _pts(view: _View, chart: int, vs: Sequence[Vector]) -> str:
    return " ".join("%.2f,%.2f" % view.xy(chart, v) for v in vs)


def _shape(view: _View, chart: int, vs: Sequence[Vector], style: str) -> str:
    if len(vs) == 1:
        x, y = view.xy(chart, vs[0])
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" {style}/>'
    if len(vs) == 2:
        style = re.sub(r'\s*fill(-opacity)?="[^"]*"', "", style)
        return f'<polyline points="{_pts(view, chart, vs)}" fill="none" {style}/>'
    return f'<polygon points="{_pts(view, chart, vs)}" {style}/>'


def _region_shapes(view: _View, region: Region, style: str) -> List[str]:
    out = []
    for c, poly in region.polyhedra():
        vs = _vertices(poly.closure())
        if vs:
            out.append(_shape(view, c, vs, style))
    return out


def _layer(name: str, body: List[str]) -> List[str]:
    return [f'<g id="layer-{name}" class="layer">'] + ["  " + b for b in body] + ["</g>"]


def render_svg(cfg: ConfigFile, layers: Sequence[str] = (), extend: int = 0) -> str:
    atlas = cfg.atlas(extend)
    if atlas.dim > 2:
        raise RenderError(f"cannot draw a {atlas.dim}-dimensional apartment (at most 2)")
    colors = dict(DEFAULT_COLORS)
    colors.update(dict(cfg.colors))
    sk, chains = cfg.skeleton(), cfg.complementary()
    ctx = context(sk, atlas, chains)
    view = _View(atlas)
    cells = {c: chambers(atlas, c) for c in atlas.charts}

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#fbfbf8"/>',
    ]
    wall_body = []
    for c in atlas.charts:
        for cell in cells[c]:
            wall_body.append(_shape(view, c, cell.vertices, 'fill="#f4f4f0" stroke="none"'))
        for a, b in _walls_in(atlas, c):
            wall_body.append(_shape(view, c, (a, b), f'stroke="{colors["walls"]}" stroke-width="1"'))
    lines += _layer("walls", wall_body)

    requested = list(layers)
    for name in requested:
        body: List[str] = []
        if name == "walls":
            continue
        if name == "projection":
            for c in atlas.charts:
                for cell in cells[c]:
                    sign = _foot_side(ctx, AtlasPoint(c, cell.inner))
                    if sign is None:
                        continue
                    col = colors["projection+"] if sign > 0 else colors["projection-"]
                    body.append(_shape(view, c, cell.vertices, f'fill="{col}" stroke="none"'))
        elif name == "delta":
            for c in atlas.charts:
                for cell in cells[c]:
                    if in_delta(atlas.canonical(AtlasPoint(c, cell.inner)), ctx):
                        body.append(_shape(
                            view, c, cell.vertices,
                            f'fill="{colors["delta"]}" stroke="#333333" stroke-width="0.8"',
                        ))
        elif name == "trace0":
            body = _region_shapes(
                view, ctx.trace0,
                f'fill="{colors["trace0"]}" fill-opacity="0.25" stroke="{colors["trace0"]}" stroke-width="3"',
            )
        elif name == "complementary":
            style = f'stroke="{colors["complementary"]}" stroke-width="2" stroke-dasharray="6,4"'
            for chain_name, c, a, b in chain_rays(ctx):
                body.append(_shape(view, c, (a, b), style + f' data-chain="{chain_name}"'))
        elif name.startswith("theta:"):
            t = Q(name.split(":", 1)[1])
            body = _region_shapes(
                view, ctx.theta(t),
                f'fill="{colors["theta"]}" fill-opacity="0.45" stroke="{colors["theta"]}"',
            )
        elif name == "verdicts":
            atlas_pts = cfg.query_points(atlas)
            for ap in atlas_pts:
                v = classify(ap, sk, atlas, chains)
                x, y = view.xy(ap.chart, ap.coords)
                body.append(
                    f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{colors[v.kind]}" '
                    f'data-kind="{v.kind}"/>'
                )
        else:
            raise RenderError(f"unknown layer {name!r}")
        lines += _layer(name.replace(":", "-"), body)
    x, y = view.xy(0, sk.x)
    lines.append(f'<circle id="base-point" cx="{x:.2f}" cy="{y:.2f}" r="4" fill="#000000"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _breakpoints(atlas: Atlas, a: Vector, b: Vector) -> List[Q]:
    """Parameters in [0, 1] where the segment crosses a wall or half-wall."""
    lams = {Q(0), Q(1)}
    for row, _, _ in wall_rows(atlas):
        va, vb = sum(c * x for c, x in zip(row, a)), sum(c * x for c, x in zip(row, b))
        if va == vb:
            continue
        lo, hi = sorted((va, vb))
        for k in range(floor_q(2 * lo), ceil_q(2 * hi) + 1):
            lam = (Q(k, 2) - va) / (vb - va)
            if 0 < lam < 1:
                lams.add(lam)
    return sorted(lams)


def chain_rays(ctx) -> List[Tuple[str, int, Vector, Vector]]:
    """Pieces of the complementary traces that lie in Delta, as segments."""
    atlas = ctx.atlas
    out = []
    for name, tr in ctx.chain_traces:
        for c, poly in tr.polyhedra():
            vs = _vertices(poly.closure())
            if len(vs) != 2:
                continue
            a, b = vs
            runs: List[List[Q]] = []
            lams = _breakpoints(atlas, a, b)
            for l0, l1 in zip(lams, lams[1:]):
                mid = tuple(x + (l0 + l1) / 2 * (y - x) for x, y in zip(a, b))
                if not in_delta(atlas.canonical(AtlasPoint(c, mid)), ctx):
                    continue
                if runs and runs[-1][1] == l0:
                    runs[-1][1] = l1
                else:
                    runs.append([l0, l1])
            out += [(name, c) + _ends(a, b, run) for run in runs]
    return out


def _ends(a: Vector, b: Vector, run: Tuple[Q, Q]) -> Tuple[Vector, Vector]:
    return tuple(
        tuple(x + lam * (y - x) for x, y in zip(a, b)) for lam in run
    )


def _foot_side(ctx, z: AtlasPoint) -> Optional[int]:
    """Sign of the level-0 roots at the projection foot, relative to x."""
    from .criteria import _projection

    pr = _projection(ctx, ctx.atlas.canonical(z))
    if pr is None:
        return None
    rs = ctx.sk.rs
    lv0 = ctx.sk.chain.levels[0]
    pos = [rs.roots[i] for i in sorted(lv0.members) if rs.roots[i] > tuple(Q(0) for _ in rs.roots[i])]
    if not pos:
        return None
    foot = pr.point.coords
    if pr.point.chart:
        foot = ctx.atlas.reflect(pr.point.chart, foot)
    v = rs.pair(pos[0], foot) - rs.pair(pos[0], ctx.sk.x)
    return (v > 0) - (v < 0)


# ascii -------------------------------------------------------------------


def render_ascii(cfg: ConfigFile, extend: int = 0, spacing: Q = Q(1, 4)) -> str:
    """Verdict letters on a lattice of each chart (X, A, B, ?; '.' is another chart)."""
    atlas = cfg.atlas(extend)
    if atlas.dim > 2:
        raise RenderError(f"cannot draw a {atlas.dim}-dimensional apartment (at most 2)")
    sk, chains = cfg.skeleton(), cfg.complementary()
    spacing = cfg.lattices[0][1] if cfg.lattices else spacing
    pts = lattice_points(atlas.box, spacing)
    out = []
    for c in atlas.charts:
        marks: Dict[Vector, str] = {}
        for v in pts:
            ap = AtlasPoint(c, v)
            if atlas.canonical(ap).chart != c:
                marks[v] = "."
            else:
                marks[v] = ASCII_MARKS[classify(ap, sk, atlas, chains).kind]
        out.append(f"chart {c}")
        if atlas.dim == 1:
            out.append(" ".join(marks[v] for v in sorted(marks)))
        else:
            xs = sorted({v[0] for v in marks})
            ys = sorted({v[1] for v in marks}, reverse=True)
            for y in ys:
                out.append(" ".join(marks[(x, y)] for x in xs))
        out.append("")
    return "\n".join(out)
