"""Brute-force rank-1 oracle: the Bruhat-Tits tree of SL2 as lattice classes.

Lattices live in Q_p^2 but every basis and group element used here has
rational entries, so all lattice arithmetic is exact.  A vertex is stored in
Hermite form ``Z_p (p^n, 0) + Z_p (b, 1)`` with ``b`` reduced mod ``p^n``.

Root conventions match the A1 apartment: the upper unipotent group belongs to
the root alpha, and the standard vertex ``(n, 0)`` sits where alpha = -n.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

Mat = Tuple[Tuple[Q, Q], Tuple[Q, Q]]
VertexKey = Tuple[int, Q]


class TruncationError(ValueError):
    def __init__(self, required: int, have: int):
        super().__init__(f"truncation N={have} too small; need N >= {required}")
        self.required = required


def val(x: Q, p: int) -> Optional[int]:
    """p-adic valuation; None for zero."""
    x = Q(x)
    if x == 0:
        return None
    v, num, den = 0, x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _integral(x: Q, p: int) -> bool:
    return x.denominator % p != 0


def _mul(a: Mat, b: Mat) -> Mat:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def _inv(a: Mat) -> Mat:
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return ((a[1][1] / det, -a[0][1] / det), (-a[1][0] / det, a[0][0] / det))


def mat(rows) -> Mat:
    return tuple(tuple(Q(v) for v in r) for r in rows)


IDENTITY = mat([[1, 0], [0, 1]])


def _reduce_mod(x: Q, n: int, p: int) -> Q:
    """Canonical representative of ``x`` in Q_p / p^n Z_p."""
    v = val(x, p)
    if v is None or v >= n:
        return Q(0)
    unit = x / Q(p) ** v
    mod = p ** (n - v)
    k = unit.numerator * pow(unit.denominator, -1, mod) % mod
    return Q(k) * Q(p) ** v


def canonical_key(basis: Mat, p: int) -> VertexKey:
    """Hermite key of the homothety class spanned by the columns of ``basis``."""
    c1 = [basis[0][0], basis[1][0]]
    c2 = [basis[0][1], basis[1][1]]
    v1, v2 = val(c1[1], p), val(c2[1], p)
    if v2 is None or (v1 is not None and v1 < v2):
        c1, c2, v1, v2 = c2, c1, v2, v1
    if c1[1] != 0:
        f = c1[1] / c2[1]
        c1 = [c1[0] - f * c2[0], Q(0)]
    # rescale by units and a power of p so that c2 = (b, 1), c1 = (p^n, 0)
    y = c2[1]
    b = c2[0] / y
    n = val(c1[0], p) - v2
    return n, _reduce_mod(b, n, p)


def key_basis(key: VertexKey, p: int) -> Mat:
    n, b = key
    return ((Q(p) ** n, b), (Q(0), Q(1)))


@dataclass
class TreeModel:
    p: int = 5
    radius: int = 4
    truncation: Optional[int] = None
    vertices: Dict[VertexKey, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p ** 0.5) + 1)):
            raise ValueError("p must be prime")
        if self.truncation is None:
            self.truncation = 2 * self.radius + 4
        self._charts = None
        self.base: VertexKey = (0, Q(0))
        self.vertices = {self.base: 0}
        queue = deque([self.base])
        while queue:
            v = queue.popleft()
            if self.vertices[v] == self.radius:
                continue
            for w in self.neighbours(v):
                if w not in self.vertices:
                    self.vertices[w] = self.vertices[v] + 1
                    queue.append(w)

    def neighbours(self, key: VertexKey) -> List[VertexKey]:
        p = self.p
        b = key_basis(key, p)
        subs = [mat([[p, k], [0, 1]]) for k in range(p)] + [mat([[1, 0], [0, p]])]
        return [canonical_key(_mul(b, s), p) for s in subs]

    def distance(self, v: VertexKey, w: VertexKey) -> int:
        m = _mul(_inv(key_basis(v, self.p)), key_basis(w, self.p))
        vals = [val(e, self.p) for row in m for e in row if e != 0]
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        return val(det, self.p) - 2 * min(vals)

    def truncate(self, g: Mat) -> Mat:
        """Entries of ``g`` reduced mod p^N; raises when N is too small."""
        n = self.truncation
        need = 2 * self.radius + 1
        for i in range(2):
            for j in range(2):
                e = g[i][j] - IDENTITY[i][j]
                v = val(e, self.p)
                if v is not None and v < 0:
                    raise ValueError("element is not p-integral")
                if v is not None:
                    need = max(need, v + 1)
        if need > n:
            raise TruncationError(need, n)
        mod = self.p ** n
        return tuple(
            tuple(Q(e.numerator * pow(e.denominator, -1, mod) % mod) for e in row) for row in g
        )

    def fixes(self, g: Mat, key: VertexKey) -> bool:
        """Whether ``B^-1 g B`` is p-integral for the vertex basis ``B``."""
        n, b = key
        (g11, g12), (g21, g22) = g
        pn = Q(self.p) ** n
        entries = (
            g11 - b * g21,
            (g11 * b + g12 - g21 * b * b - g22 * b) / pn,
            g21 * pn,
            g21 * b + g22,
        )
        return all(_integral(e, self.p) for e in entries)

    def fixed_vertices(self, g: Mat) -> frozenset:
        gt = self.truncate(g)
        return frozenset(v for v in self.vertices if self.fixes(gt, v))

    def common_fixed(self, gens: Iterable[Mat]) -> frozenset:
        out = frozenset(self.vertices)
        for g in gens:
            out &= self.fixed_vertices(g)
        return out

    def on_standard_line(self, key: VertexKey) -> bool:
        return key[1] == 0

    def foot(self, key: VertexKey) -> VertexKey:
        """Nearest vertex of the standard apartment."""
        best = None
        for n in range(-self.radius - 1, self.radius + 2):
            d = self.distance(key, (n, Q(0)))
            if best is None or d < best[0]:
                best = (d, (n, Q(0)))
        return best[1]

    # elements ---------------------------------------------------------------

    def split_torus(self, k: int) -> Mat:
        u = 1 + Q(self.p) ** k
        return mat([[u, 0], [0, 1 / u]])

    def nonsquare(self) -> int:
        squares = {(a * a) % self.p for a in range(1, self.p)}
        return next(e for e in range(2, self.p) if e not in squares)

    def anisotropic(self, k: int) -> Mat:
        """Norm-one element of the unramified torus, depth exactly ``k``."""
        if self.p == 2:
            raise ValueError("the anisotropic torus model needs an odd prime")
        e = self.nonsquare()
        s = Q(self.p) ** k
        den = 1 - e * s * s
        a, b = (1 + e * s * s) / den, 2 * s / den
        return mat([[a, e * b], [b, a]])

    def upper(self, v: int, unit: int = 1) -> Mat:
        return mat([[1, unit * Q(self.p) ** v], [0, 1]])

    def lower(self, v: int, unit: int = 1) -> Mat:
        return mat([[1, 0], [unit * Q(self.p) ** v, 1]])

    # charts -----------------------------------------------------------------

    def chart_of(self) -> Dict[VertexKey, Tuple[Optional[Tuple[int, int]], int]]:
        """Each vertex as ``(fold, alpha value)``; fold is ``(sign, m)`` or None.

        A vertex off the standard line lies in ``u . A`` for a root element
        ``u`` of ``sign * alpha`` with valuation ``m``; its developed
        coordinate is the alpha value of the matching standard vertex.
        """
        if self._charts is not None:
            return self._charts
        out: Dict[VertexKey, Tuple[Optional[Tuple[int, int]], int]] = {}
        for n in range(-self.radius, self.radius + 1):
            k = (n, Q(0))
            if k in self.vertices:
                out[k] = (None, -n)
        p, r = self.p, self.radius
        for m in range(0, r):
            for sign in (1, -1):
                mod = p ** (r - m)
                for w in range(1, mod):
                    if w % p == 0:
                        continue
                    u = self.upper(m, w) if sign == 1 else self.lower(m, w)
                    for n in range(-r - m - 1, r + m + 2):
                        a = -n
                        if sign * a + m >= 0:
                            continue  # shared with the standard line
                        key = canonical_key(_mul(u, key_basis((n, Q(0)), p)), p)
                        if key in self.vertices and key not in out:
                            out[key] = ((sign, m), a)
        missing = set(self.vertices) - set(out)
        if missing:  # pragma: no cover - coverage is a theorem, checked here
            raise AssertionError(f"{len(missing)} vertices not reached by any chart")
        self._charts = out
        return out


def four_point_ok(model: TreeModel, a, b, c, d) -> bool:
    """Tree four-point condition: the two largest pair sums coincide."""
    s = sorted(
        [
            model.distance(a, b) + model.distance(c, d),
            model.distance(a, c) + model.distance(b, d),
            model.distance(a, d) + model.distance(b, c),
        ]
    )
    return s[1] == s[2]


@dataclass
class Comparison:
    name: str
    checked: int
    mismatches: List[VertexKey]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def compare(
    name: str,
    model: TreeModel,
    tree_set: Iterable[VertexKey],
    atlas_member: Callable[[Optional[Tuple[int, int]], int], bool],
) -> Comparison:
    """Check ``atlas_member(fold, alpha)`` against tree membership vertex by vertex."""
    tree = set(tree_set)
    charts = model.chart_of()
    bad = sorted(
        (v for v in model.vertices if atlas_member(*charts[v]) != (v in tree)),
        key=lambda k: (k[0], k[1]),
    )
    return Comparison(name, len(model.vertices), bad)


def compare_values(
    name: str,
    model: TreeModel,
    tree_value: Callable[[VertexKey], object],
    atlas_value: Callable[[Optional[Tuple[int, int]], int], object],
) -> Comparison:
    charts = model.chart_of()
    bad = sorted(
        (v for v in model.vertices if atlas_value(*charts[v]) != tree_value(v)),
        key=lambda k: (k[0], k[1]),
    )
    return Comparison(name, len(model.vertices), bad)


DEFAULT_DEPTHS = (Q(0), Q(1, 2), Q(1), Q(3, 2), Q(2))


def rank1_battery(
    p: int = 5, radius: int = 4, depths: Sequence[Q] = DEFAULT_DEPTHS, r0: Q = Q(4)
) -> List[Comparison]:
    """Atlas formulas against lattice stabilizers on the tree of SL2."""
    from .apartment import INF, Depth, FiltrationProfile
    from .atlas import (
        Atlas,
        Fold,
        _jump,
        fixed_region_profile,
        fixed_region_torus,
        project_to_trace,
    )
    from .datum import build_skeleton, filtered_profile
    from .roots import build_root_system

    rs = build_root_system("A1")
    model = TreeModel(p, radius)
    sk = build_skeleton(rs, [[]], [r0, r0], [0], p=p)
    box = ((Q(-radius - 1), Q(radius + 1)),)
    atlases: Dict[Optional[Tuple[int, int]], Atlas] = {}

    def chart(fold):
        if fold not in atlases:
            folds = () if fold is None else (Fold(rs.index((fold[0],)), Q(fold[1])),)
            atlases[fold] = Atlas(rs, (0,), folds, box, p)
        at = atlases[fold]
        return at, (0 if fold is None else 1)

    def member(region_of):
        cache = {}

        def inner(fold, a):
            if fold not in cache:
                cache[fold] = region_of(chart(fold)[0])
            at, c = chart(fold)
            return cache[fold].contains(at.point(c, (Q(a, 2),)))

        return inner

    out: List[Comparison] = []
    for t in depths:
        d = Depth(t)
        torus_only = lambda at, d=d: fixed_region_profile(
            FiltrationProfile(rs, at.x, d, (INF, INF), INF), at
        )
        out.append(compare(f"split torus t={t}", model,
                           model.fixed_vertices(model.split_torus(_jump(d))), member(torus_only)))
        center = lambda at, d=d: fixed_region_torus(0, d, sk, at)
        out.append(compare(f"anisotropic center t={t}", model,
                           model.fixed_vertices(model.anisotropic(sk.chain.center_jump(d))),
                           member(center)))
        dp = Depth(t, True)
        prof = filtered_profile("H+", dp, sk)
        gens = [model.split_torus(_jump(prof.torus_depth)),
                model.anisotropic(sk.chain.center_jump(prof.center_depth))]
        up = prof.min_affine_root(rs.index((1,)))
        lo = prof.min_affine_root(rs.index((-1,)))
        gens += [model.upper(up.offset), model.lower(lo.offset)]
        h_region = lambda at, prof=prof: fixed_region_profile(prof, at, sk)
        out.append(compare(f"H_(t+) t={t}", model, model.common_fixed(gens), member(h_region)))

    def atlas_foot(fold, a):
        at, c = chart(fold)
        line = at.region({0: [at.box_polyhedron()]})
        pr = project_to_trace(at.point(c, (Q(a, 2),)), line)
        return 2 * pr.point.coords[0]

    out.append(compare_values("projection feet", model, lambda v: -model.foot(v)[0], atlas_foot))
    return out
