"""Line-oriented configuration files.

Grammar (one ``key = value`` per line, ``#`` starts a comment)::

    [system]
    label = C2            # A1, A1xA1, A2, B2/C2 (or C2), G2
    p = 5                 # residue characteristic
    central = 0           # number of central directions

    [datum]
    level = (0, 2) (0, -2)   # repeated, innermost first; the whole system is implicit
    depths = 3 3             # r_0 ... r_d
    x = (0, 0)
    center_model = anisotropic
    center_step = 1

    [atlas]
    box = (-1, 1) (-1, 1)    # lo/hi per coordinate
    fold = (1, -1) 0         # repeated: fold root, fold depth

    [queries]
    point = 0 (1/4, 0)       # repeated: chart, coordinates
    lattice = 0 1/4          # repeated: chart, spacing (points of the box)

    [complementary]
    chain = long (2, 0) (-2, 0)   # repeated: name, roots

    [render]
    layers = walls, trace0, delta, complementary
    color.trace0 = #1b2a80   # optional per-layer colour

Roots and points use the coordinates of the root system's standard frame.
Rationals are written ``3/2``, ``-1/4`` or as integers.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Dict, List, Optional, Sequence, Tuple

from .atlas import Atlas, AtlasPoint, Fold
from .criteria import ComplementaryChain
from .datum import CENTER_MODELS, DatumSkeleton, DepthSequence, LeviChain
from .exact import Vector, fmt, parse_rational
from .roots import LABEL_ALIASES, RootSystem, build_root_system

SECTIONS = ("system", "datum", "atlas", "queries", "complementary", "render")
REPEATED = {("datum", "level"), ("atlas", "fold"), ("queries", "point"),
            ("queries", "lattice"), ("complementary", "chain")}
_TUPLE = re.compile(r"\(([^()]*)\)")


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)
        self.line, self.field = line, field


@dataclass(frozen=True)
class ConfigFile:
    label: str
    p: int = 5
    central: int = 0
    levels: Tuple[Tuple[Vector, ...], ...] = ()
    depths: Tuple[Q, ...] = (Q(0),)
    x: Optional[Vector] = None
    center_model: str = "anisotropic"
    center_step: Q = Q(1)
    box: Tuple[Tuple[Q, Q], ...] = ()
    folds: Tuple[Tuple[Vector, Q], ...] = ()
    points: Tuple[Tuple[int, Vector], ...] = ()
    lattices: Tuple[Tuple[int, Q], ...] = ()
    chains: Tuple[Tuple[str, Tuple[Vector, ...]], ...] = ()
    layers: Tuple[str, ...] = ()
    colors: Tuple[Tuple[str, str], ...] = ()

    # derived objects ----------------------------------------------------

    def root_system(self) -> RootSystem:
        return build_root_system(self.label, self.central)

    def skeleton(self) -> DatumSkeleton:
        rs = self.root_system()
        try:
            subs = [rs.subsystem(lv) for lv in self.levels]
            if not subs or len(subs[-1]) != len(rs.roots):
                subs.append(rs.full())
            chain = LeviChain(rs, tuple(subs), self.center_model, self.center_step)
            return DatumSkeleton(chain, self.point_x(rs), DepthSequence(self.depths), self.p)
        except ValueError as exc:
            raise ConfigError(str(exc), field="datum") from exc

    def point_x(self, rs: RootSystem) -> Vector:
        return self.x if self.x is not None else (Q(0),) * rs.dim

    def atlas(self, extend: int = 0) -> Atlas:
        rs = self.root_system()
        try:
            folds = tuple(Fold(rs.index(r), m) for r, m in self.folds)
            box = self.box or tuple((Q(-1), Q(1)) for _ in range(rs.dim))
            at = Atlas(rs, self.point_x(rs), folds, box, self.p)
            return at.extended(extend) if extend else at
        except ValueError as exc:
            raise ConfigError(str(exc), field="atlas") from exc

    def complementary(self) -> Tuple[ComplementaryChain, ...]:
        rs = self.root_system()
        try:
            return tuple(ComplementaryChain(n, rs.subsystem(rts)) for n, rts in self.chains)
        except ValueError as exc:
            raise ConfigError(str(exc), field="complementary") from exc

    def query_points(self, atlas: Atlas) -> List[AtlasPoint]:
        """Explicit points plus lattice points, canonical, deduplicated and sorted."""
        out = set()
        for c, v in self.points:
            try:
                out.add(atlas.point(c, v))
            except ValueError as exc:
                raise ConfigError(str(exc), field="queries.point") from exc
        for c, h in self.lattices:
            if c not in atlas.charts:
                raise ConfigError(f"unknown chart {c}", field="queries.lattice")
            for v in lattice_points(atlas.box, h):
                ap = AtlasPoint(c, v)
                if atlas.canonical(ap).chart == c:
                    out.add(ap)
        return sorted(out)


def lattice_points(box: Sequence[Tuple[Q, Q]], h: Q) -> List[Vector]:
    if h <= 0:
        raise ConfigError("lattice spacing must be positive", field="queries.lattice")
    axes = []
    for lo, hi in box:
        start = _ceil_div(lo, h)
        stop = _floor_div(hi, h)
        axes.append([k * h for k in range(start, stop + 1)])
    pts: List[Vector] = [()]
    for ax in axes:
        pts = [p + (v,) for p in pts for v in ax]
    return pts


def _ceil_div(a: Q, h: Q) -> int:
    q = a / h
    return -((-q.numerator) // q.denominator)


def _floor_div(a: Q, h: Q) -> int:
    q = a / h
    return q.numerator // q.denominator


def _tuples(text: str, line: int, key: str) -> List[Vector]:
    rest = _TUPLE.sub("", text).strip()
    if rest:
        raise ConfigError(f"unexpected text {rest!r} outside parentheses", line, key)
    out = []
    for m in _TUPLE.finditer(text):
        parts = [s for s in re.split(r"[,\s]+", m.group(1).strip()) if s]
        try:
            out.append(tuple(parse_rational(s) for s in parts))
        except ValueError as exc:
            raise ConfigError(str(exc), line, key) from exc
    return out


def _rationals(text: str, line: int, key: str) -> List[Q]:
    try:
        return [parse_rational(s) for s in re.split(r"[,\s]+", text.strip()) if s]
    except ValueError as exc:
        raise ConfigError(str(exc), line, key) from exc


def _int(text: str, line: int, key: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got {text.strip()!r}", line, key) from None


def _split_head(text: str, line: int, key: str) -> Tuple[str, str]:
    text = text.strip()
    m = re.match(r"^(\S+?)\s*(\(.*)$", text)
    if not m:
        raise ConfigError("expected a leading value followed by a tuple", line, key)
    return m.group(1), m.group(2)


def parse_config(text: str) -> ConfigFile:
    section = None
    seen: Dict[Tuple[str, str], int] = {}
    data: Dict[str, object] = {}
    levels, folds, points, lattices, chains, colors = [], [], [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("color.") else _strip_color_comment(raw)
        if not line:
            continue
        m = re.match(r"^\[(\w+)\]$", line)
        if m:
            section = m.group(1)
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        if section is None:
            raise ConfigError("key outside any section", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        full = f"{section}.{key}"
        if (section, key) not in REPEATED and not key.startswith("color."):
            if (section, key) in seen:
                raise ConfigError(f"duplicate key (first on line {seen[(section, key)]})", lineno, full)
            seen[(section, key)] = lineno
        if section == "system":
            if key == "label":
                if value not in LABEL_ALIASES:
                    raise ConfigError(f"unsupported root system {value!r}", lineno, full)
                data["label"] = value
            elif key in ("p", "central"):
                data[key] = _int(value, lineno, full)
            else:
                raise ConfigError("unknown key", lineno, full)
        elif section == "datum":
            if key == "level":
                levels.append(tuple(_tuples(value, lineno, full)))
            elif key == "depths":
                data["depths"] = tuple(_rationals(value, lineno, full))
            elif key == "x":
                t = _tuples(value, lineno, full)
                if len(t) != 1:
                    raise ConfigError("x must be a single tuple", lineno, full)
                data["x"] = t[0]
            elif key == "center_model":
                if value not in CENTER_MODELS:
                    raise ConfigError(f"center_model must be one of {CENTER_MODELS}", lineno, full)
                data["center_model"] = value
            elif key == "center_step":
                data["center_step"] = _rationals(value, lineno, full)[0]
            else:
                raise ConfigError("unknown key", lineno, full)
        elif section == "atlas":
            if key == "box":
                t = _tuples(value, lineno, full)
                if any(len(b) != 2 for b in t):
                    raise ConfigError("each box entry is a (lo, hi) pair", lineno, full)
                data["box"] = tuple((b[0], b[1]) for b in t)
            elif key == "fold":
                root, depth = _split_tail(value, lineno, full)
                folds.append((root, depth))
            else:
                raise ConfigError("unknown key", lineno, full)
        elif section == "queries":
            if key == "point":
                head, tail = _split_head(value, lineno, full)
                t = _tuples(tail, lineno, full)
                if len(t) != 1:
                    raise ConfigError("point takes one tuple", lineno, full)
                points.append((_int(head, lineno, full), t[0]))
            elif key == "lattice":
                parts = value.split()
                if len(parts) != 2:
                    raise ConfigError("lattice takes a chart and a spacing", lineno, full)
                lattices.append((_int(parts[0], lineno, full), _rationals(parts[1], lineno, full)[0]))
            else:
                raise ConfigError("unknown key", lineno, full)
        elif section == "complementary":
            if key != "chain":
                raise ConfigError("unknown key", lineno, full)
            head, tail = _split_head(value, lineno, full)
            chains.append((head, tuple(_tuples(tail, lineno, full))))
        elif section == "render":
            if key == "layers":
                data["layers"] = tuple(s.strip() for s in value.split(",") if s.strip())
            elif key.startswith("color."):
                colors.append((key[len("color."):], value))
            else:
                raise ConfigError("unknown key", lineno, full)
    if "label" not in data:
        raise ConfigError("missing [system] label", field="system.label")
    cfg = ConfigFile(
        label=data["label"],
        p=data.get("p", 5),
        central=data.get("central", 0),
        levels=tuple(levels),
        depths=data.get("depths", (Q(0),)),
        x=data.get("x"),
        center_model=data.get("center_model", "anisotropic"),
        center_step=data.get("center_step", Q(1)),
        box=data.get("box", ()),
        folds=tuple(folds),
        points=tuple(points),
        lattices=tuple(lattices),
        chains=tuple(chains),
        layers=data.get("layers", ()),
        colors=tuple(colors),
    )
    validate(cfg)
    return cfg


def _strip_color_comment(raw: str) -> str:
    # colours start with '#', so only a ' #' after the value opens a comment
    line = raw.strip()
    m = re.match(r"^(color\.\S+\s*=\s*\S+)(\s+#.*)?$", line)
    return m.group(1) if m else line


def _split_tail(text: str, line: int, key: str) -> Tuple[Vector, Q]:
    m = re.match(r"^(\(.*\))\s+(\S+)$", text.strip())
    if not m:
        raise ConfigError("expected '(root) depth'", line, key)
    t = _tuples(m.group(1), line, key)
    if len(t) != 1:
        raise ConfigError("fold takes one root", line, key)
    return t[0], _rationals(m.group(2), line, key)[0]


def validate(cfg: ConfigFile) -> None:
    """Build every derived object so that semantic errors surface eagerly."""
    try:
        rs = cfg.root_system()
    except ValueError as exc:
        raise ConfigError(str(exc), field="system") from exc
    if cfg.p < 2 or any(cfg.p % d == 0 for d in range(2, int(cfg.p ** 0.5) + 1)):
        raise ConfigError("p must be a prime", field="system.p")
    if cfg.x is not None and len(cfg.x) != rs.dim:
        raise ConfigError(f"x needs {rs.dim} coordinates", field="datum.x")
    for lv in cfg.levels:
        for r in lv:
            if not rs.is_root(r):
                raise ConfigError(f"{tuple(map(fmt, r))} is not a root of {rs.label}", field="datum.level")
    if cfg.box and len(cfg.box) != rs.dim:
        raise ConfigError(f"box needs {rs.dim} coordinate ranges", field="atlas.box")
    cfg.skeleton()
    at = cfg.atlas()
    cfg.complementary()
    cfg.query_points(at)
    for layer in cfg.layers:
        if layer not in KNOWN_LAYERS and not layer.startswith("theta:"):
            raise ConfigError(f"unknown layer {layer!r}", field="render.layers")


KNOWN_LAYERS = ("walls", "projection", "trace0", "delta", "complementary", "verdicts")


def _tup(v: Sequence[Q]) -> str:
    return "(" + ", ".join(fmt(c) for c in v) + ")"


def serialize(cfg: ConfigFile) -> str:
    out = ["[system]", f"label = {cfg.label}", f"p = {cfg.p}", f"central = {cfg.central}", ""]
    out.append("[datum]")
    for lv in cfg.levels:
        out.append("level = " + " ".join(_tup(r) for r in lv))
    out.append("depths = " + " ".join(fmt(r) for r in cfg.depths))
    if cfg.x is not None:
        out.append(f"x = {_tup(cfg.x)}")
    out.append(f"center_model = {cfg.center_model}")
    out.append(f"center_step = {fmt(cfg.center_step)}")
    out += ["", "[atlas]"]
    if cfg.box:
        out.append("box = " + " ".join(_tup(b) for b in cfg.box))
    for r, m in cfg.folds:
        out.append(f"fold = {_tup(r)} {fmt(m)}")
    out += ["", "[queries]"]
    for c, v in cfg.points:
        out.append(f"point = {c} {_tup(v)}")
    for c, h in cfg.lattices:
        out.append(f"lattice = {c} {fmt(h)}")
    out += ["", "[complementary]"]
    for name, roots in cfg.chains:
        out.append(f"chain = {name} " + " ".join(_tup(r) for r in roots))
    out += ["", "[render]"]
    if cfg.layers:
        out.append("layers = " + ", ".join(cfg.layers))
    for k, v in cfg.colors:
        out.append(f"color.{k} = {v}")
    return "\n".join(out) + "\n"


def load_config(path: str) -> ConfigFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)
