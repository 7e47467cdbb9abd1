"""Command line entry point.

Exit codes: 0 success, 1 oracle mismatch, 2 configuration or argument
error, 3 horizon or incompleteness met while ``--strict`` is on.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction as Q
from typing import List, Optional

from .config import ConfigError, load_config
from .criteria import theta_region
from .exact import fmt, parse_rational
from .render import RenderError, render_ascii, render_svg
from .report import dumps, run_classify

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_HORIZON = 0, 1, 2, 3


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_classify(args) -> int:
    cfg = load_config(args.config)
    report = run_classify(cfg, extend=args.extend_folds, workers=args.workers)
    _emit(dumps(report), args.out)
    if args.strict and any(r["horizon"] for r in report["records"]):
        print("strict: horizon reached for at least one query point", file=sys.stderr)
        return EXIT_HORIZON
    if args.strict and any(r["tainted"] for r in report["records"]):
        print("strict: some verdicts rely on a tameness assumption", file=sys.stderr)
        return EXIT_HORIZON
    return EXIT_OK


def _cmd_render(args) -> int:
    cfg = load_config(args.config)
    if args.ascii:
        _emit(render_ascii(cfg, extend=args.extend_folds), args.out)
        return EXIT_OK
    layers = cfg.layers if args.layers is None else [s for s in args.layers.split(",") if s]
    _emit(render_svg(cfg, layers, extend=args.extend_folds), args.out)
    return EXIT_OK


def _cmd_regions(args) -> int:
    cfg = load_config(args.config)
    atlas = cfg.atlas(args.extend_folds)
    try:
        t = parse_rational(args.t)
        region = theta_region(t, cfg.skeleton(), atlas)
    except ValueError as exc:
        raise ConfigError(str(exc), field="--t") from exc
    doc = {
        "t": fmt(t),
        "tainted": region.tainted,
        "pieces": [
            {"chart": c, "constraints": [str(k) for k in poly.constraints], "text": str(poly)}
            for c, poly in region.polyhedra()
        ],
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    if args.strict and region.tainted:
        print("strict: region relies on a tameness assumption", file=sys.stderr)
        return EXIT_HORIZON
    return EXIT_OK


def _cmd_oracle(args) -> int:
    from .oracle_tree import DEFAULT_DEPTHS, rank1_battery

    cfg = load_config(args.config)
    if cfg.root_system().label != "A1":
        raise ConfigError("oracle-check compares against the SL2 tree and needs an A1 system",
                          field="system.label")
    p = args.p if args.p is not None else cfg.p
    r0 = max(cfg.depths[0], Q(4))
    if args.radius < 1:
        raise ConfigError("radius must be at least 1", field="--radius")
    try:
        results = rank1_battery(p=p, radius=args.radius, depths=DEFAULT_DEPTHS, r0=r0)
    except ValueError as exc:
        raise ConfigError(str(exc), field="--p") from exc
    doc = {
        "p": p,
        "radius": args.radius,
        "comparisons": [
            {"name": c.name, "checked": c.checked, "mismatches": len(c.mismatches)}
            for c in results
        ],
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if all(c.ok for c in results) else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bttypes", description="Classify points of a building patch.")
    ap.add_argument("--extend-folds", type=int, default=0, metavar="N",
                    help="grow the atlas by up to N extra folds")
    ap.add_argument("--strict", action="store_true",
                    help="exit 3 when a horizon or tameness caveat is met")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify every query point")
    c.add_argument("config")
    c.add_argument("--out")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=_cmd_classify)

    r = sub.add_parser("render", help="draw the patch as SVG (or ASCII)")
    r.add_argument("config")
    r.add_argument("--layers", default=None, help="comma separated; default from the config")
    r.add_argument("--out")
    r.add_argument("--ascii", action="store_true")
    r.set_defaults(func=_cmd_render)

    g = sub.add_parser("regions", help="dump the Theta_t polyhedra")
    g.add_argument("config")
    g.add_argument("--t", required=True)
    g.add_argument("--out")
    g.set_defaults(func=_cmd_regions)

    o = sub.add_parser("oracle-check", help="compare against the SL2 lattice model")
    o.add_argument("config")
    o.add_argument("--p", type=int, default=None)
    o.add_argument("--radius", type=int, default=4)
    o.add_argument("--out")
    o.set_defaults(func=_cmd_oracle)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.extend_folds < 0:
        print("error: --extend-folds must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, RenderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
