"""JSON classification reports with exact rationals written as strings."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as Q
from typing import Any, Dict, List, Optional

from .atlas import Atlas, AtlasPoint
from .config import ConfigFile
from .criteria import ATYPICAL_A, ATYPICAL_B, KINDS, Verdict, classify, context
from .exact import fmt

SCHEMA = "bttypes.report/1"


def _plain(value: Any) -> Any:
    """Turn witnesses into JSON-ready values."""
    if isinstance(value, Q):
        return fmt(value)
    if isinstance(value, AtlasPoint):
        return {"chart": value.chart, "coords": [fmt(c) for c in value.coords]}
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(value[k]) for k in sorted(value)}
    if isinstance(value, int) and not isinstance(value, bool):
        return fmt(Q(value))
    return value


def record(point: AtlasPoint, verdict: Verdict) -> Dict[str, Any]:
    notes = list(verdict.annotations)
    return {
        "chart": point.chart,
        "coords": [fmt(c) for c in point.coords],
        "kind": verdict.kind,
        "witness": _plain(verdict.witness) if verdict.witness is not None else None,
        "annotations": notes,
        "horizon": any("horizon" in n for n in notes),
        "tainted": any(n.startswith("tainted") for n in notes),
    }


def classify_points(
    cfg: ConfigFile, atlas: Atlas, points: List[AtlasPoint], workers: int = 1
) -> List[Dict[str, Any]]:
    sk, chains = cfg.skeleton(), cfg.complementary()
    ctx = context(sk, atlas, chains)
    # warm shared caches once so worker threads only read them
    ctx.fix_j, ctx.trace0, ctx.chain_traces

    def one(pt: AtlasPoint) -> Dict[str, Any]:
        return record(pt, classify(pt, sk, atlas, chains))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            recs = list(pool.map(one, points))
    else:
        recs = [one(pt) for pt in points]
    return sorted(recs, key=lambda r: (r["chart"], [Q(c) for c in r["coords"]]))


def run_classify(cfg: ConfigFile, extend: int = 0, workers: int = 1) -> Dict[str, Any]:
    atlas = cfg.atlas(extend)
    records = classify_points(cfg, atlas, cfg.query_points(atlas), workers)
    counts = {k: sum(r["kind"] == k for r in records) for k in KINDS}
    return {
        "schema": SCHEMA,
        "system": cfg.root_system().label,
        "p": cfg.p,
        "depths": [fmt(r) for r in cfg.depths],
        "charts": list(atlas.charts),
        "counts": counts,
        "records": records,
    }


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def check_report(report: Dict[str, Any]) -> Optional[str]:
    """Return a description of the first schema problem, or None."""
    if report.get("schema") != SCHEMA:
        return "schema version missing or unknown"
    for i, r in enumerate(report.get("records", [])):
        if r.get("kind") not in KINDS:
            return f"record {i}: bad kind {r.get('kind')!r}"
        if r["kind"] == ATYPICAL_A and "functional" not in (r.get("witness") or {}):
            return f"record {i}: missing functional witness"
        if r["kind"] == ATYPICAL_B and "t" not in (r.get("witness") or {}):
            return f"record {i}: missing depth witness"
        for c in r.get("coords", []):
            Q(c)
    return None
