"""Input checks shared by the estimator and the public helpers."""
from __future__ import annotations

import math
import numbers
from fractions import Fraction as Q
from typing import Any, List, Sequence, Tuple

from .exact import Vector, parse_rational


def as_rational(value: Any, name: str = "value") -> Q:
    """Exact rational from an int, Fraction, rational string or finite float.

    Floats go through their shortest decimal repr, so ``0.25`` becomes 1/4
    and ``0.1`` becomes 1/10 rather than the binary expansion.
    """
    if isinstance(value, bool):
        raise TypeError(f"{name}: booleans are not rationals")
    if isinstance(value, Q):
        return value
    if isinstance(value, numbers.Integral):
        return Q(int(value))
    if isinstance(value, str):
        try:
            return parse_rational(value)
        except ValueError as exc:
            raise ValueError(f"{name}: {exc}") from None
    if isinstance(value, numbers.Real):
        f = float(value)
        if not math.isfinite(f):
            raise ValueError(f"{name}: {f} is not finite")
        return Q(repr(f))
    raise TypeError(f"{name}: cannot read {type(value).__name__} as a rational")


def as_vector(values: Sequence[Any], dim: int, name: str = "point") -> Vector:
    vals = list(values)
    if len(vals) != dim:
        raise ValueError(f"{name}: expected {dim} coordinates, got {len(vals)}")
    return tuple(as_rational(v, f"{name}[{i}]") for i, v in enumerate(vals))


def check_query_array(X: Any, dim: int) -> List[Tuple[int, Vector]]:
    """Rows ``(chart, c_1, ..., c_dim)`` as exact chart points."""
    if X is None:
        raise ValueError("query array is None")
    rows = X.tolist() if hasattr(X, "tolist") else list(X)
    out = []
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != dim + 1:
            raise ValueError(f"row {i}: expected chart plus {dim} coordinates, got {len(row)} values")
        chart = as_rational(row[0], f"row {i} chart")
        if chart.denominator != 1 or chart < 0:
            raise ValueError(f"row {i}: chart must be a non-negative integer")
        out.append((int(chart), as_vector(row[1:], dim, f"row {i}")))
    return out


def check_depths(r: Sequence[Any]) -> Tuple[Q, ...]:
    out = tuple(as_rational(v, f"r_{i}") for i, v in enumerate(r))
    if not out:
        raise ValueError("at least one depth is required")
    return out
