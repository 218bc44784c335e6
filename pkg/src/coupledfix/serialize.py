"""Helpers for JSON-safe report payloads.

Reports must serialize deterministically, and strict JSON has no
infinities, so non-finite floats become the strings "inf" / "-inf"
(matching the text rendering used everywhere else).
"""

from __future__ import annotations

import dataclasses
import math

from .extreal import format_extreal


def jsonable(obj):
    """Recursively convert a report structure to plain JSON-safe data."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        if math.isinf(obj):
            return format_extreal(obj)
        return obj
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return str(obj)


def fmt_csv_value(v) -> str:
    """17-significant-digit rendering for trace files; '' for absent cells."""
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    x = float(v)
    if math.isinf(x):
        return format_extreal(x)
    return "%.17g" % x
