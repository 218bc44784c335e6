"""Total arithmetic on the affinely extended real line.

Distance values live in [0, inf] and the bundled example space contains
actual +inf and -inf points, so arithmetic on them has to be explicit
about which combinations are defined.  Values are plain floats.  NaN is
rejected at the boundaries (parsing, construction of problem data); the
genuinely undefined combinations raise IndeterminateForm instead of
leaking NaN into downstream comparisons.
"""

from __future__ import annotations

import math

INF = float("inf")
NEG_INF = float("-inf")

# Extended reals are represented as floats throughout the package.
ExtReal = float


class IndeterminateForm(ArithmeticError):
    """inf - inf or 0 * inf; callers decide whether to skip or abort."""


def as_extreal(value: object) -> float:
    """Validate and coerce a number to an extended real (rejects NaN)."""
    x = float(value)  # type: ignore[arg-type]
    if math.isnan(x):
        raise ValueError("NaN is not an extended real")
    return x


def ext_add(a: float, b: float) -> float:
    if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
        raise IndeterminateForm(f"{format_extreal(a)} + {format_extreal(b)}")
    return a + b


def ext_sub(a: float, b: float) -> float:
    """a - b, undefined only for same-signed infinities."""
    if math.isinf(a) and math.isinf(b) and (a > 0) == (b > 0):
        raise IndeterminateForm(f"{format_extreal(a)} - {format_extreal(b)}")
    return a - b


def ext_scale(a: float, r: float) -> float:
    """r * a for finite r; 0 * (+/-inf) is indeterminate."""
    if not math.isfinite(r):
        raise ValueError(f"scale factor must be finite, got {r!r}")
    if r == 0.0 and math.isinf(a):
        raise IndeterminateForm(f"0 * {format_extreal(a)}")
    return r * a


def ext_abs(a: float) -> float:
    return abs(a)


def format_extreal(a: float) -> str:
    """Render to text: 'inf', '-inf', or a round-trippable decimal."""
    if a == INF:
        return "inf"
    if a == NEG_INF:
        return "-inf"
    return repr(float(a))


def parse_extreal(text: str) -> float:
    """Inverse of format_extreal; bit-faithful for finite doubles."""
    return as_extreal(float(text))
