"""Pair spaces over a base space, and the coordinate order on pairs.

Two product distances are supported: the sum form and the max form.
Both inherit the base limsup constant (the componentwise argument gives
c0 = max of the component constants, and here both components share one
base space).  The pair order is the mixed one used for coupled
monotonicity: (u, v) <= (x, y) iff u <= x and y <= v.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .extreal import ext_add
from .spaces import BadParams, MetricSpace, Point, _cauchy, builtin_space

Pair = tuple

PRODUCT_MODES = ("plus", "max")


@dataclass(frozen=True)
class OrderedSpace:
    """A metric space together with a partial order on its points.

    sample_geq / sample_leq draw a comparable point above or below a
    given one; when absent, comparable sampling falls back to rejection
    from the base sampler.
    """

    base: MetricSpace
    leq: Callable[[Point, Point], bool]
    sample_geq: Optional[Callable[[random.Random, Point], Point]] = None
    sample_leq: Optional[Callable[[random.Random, Point], Point]] = None


def d_plus(base: MetricSpace, a: Pair, b: Pair) -> float:
    """Sum product distance D(a0,b0) + D(a1,b1)."""
    return ext_add(base.distance(a[0], b[0]), base.distance(a[1], b[1]))


def d_max(base: MetricSpace, a: Pair, b: Pair) -> float:
    """Max product distance."""
    return max(base.distance(a[0], b[0]), base.distance(a[1], b[1]))


def pair_leq(ordered: OrderedSpace, a: Pair, b: Pair) -> bool:
    """a <= b in the pair order: first coordinates up, second down."""
    return ordered.leq(a[0], b[0]) and ordered.leq(b[1], a[1])


def pairs_comparable(ordered: OrderedSpace, a: Pair, b: Pair) -> bool:
    return pair_leq(ordered, a, b) or pair_leq(ordered, b, a)


def lift_space(base: MetricSpace, mode: str) -> MetricSpace:
    """The pair space under the chosen product distance."""
    if mode == "plus":
        dist = lambda a, b: d_plus(base, a, b)
    elif mode == "max":
        dist = lambda a, b: d_max(base, a, b)
    else:
        raise BadParams(f"product mode must be one of {PRODUCT_MODES}, got {mode!r}")
    return MetricSpace(
        name=f"{base.name}^2/{mode}",
        distance=dist,
        d3_constant=base.d3_constant,
        equals=lambda a, b: base.equals(a[0], b[0]) and base.equals(a[1], b[1]),
        contains=lambda p: isinstance(p, tuple)
        and len(p) == 2
        and base.contains(p[0])
        and base.contains(p[1]),
        sample=lambda rng: (base.sample(rng), base.sample(rng)),
    )


def comparable_above(ordered: OrderedSpace, rng: random.Random, p: Point) -> Point:
    """Draw some q with p <= q (p itself is a legitimate draw)."""
    if ordered.sample_geq is not None:
        return ordered.sample_geq(rng, p)
    for _ in range(64):
        q = ordered.base.sample(rng)
        if ordered.leq(p, q):
            return q
    return p


def comparable_below(ordered: OrderedSpace, rng: random.Random, p: Point) -> Point:
    if ordered.sample_leq is not None:
        return ordered.sample_leq(rng, p)
    for _ in range(64):
        q = ordered.base.sample(rng)
        if ordered.leq(q, p):
            return q
    return p


# ---------------------------------------------------------------------------
# Ordered builtins


def ordered_space(kind: str, **params) -> OrderedSpace:
    """Built-in space equipped with its natural total order.

    Real kinds use the usual order on extended reals; comparable draws
    offset by a nonnegative heavy-tailed amount, with some mass at zero
    offset so equal-coordinate quadruples actually occur.
    """
    base = builtin_space(kind, **params)
    if kind == "finite_discrete":
        n = params["n"]

        def up_label(rng: random.Random, p: int) -> int:
            return p if rng.random() < 0.25 else rng.randrange(p, n)

        def down_label(rng: random.Random, p: int) -> int:
            return p if rng.random() < 0.25 else rng.randrange(0, p + 1)

        return OrderedSpace(base=base, leq=lambda a, b: a <= b, sample_geq=up_label, sample_leq=down_label)

    def up(rng: random.Random, p: float) -> float:
        off = 0.0 if rng.random() < 0.25 else abs(_cauchy(rng))
        return ext_add(p, off)

    def down(rng: random.Random, p: float) -> float:
        off = 0.0 if rng.random() < 0.25 else abs(_cauchy(rng))
        return ext_add(p, -off)

    return OrderedSpace(base=base, leq=lambda a, b: a <= b, sample_geq=up, sample_leq=down)
