"""Generalized metric spaces with sampled axiom checking.

The distance here is allowed to be infinite and to have nonzero
self-distance.  The triangle inequality is replaced by a limsup bound
along convergent sequences: there must be some constant c > 0 with

    D(x, y) <= c * limsup_n D(x_n, y)

for every sequence (x_n) that D-converges to x.  Checks in this module
are evidence, not proof.  A pass records the sample budget it was run
under; a failure carries concrete witness points so it can be replayed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .extreal import INF, NEG_INF, format_extreal

Point = Any

MAX_WITNESSES = 10


class DomainViolation(ValueError):
    """A point fed to a space operation is outside the space's domain."""


class NotConvergent(ValueError):
    """A sequence prefix supplied as convergent fails the convergence test."""


class BadParams(ValueError):
    """Unknown space kind or invalid construction parameters."""


@dataclass(frozen=True)
class MetricSpace:
    """A point set with a [0, inf]-valued symmetric distance.

    d3_constant is the declared limsup constant c; checkers test the
    declared value rather than inferring one.  The sampler draws domain
    points from a caller-owned random.Random so every check is
    reproducible from its seed.
    """

    name: str
    distance: Callable[[Point, Point], float]
    d3_constant: float
    equals: Callable[[Point, Point], bool]
    contains: Callable[[Point], bool]
    sample: Callable[[random.Random], Point]

    def __post_init__(self):
        if not (self.d3_constant > 0 and math.isfinite(self.d3_constant)):
            raise BadParams(f"d3_constant must be finite and positive, got {self.d3_constant!r}")


def distance(space: MetricSpace, x: Point, y: Point) -> float:
    """Distance with domain validation; raw space.distance skips the check."""
    for p in (x, y):
        if not space.contains(p):
            raise DomainViolation(f"{render_point(p)!r} is not in {space.name}")
    return space.distance(x, y)


def render_point(p: Point):
    """Witness-friendly form of a point (floats may be 'inf' / '-inf')."""
    if isinstance(p, bool):
        return p
    if isinstance(p, float):
        return format_extreal(p) if math.isinf(p) else p
    if isinstance(p, tuple):
        return [render_point(c) for c in p]
    return p


@dataclass
class CheckReport:
    """Outcome of one sampled axiom check."""

    axiom: str
    passed: bool
    witnesses: list = field(default_factory=list)
    samples: int = 0
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "axiom": self.axiom,
            "pass": self.passed,
            "witnesses": self.witnesses,
            "samples": self.samples,
        }
        if self.note:
            out["note"] = self.note
        return out


def check_d1(space: MetricSpace, sample_count: int, seed: int) -> CheckReport:
    """Sampled test of: distance zero implies the points are equal."""
    rng = random.Random(seed)
    witnesses = []
    for _ in range(sample_count):
        x, y = space.sample(rng), space.sample(rng)
        if space.distance(x, y) == 0.0 and not space.equals(x, y):
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append({"x": render_point(x), "y": render_point(y)})
    return CheckReport("D1", not witnesses, witnesses, sample_count)


def check_d2(space: MetricSpace, sample_count: int, seed: int) -> CheckReport:
    """Sampled test of exact symmetry of the distance."""
    rng = random.Random(seed)
    witnesses = []
    for _ in range(sample_count):
        x, y = space.sample(rng), space.sample(rng)
        dxy, dyx = space.distance(x, y), space.distance(y, x)
        if dxy != dyx:
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    {
                        "x": render_point(x),
                        "y": render_point(y),
                        "d_xy": render_point(dxy),
                        "d_yx": render_point(dyx),
                    }
                )
    return CheckReport("D2", not witnesses, witnesses, sample_count)


def is_convergent(space: MetricSpace, prefix: Sequence[Point], candidate: Point, tol: float) -> bool:
    """Finite-prefix convergence heuristic.

    Accepts when the distance to the candidate is below tol on the final
    quarter of the prefix and the maximum over the second half does not
    exceed the maximum over the first half.  A constant sequence at a
    point with nonzero self-distance is correctly rejected: convergence
    is about distances, not about points repeating.
    """
    if not prefix:
        raise ValueError("empty sequence prefix")
    dists = [space.distance(p, candidate) for p in prefix]
    n = len(dists)
    tail = dists[n - max(1, n // 4):]
    if any(not (d < tol) for d in tail):
        return False
    half = n // 2
    if half == 0:
        return True
    return max(dists[half:]) <= max(dists[:half])


def check_d3(
    space: MetricSpace,
    trials: Sequence[tuple],
    horizon: int,
    convergence_tol: float = 1e-6,
    tol: float = 1e-9,
) -> CheckReport:
    """Test the declared limsup constant on supplied convergent trials.

    Each trial is (prefix, limit, y).  The prefix must D-converge to its
    limit (checked; NotConvergent otherwise), then the bound

        D(limit, y) <= c * max(tail half of D(x_n, y)) + slack

    is evaluated, the tail-half maximum standing in for the limsup.  A
    finite tail can undershoot the limsup by as much as the distance
    still separating it from the limit (a sequence approaching from one
    side does exactly that), so the slack is c times the largest
    distance-to-limit over the same tail, plus tol.  The bound is
    certified at the resolution the trial actually achieved.  Infinite
    values compare exactly, so an infinite right side passes.  With no
    trials the report passes vacuously and says so.
    """
    witnesses = []
    for idx, (prefix, limit, y) in enumerate(trials):
        pts = list(prefix)[:horizon]
        if not is_convergent(space, pts, limit, convergence_tol):
            raise NotConvergent(f"trial {idx}: prefix does not D-converge to its limit within {len(pts)} terms")
        lhs = space.distance(limit, y)
        tail = pts[len(pts) // 2:]
        est = max(space.distance(p, y) for p in tail)
        resolution = max(space.distance(p, limit) for p in tail)
        rhs = space.d3_constant * est
        if lhs > rhs + space.d3_constant * resolution + tol:
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    {
                        "trial": idx,
                        "limit": render_point(limit),
                        "y": render_point(y),
                        "lhs": render_point(lhs),
                        "limsup_estimate": render_point(est),
                        "c": space.d3_constant,
                    }
                )
    note = "" if trials else "vacuous pass: no convergent trials supplied"
    return CheckReport("D3", not witnesses, witnesses, len(trials), note)


# ---------------------------------------------------------------------------
# Built-in spaces


def _cauchy(rng: random.Random) -> float:
    # heavy-tailed so checks see both tiny and huge magnitudes
    return math.tan(math.pi * (rng.random() - 0.5))


def _finite_samples(rng: random.Random) -> float:
    return _cauchy(rng)


def _extended_samples(rng: random.Random) -> float:
    # 90% finite heavy-tailed, 5% each infinity
    u = rng.random()
    if u < 0.05:
        return INF
    if u < 0.10:
        return NEG_INF
    return _cauchy(rng)


def _is_finite_real(p: Point) -> bool:
    return isinstance(p, (int, float)) and not isinstance(p, bool) and math.isfinite(p)


def _is_extended_real(p: Point) -> bool:
    return isinstance(p, (int, float)) and not isinstance(p, bool) and not math.isnan(p)


def builtin_space(kind: str, **params) -> MetricSpace:
    """Construct one of the named example spaces.

    standard_real      |x - y| on the finite reals, c = 1
    dislocated_abs     |x| + |y| on the reals with both infinities, c = 1
    b_metric_squared   (x - y)^2 on the finite reals, declared c = 2
    finite_discrete    0/1 distance on labels 0..n-1, c = 1
    """
    if kind == "standard_real":
        if params:
            raise BadParams(f"standard_real takes no params, got {params}")
        return MetricSpace(
            name="standard_real",
            distance=lambda x, y: abs(x - y),
            d3_constant=1.0,
            equals=lambda x, y: x == y,
            contains=_is_finite_real,
            sample=_finite_samples,
        )
    if kind == "dislocated_abs":
        if params:
            raise BadParams(f"dislocated_abs takes no params, got {params}")
        return MetricSpace(
            name="dislocated_abs",
            distance=lambda x, y: abs(x) + abs(y),
            d3_constant=1.0,
            equals=lambda x, y: x == y,
            contains=_is_extended_real,
            sample=_extended_samples,
        )
    if kind == "b_metric_squared":
        if params:
            raise BadParams(f"b_metric_squared takes no params, got {params}")
        return MetricSpace(
            name="b_metric_squared",
            distance=lambda x, y: (x - y) ** 2,
            d3_constant=2.0,
            equals=lambda x, y: x == y,
            contains=_is_finite_real,
            sample=_finite_samples,
        )
    if kind == "finite_discrete":
        n = params.pop("n", None)
        if params:
            raise BadParams(f"finite_discrete: unknown params {params}")
        if not isinstance(n, int) or n < 1:
            raise BadParams(f"finite_discrete needs an integer n >= 1, got {n!r}")
        return MetricSpace(
            name=f"finite_discrete({n})",
            distance=lambda x, y: 0.0 if x == y else 1.0,
            d3_constant=1.0,
            equals=lambda x, y: x == y,
            contains=lambda p: isinstance(p, int) and not isinstance(p, bool) and 0 <= p < n,
            sample=lambda rng: rng.randrange(n),
        )
    raise BadParams(f"unknown space kind {kind!r}")


def builtin_d3_trials(kind: str, count: int, seed: int, length: int = 64, n: int | None = None) -> list[tuple]:
    """Seeded convergent-sequence trials for a built-in space.

    Sequences alternate around their limit so the tail-half maximum sits
    on the far side of the limit and genuinely dominates the limsup.
    In the dislocated space D-convergence forces the limit to be 0, so
    every trial there converges to 0.
    """
    rng = random.Random(seed)
    trials = []
    for _ in range(count):
        ratio = rng.uniform(0.4, 0.7)
        scale = rng.uniform(0.5, 4.0)
        if kind == "dislocated_abs":
            prefix = [scale * (-ratio) ** i for i in range(1, length + 1)]
            limit = 0.0
            # occasionally probe against an infinite point
            y = rng.choice((INF, NEG_INF)) if rng.random() < 0.1 else rng.uniform(-5.0, 5.0)
        elif kind in ("standard_real", "b_metric_squared"):
            limit = rng.uniform(-3.0, 3.0)
            prefix = [limit + scale * (-ratio) ** i for i in range(1, length + 1)]
            y = rng.uniform(-8.0, 8.0)
        elif kind == "finite_discrete":
            if not n:
                raise BadParams("finite_discrete trials need n")
            limit = rng.randrange(n)
            head = [rng.randrange(n) for _ in range(length // 4)]
            prefix = head + [limit] * (length - len(head))
            y = rng.randrange(n)
        else:
            raise BadParams(f"no trial builder for space kind {kind!r}")
        trials.append((prefix, limit, y))
    return trials
