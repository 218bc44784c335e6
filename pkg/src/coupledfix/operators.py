"""Coupled operators and their sampled hypothesis checks.

A coupled operator F maps a pair of points to a point.  The induced
pair map T(x, y) = (F(x, y), F(y, x)) is what actually gets iterated;
a coupled fixed point is a pair fixed by T.  This module provides the
iteration, the orbit-diameter functionals used as boundedness
hypotheses, and sampled checks for mixed monotonicity and for the
contraction inequality in its three forms.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable

from .extreal import INF, IndeterminateForm, ext_add, ext_scale
from .product import OrderedSpace, Pair, comparable_above, comparable_below, d_max, d_plus
from .spaces import BadParams, CheckReport, MetricSpace, Point, render_point

CONTRACTION_FORMS = ("bhaskar_plus", "max_form", "berinde")


@dataclass(frozen=True)
class CoupledOperator:
    """A two-argument operator on a space, with a display description."""

    fn: Callable[[Point, Point], Point]
    description: str = ""

    def __call__(self, x: Point, y: Point) -> Point:
        return self.fn(x, y)


class EvaluationError(RuntimeError):
    """Operator evaluation hit an indeterminate form.

    step is the 1-based iteration index where it happened (None for a
    single application); partial is the trajectory built so far.
    """

    def __init__(self, message: str, step: int | None = None, partial: "Trajectory | None" = None):
        super().__init__(message)
        self.step = step
        self.partial = partial


@dataclass
class Trajectory:
    """Recorded coupled iterates; xs[n], ys[n] is the n-th pair."""

    xs: list
    ys: list

    def __len__(self) -> int:
        return len(self.xs)

    def pair(self, n: int) -> Pair:
        return (self.xs[n], self.ys[n])


def iterate(op: CoupledOperator, x0: Point, y0: Point, n: int) -> Trajectory:
    """n steps of the coupled recurrence from (x0, y0)."""
    xs, ys = [x0], [y0]
    for step in range(1, n + 1):
        try:
            nx = op(xs[-1], ys[-1])
            ny = op(ys[-1], xs[-1])
        except IndeterminateForm as exc:
            raise EvaluationError(
                f"indeterminate form at iteration {step}: {exc}",
                step=step,
                partial=Trajectory(xs, ys),
            ) from exc
        xs.append(nx)
        ys.append(ny)
    return Trajectory(xs, ys)


def apply_tf(op: CoupledOperator, z: Pair) -> Pair:
    """One application of the pair map T(x, y) = (F(x, y), F(y, x))."""
    try:
        return (op(z[0], z[1]), op(z[1], z[0]))
    except IndeterminateForm as exc:
        raise EvaluationError(f"indeterminate form applying pair map: {exc}") from exc


@dataclass(frozen=True)
class DeltaEstimate:
    """Horizon-truncated orbit diameter.

    The true quantity is a supremum over all iterate indices; value is
    the maximum over the first `horizon` iterates, and growing is set
    when the running maximum was still rising in the final quarter of
    the horizon, meaning the supremum is possibly unbounded and value
    is only a lower bound.
    """

    value: float
    growing: bool
    horizon: int

    @property
    def bounded(self) -> bool:
        return not self.growing and math.isfinite(self.value)

    def to_json(self) -> dict:
        return {"value": self.value, "possibly_unbounded": self.growing, "horizon": self.horizon}


def _orbit_diameter(dist: Callable[[Point, Point], float], pts: list) -> DeltaEstimate:
    best = 0.0
    history = []
    for i, p in enumerate(pts):
        for q in pts[: i + 1]:
            d = dist(p, q)
            if d > best:
                best = d
        history.append(best)
    quarter = max(1, len(pts) // 4)
    growing = len(history) > quarter and history[-1] > history[-quarter - 1]
    return DeltaEstimate(value=best, growing=growing, horizon=len(pts))


def delta_f(space: MetricSpace, op: CoupledOperator, x0: Point, y0: Point, horizon: int = 64) -> DeltaEstimate:
    """Diameter of the first-coordinate orbit {F^i(x0, y0) : 1 <= i <= horizon}.

    Indices start at the first iterate, not at x0 itself.
    """
    traj = iterate(op, x0, y0, horizon)
    return _orbit_diameter(space.distance, traj.xs[1:])


def delta_tf(space_pair: MetricSpace, op: CoupledOperator, z0: Pair, horizon: int = 64) -> DeltaEstimate:
    """Diameter of the pair-map orbit under the given product space."""
    traj = iterate(op, z0[0], z0[1], horizon)
    pts = [traj.pair(i) for i in range(1, len(traj))]
    return _orbit_diameter(space_pair.distance, pts)


def check_mixed_monotone(ordered: OrderedSpace, op: CoupledOperator, sample_count: int, seed: int) -> CheckReport:
    """Sampled test: F nondecreasing in its first slot, nonincreasing in its second.

    Samples where the operator hits an indeterminate form are skipped
    and counted in the report note.
    """
    rng = random.Random(seed)
    base = ordered.base
    witnesses = []
    skipped = 0
    for _ in range(sample_count):
        x1 = base.sample(rng)
        x2 = comparable_above(ordered, rng, x1)
        y = base.sample(rng)
        try:
            lo, hi = op(x1, y), op(x2, y)
        except IndeterminateForm:
            skipped += 1
        else:
            if ordered.leq(x1, x2) and not ordered.leq(lo, hi):
                if len(witnesses) < 10:
                    witnesses.append(
                        {
                            "slot": "first",
                            "args": [render_point(x1), render_point(x2), render_point(y)],
                            "values": [render_point(lo), render_point(hi)],
                        }
                    )
        y1 = base.sample(rng)
        y2 = comparable_above(ordered, rng, y1)
        x = base.sample(rng)
        try:
            hi2, lo2 = op(x, y1), op(x, y2)
        except IndeterminateForm:
            skipped += 1
        else:
            if ordered.leq(y1, y2) and not ordered.leq(lo2, hi2):
                if len(witnesses) < 10:
                    witnesses.append(
                        {
                            "slot": "second",
                            "args": [render_point(x), render_point(y1), render_point(y2)],
                            "values": [render_point(hi2), render_point(lo2)],
                        }
                    )
    note = f"skipped {skipped} indeterminate samples" if skipped else ""
    return CheckReport("mixed_monotone", not witnesses, witnesses, sample_count, note)


@dataclass
class ContractionEstimate:
    """Sampled lower estimate of the best contraction constant.

    k_hat is the worst ratio seen over comparable quadruples; the check
    passes when k_hat stays within relative tolerance of the declared
    constant.  A zero denominator with nonzero numerator is a hard
    failure recorded as an infinite ratio.
    """

    form: str
    k_hat: float
    declared_k: float
    passed: bool
    witnesses: list = field(default_factory=list)
    samples: int = 0
    skipped: int = 0

    def to_json(self) -> dict:
        return {
            "form": self.form,
            "k_hat": self.k_hat,
            "declared_k": self.declared_k,
            "pass": self.passed,
            "witnesses": self.witnesses,
            "samples": self.samples,
            "skipped": self.skipped,
        }


def _ratio_parts(form: str, base: MetricSpace, op: CoupledOperator, x, y, u, v) -> tuple[float, float]:
    fxy = op(x, y)
    fuv = op(u, v)
    if form == "bhaskar_plus":
        num = 2.0 * base.distance(fxy, fuv)
        denom = d_plus(base, (x, y), (u, v))
    elif form == "max_form":
        num = base.distance(fxy, fuv)
        denom = d_max(base, (x, y), (u, v))
    elif form == "berinde":
        num = ext_add(base.distance(fxy, fuv), base.distance(op(y, x), op(v, u)))
        denom = d_plus(base, (x, y), (u, v))
    else:
        raise BadParams(f"contraction form must be one of {CONTRACTION_FORMS}, got {form!r}")
    return num, denom


def estimate_contraction(
    ordered: OrderedSpace,
    op: CoupledOperator,
    form: str,
    sample_count: int,
    seed: int,
    declared_k: float,
    rel_tol: float = 1e-9,
) -> ContractionEstimate:
    """Sample comparable quadruples x >= u, y <= v and bound the ratio.

    Quadruples where numerator and denominator are both zero, or both
    infinite, carry no information and are skipped (the infinite case is
    the bound holding by the exact-infinity comparison convention).
    """
    if form not in CONTRACTION_FORMS:
        raise BadParams(f"contraction form must be one of {CONTRACTION_FORMS}, got {form!r}")
    rng = random.Random(seed)
    base = ordered.base
    k_hat = 0.0
    witnesses: list = []
    used = 0
    skipped = 0
    tol = rel_tol * max(1.0, abs(declared_k))
    for _ in range(sample_count):
        u = base.sample(rng)
        v = base.sample(rng)
        x = comparable_above(ordered, rng, u)
        y = comparable_below(ordered, rng, v)
        try:
            num, denom = _ratio_parts(form, base, op, x, y, u, v)
        except IndeterminateForm:
            skipped += 1
            continue
        if denom == INF:
            if num == INF:
                skipped += 1
                continue
            ratio = 0.0
        elif denom == 0.0:
            if num == 0.0:
                skipped += 1
                continue
            ratio = INF
        else:
            ratio = num / denom
        used += 1
        if ratio > declared_k + tol and len(witnesses) < 10:
            witnesses.append(
                {
                    "x": render_point(x),
                    "y": render_point(y),
                    "u": render_point(u),
                    "v": render_point(v),
                    "ratio": render_point(ratio),
                }
            )
        if ratio > k_hat:
            k_hat = ratio
    return ContractionEstimate(
        form=form,
        k_hat=k_hat,
        declared_k=declared_k,
        passed=k_hat <= declared_k + tol,
        witnesses=witnesses,
        samples=used,
        skipped=skipped,
    )


# ---------------------------------------------------------------------------
# Operator catalog (the forms the CLI can name in a config)


def catalog_operator(name: str, params: dict) -> CoupledOperator:
    """Named operator constructors: linear_mix, constant, table."""
    if name == "linear_mix":
        a = float(params["a"])
        b = float(params["b"])

        def mix(x, y):
            return ext_add(ext_scale(x, a), ext_scale(y, b))

        return CoupledOperator(mix, f"linear_mix(a={a!r}, b={b!r})")
    if name == "constant":
        c = params["c"]
        return CoupledOperator(lambda x, y: c, f"constant({c!r})")
    if name == "table":
        rows = params["table"]
        table = [list(r) for r in rows]
        return CoupledOperator(lambda i, j: table[i][j], f"table({len(table)} labels)")
    raise BadParams(f"unknown operator {name!r}")
