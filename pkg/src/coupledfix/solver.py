"""Coupled fixed-point iteration with a hypothesis audit and probes.

All three solver modes iterate the same pair map T(x, y) =
(F(x, y), F(y, x)); they differ in which contraction inequality is
sampled and which boundedness functional must stay finite.  The
sufficient conditions are audited, not enforced: a run whose hypotheses
fail still iterates, and only picks up the hypothesis_failed status if
it then fails to converge.  Convergence itself is declared from two
successive pair distances, which equals requiring a small step and a
small residual at the candidate.

The uniqueness and component-equality probes turn the contraction
arguments into finite computations.  Exact zero distances are only
reachable for exact fixed points, so every probe bound carries an
additive slack of 2 * residual_tol / (1 - k) to absorb approximate
candidates.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Optional

from .extreal import INF, IndeterminateForm
from .operators import (
    ContractionEstimate,
    CoupledOperator,
    DeltaEstimate,
    EvaluationError,
    Trajectory,
    apply_tf,
    check_mixed_monotone,
    delta_f,
    delta_tf,
    estimate_contraction,
    iterate,
)
from .product import OrderedSpace, Pair, d_plus, lift_space, pair_leq, pairs_comparable
from .spaces import BadParams, CheckReport, MetricSpace, render_point

SOLVE_MODES = ("bhaskar_plus", "bhaskar_max", "berinde")

_FORM_FOR_MODE = {
    "bhaskar_plus": "bhaskar_plus",
    "bhaskar_max": "max_form",
    "berinde": "berinde",
}


class PreconditionFailed(ValueError):
    """A probe was invoked outside the hypotheses of its argument."""


@dataclass
class SolveConfig:
    mode: str = "bhaskar_plus"
    max_iters: int = 10000
    residual_tol: float = 1e-9
    divergence_cap: float = 1e12
    horizon_for_delta: int = 64
    declared_k: float = 0.5
    seed: int = 0
    hypothesis_samples: int = 400

    def __post_init__(self):
        if self.mode not in SOLVE_MODES:
            raise BadParams(f"mode must be one of {SOLVE_MODES}, got {self.mode!r}")
        if self.max_iters < 1:
            raise BadParams("max_iters must be >= 1")
        if not (self.residual_tol > 0):
            raise BadParams("residual_tol must be positive")
        if not (0 <= self.declared_k < 1):
            raise BadParams(f"declared_k must lie in [0, 1), got {self.declared_k!r}")
        if self.horizon_for_delta < 1:
            raise BadParams("horizon_for_delta must be >= 1")

    def probe_slack(self) -> float:
        return 2.0 * self.residual_tol / (1.0 - self.declared_k)


@dataclass
class HypothesisReport:
    """Audit of the sufficient conditions at a starting pair."""

    mode: str
    order_ok: bool
    orientation: str  # "forward", "reversed", or "none"
    delta_ok: bool
    deltas: dict
    monotone: CheckReport
    contraction: ContractionEstimate

    @property
    def all_ok(self) -> bool:
        return self.order_ok and self.delta_ok and self.monotone.passed and self.contraction.passed

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "order_ok": self.order_ok,
            "orientation": self.orientation,
            "delta_ok": self.delta_ok,
            "deltas": {k: v.to_json() if isinstance(v, DeltaEstimate) else v for k, v in self.deltas.items()},
            "monotone": self.monotone.to_json(),
            "contraction": self.contraction.to_json(),
            "all_ok": self.all_ok,
        }


def check_hypotheses(
    ordered: OrderedSpace, op: CoupledOperator, x0, y0, cfg: SolveConfig
) -> HypothesisReport:
    """Evaluate order position, orbit boundedness, monotonicity, contraction.

    The two sum-form modes accept only the forward orientation
    (x0 below its image, y0 above); the pair-map mode accepts either
    orientation.
    """
    base = ordered.base
    try:
        fx = op(x0, y0)
        fy = op(y0, x0)
    except IndeterminateForm as exc:
        raise EvaluationError(f"operator undefined at the starting pair: {exc}") from exc
    forward = ordered.leq(x0, fx) and ordered.leq(fy, y0)
    reversed_ = ordered.leq(fx, x0) and ordered.leq(y0, fy)
    if cfg.mode == "berinde":
        order_ok = forward or reversed_
    else:
        order_ok = forward
    orientation = "forward" if forward else ("reversed" if reversed_ else "none")

    dx = delta_f(base, op, x0, y0, cfg.horizon_for_delta)
    dy = delta_f(base, op, y0, x0, cfg.horizon_for_delta)
    deltas: dict = {"delta_x": dx, "delta_y": dy, "m": max(dx.value, dy.value)}
    if cfg.mode == "berinde":
        dz = delta_tf(lift_space(base, "plus"), op, (x0, y0), cfg.horizon_for_delta)
        deltas["delta_pair"] = dz
        delta_ok = dz.bounded
    else:
        delta_ok = dx.bounded and dy.bounded

    monotone = check_mixed_monotone(ordered, op, cfg.hypothesis_samples, cfg.seed)
    contraction = estimate_contraction(
        ordered,
        op,
        _FORM_FOR_MODE[cfg.mode],
        cfg.hypothesis_samples,
        cfg.seed + 1,
        cfg.declared_k,
    )
    return HypothesisReport(
        mode=cfg.mode,
        order_ok=order_ok,
        orientation=orientation,
        delta_ok=delta_ok,
        deltas=deltas,
        monotone=monotone,
        contraction=contraction,
    )


@dataclass
class SolveReport:
    status: str  # converged | max_iters | diverged | hypothesis_failed | evaluation_error
    candidate: Optional[Pair]
    residual: Optional[float]
    trace: Trajectory
    steps: list  # steps[n] = pair distance from iterate n to n+1
    hypothesis_checks: Optional[HypothesisReport]
    measured_rate: Optional[float]
    config: SolveConfig
    space: MetricSpace
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "candidate": None if self.candidate is None else [render_point(c) for c in self.candidate],
            "residual": render_point(self.residual) if self.residual is not None else None,
            "iterations": len(self.trace) - 1,
            "measured_rate": self.measured_rate,
            "hypothesis_checks": None
            if self.hypothesis_checks is None
            else self.hypothesis_checks.to_json(),
            "detail": self.detail,
        }

    def trace_rows(self) -> list[dict]:
        """Rows for the delimited trace: point, arriving step, residual there.

        step_dplus at row n is the pair distance from row n-1 (absent at
        row 0); residual at row n is the pair distance to the next
        iterate (absent at the final row, where it was not evaluated).
        """
        rows = []
        for n in range(len(self.trace)):
            rows.append(
                {
                    "n": n,
                    "x_n": self.trace.xs[n],
                    "y_n": self.trace.ys[n],
                    "step_dplus": self.steps[n - 1] if n >= 1 else None,
                    "residual": self.steps[n] if n < len(self.steps) else None,
                }
            )
        return rows


def _measured_rate(steps: list) -> Optional[float]:
    ratios = [
        b / a
        for a, b in zip(steps, steps[1:])
        if 0.0 < a < INF and b < INF
    ]
    if not ratios:
        return None
    return statistics.median(ratios[-10:])


def solve(ordered: OrderedSpace, op: CoupledOperator, x0, y0, cfg: SolveConfig) -> SolveReport:
    """Iterate the pair map until two successive pair distances sit under tol.

    The candidate is the next-to-last iterate: the final recorded step is
    exactly the residual at the candidate, because the residual of a pair
    is its pair distance to its own image.
    """
    base = ordered.base
    try:
        hyp: Optional[HypothesisReport] = check_hypotheses(ordered, op, x0, y0, cfg)
    except EvaluationError as exc:
        return SolveReport(
            status="evaluation_error",
            candidate=None,
            residual=None,
            trace=Trajectory([x0], [y0]),
            steps=[],
            hypothesis_checks=None,
            measured_rate=None,
            config=cfg,
            space=base,
            detail=str(exc),
        )

    xs, ys = [x0], [y0]
    steps: list = []
    status = None
    candidate = None
    residual = None
    detail = ""
    while len(steps) < cfg.max_iters:
        try:
            nx = op(xs[-1], ys[-1])
            ny = op(ys[-1], xs[-1])
        except IndeterminateForm as exc:
            status = "evaluation_error"
            detail = f"indeterminate form at iteration {len(steps) + 1}: {exc}"
            break
        step = d_plus(base, (xs[-1], ys[-1]), (nx, ny))
        xs.append(nx)
        ys.append(ny)
        steps.append(step)
        if step > cfg.divergence_cap:
            status = "diverged"
            detail = f"pair step {render_point(step)} exceeded divergence cap at iteration {len(steps)}"
            break
        if len(steps) >= 2 and steps[-2] <= cfg.residual_tol and steps[-1] <= cfg.residual_tol:
            status = "converged"
            candidate = (xs[-2], ys[-2])
            residual = steps[-1]
            break
    if status is None:
        status = "max_iters"
        detail = f"no convergence within {cfg.max_iters} iterations"
    # A cap blow-up is reported as diverged even under failed hypotheses:
    # the orbit leaving the cap is the more specific diagnosis.
    if status == "max_iters" and hyp is not None and not hyp.all_ok:
        detail = f"{status}: {detail}" if detail else status
        status = "hypothesis_failed"
    if residual is None and steps:
        residual = steps[-1]
    return SolveReport(
        status=status,
        candidate=candidate,
        residual=residual,
        trace=Trajectory(xs, ys),
        steps=steps,
        hypothesis_checks=hyp,
        measured_rate=_measured_rate(steps),
        config=cfg,
        space=base,
        detail=detail,
    )


@dataclass
class RateReport:
    passed: bool
    violation: Optional[dict]
    pairs_checked: int

    def to_json(self) -> dict:
        return {"pass": self.passed, "violation": self.violation, "pairs_checked": self.pairs_checked}


def verify_rate(report: SolveReport, declared_k: float, m_bound: float, tol: float = 1e-9) -> RateReport:
    """Check the geometric tail bound on a stored trace, coordinatewise.

    The orbit-diameter functionals cover iterate indices from 1, so a
    pair of trace positions (b, b + p) with b >= 1 is separated from the
    covered base by b - 1 contraction steps, and the bound checked is

        D(x_{b+p}, x_b) <= k^(b-1) * M + tol.

    Returns the first violating (n, p) if any.
    """
    if not math.isfinite(m_bound):
        raise ValueError("M must be finite to verify a decay bound")
    traj = report.trace
    length = len(traj)
    if length < 3:
        raise ValueError("trace too short to verify a rate law")
    dist = report.space.distance
    indices = list(range(1, length))
    if len(indices) > 600:  # quadratic scan; thin out very long traces
        stride = len(indices) // 600 + 1
        indices = indices[::stride]
    checked = 0
    for b in indices:
        bound = declared_k ** (b - 1) * m_bound + tol
        for a in indices:
            if a < b:
                continue
            for label, coord in (("x", traj.xs), ("y", traj.ys)):
                d = dist(coord[a], coord[b])
                checked += 1
                if d > bound:
                    return RateReport(
                        passed=False,
                        violation={
                            "n": b,
                            "p": a - b,
                            "coordinate": label,
                            "distance": render_point(d),
                            "bound": render_point(bound),
                        },
                        pairs_checked=checked,
                    )
    return RateReport(passed=True, violation=None, pairs_checked=checked)


# ---------------------------------------------------------------------------
# Probes


@dataclass
class ProbeReport:
    kind: str
    verdict: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "verdict": self.verdict, "detail": self.detail}


def _require_fixed_point(base: MetricSpace, op: CoupledOperator, z: Pair, tol: float, label: str) -> None:
    """Accept exact fixed points (by equality) or small-residual ones.

    Exactness matters: a fixed point with infinite coordinates has an
    infinite residual under a dislocated distance even though it is
    fixed, and equality of infinite points is well defined here.
    """
    try:
        image = apply_tf(op, z)
    except EvaluationError as exc:
        raise PreconditionFailed(f"{label}: operator undefined at the pair ({exc})") from exc
    if base.equals(image[0], z[0]) and base.equals(image[1], z[1]):
        return
    res = d_plus(base, z, image)
    if not (res <= tol):
        raise PreconditionFailed(
            f"{label}: residual {render_point(res)} exceeds tolerance {tol:g}, not an approximate fixed point"
        )


def probe_uniqueness_comparable(
    ordered: OrderedSpace, op: CoupledOperator, p: Pair, q: Pair, cfg: SolveConfig
) -> ProbeReport:
    """Comparable fixed points at finite pair distance must coincide.

    The n-step contraction bound collapses their distance, so the probe
    just checks the distance against the propagated slack.  Refuses with
    PreconditionFailed when either pair is not an (approximate) fixed
    point, the pairs are incomparable, or their pair distance is
    infinite: the last is exactly the hypothesis that excludes the
    example's infinite fixed point.
    """
    base = ordered.base
    _require_fixed_point(base, op, p, cfg.residual_tol, "p")
    _require_fixed_point(base, op, q, cfg.residual_tol, "q")
    if not pairs_comparable(ordered, p, q):
        raise PreconditionFailed("p and q are not comparable in the pair order")
    d0 = d_plus(base, p, q)
    if d0 == INF:
        raise PreconditionFailed("infinite pair distance between p and q: the finiteness hypothesis excludes this pair")
    slack = cfg.probe_slack()
    tp = apply_tf(op, p)
    tq = apply_tf(op, q)
    d1 = d_plus(base, tp, tq)
    verdict = "same" if d0 <= slack else "distinct"
    return ProbeReport(
        kind="uniqueness_comparable",
        verdict=verdict,
        detail={
            "d_plus": render_point(d0),
            "bound": slack,
            "one_step_distance": render_point(d1),
            "one_step_contraction_ok": bool(d1 <= cfg.declared_k * d0 + cfg.residual_tol),
        },
    )


def probe_uniqueness_bridged(
    ordered: OrderedSpace, op: CoupledOperator, p: Pair, q: Pair, bridge: Pair, cfg: SolveConfig
) -> ProbeReport:
    """Bridge two (possibly incomparable) fixed points through a common bound.

    Iterating the pair map from the bridge must collapse onto both fixed
    points; the probe follows the two distance curves and concludes the
    points coincide when both fall below the propagated slack.
    """
    base = ordered.base
    _require_fixed_point(base, op, p, cfg.residual_tol, "p")
    _require_fixed_point(base, op, q, cfg.residual_tol, "q")
    if not pairs_comparable(ordered, bridge, p):
        raise PreconditionFailed("bridge is not comparable to p")
    if not pairs_comparable(ordered, bridge, q):
        raise PreconditionFailed("bridge is not comparable to q")
    for label, z in (("p", p), ("q", q)):
        for i in (0, 1):
            if base.distance(z[i], bridge[i]) == INF:
                raise PreconditionFailed(
                    f"infinite distance from bridge to {label} in coordinate {i}: finiteness hypothesis fails"
                )
    slack = cfg.probe_slack()
    z = bridge
    curve_p, curve_q = [], []
    dp0 = d_plus(base, bridge, p)
    dq0 = d_plus(base, bridge, q)
    bound_ok = True
    for n in range(1, cfg.max_iters + 1):
        z = apply_tf(op, z)
        dp = d_plus(base, z, p)
        dq = d_plus(base, z, q)
        curve_p.append(dp)
        curve_q.append(dq)
        k_n = cfg.declared_k ** n
        if dp > k_n * dp0 + slack or dq > k_n * dq0 + slack:
            bound_ok = False
        if dp <= slack and dq <= slack:
            break
    collapsed = bool(curve_p and curve_p[-1] <= slack and curve_q[-1] <= slack)
    verdict = "same" if collapsed else "inconclusive"
    return ProbeReport(
        kind="uniqueness_bridged",
        verdict=verdict,
        detail={
            "iterations": len(curve_p),
            "final_distance_p": render_point(curve_p[-1]) if curve_p else None,
            "final_distance_q": render_point(curve_q[-1]) if curve_q else None,
            "bound": slack,
            "decay_bound_ok": bound_ok,
            "curve_p": [render_point(v) for v in curve_p[:50]],
            "curve_q": [render_point(v) for v in curve_q[:50]],
        },
    )


def probe_component_equality(
    ordered: OrderedSpace,
    op: CoupledOperator,
    fp: Pair,
    cfg: SolveConfig,
    start: Optional[Pair] = None,
) -> ProbeReport:
    """Decide whether the two components of a coupled fixed point coincide.

    Three arguments are tried, mirroring how the equality conclusion is
    actually reached:

    * from the starting pair (when supplied, and its components are
      comparable at finite distance, and the orbit from it lands on fp):
      the cross distance decays like k^(n-1) times the starting cross
      distance along the orbit;
    * directly (components comparable at finite distance): the cross
      distance contracts into itself, so it must already sit under the
      slack;
    * through a sampled common bound z at finite distance from both
      components: three decay curves collapse the incomparable case.

    When none of the three applies the probe refuses; the fixed point
    with infinite coordinates fails all three finiteness requirements.
    """
    base = ordered.base
    _require_fixed_point(base, op, fp, cfg.residual_tol, "fp")
    x, y = fp
    slack = cfg.probe_slack()
    reasons = []

    # Case III: decay along the orbit from the supplied starting pair.
    if start is not None:
        report = _equality_case_iii(ordered, op, fp, start, cfg, slack, reasons)
        if report is not None:
            return report

    # Case I: components directly comparable at finite distance.
    dxy = base.distance(x, y)
    if ordered.leq(x, y) or ordered.leq(y, x):
        if dxy == INF:
            reasons.append("infinite distance between fp components")
        else:
            try:
                one_step = base.distance(op(x, y), op(y, x))
            except IndeterminateForm:
                one_step = None
            return ProbeReport(
                kind="component_equality",
                verdict="equal" if dxy <= slack else "not_equal",
                detail={
                    "case": "I",
                    "cross_distance": render_point(dxy),
                    "bound": slack,
                    "one_step_cross": render_point(one_step) if one_step is not None else None,
                },
            )

    # Case II: bridge the components through a sampled common bound.
    report = _equality_case_ii(ordered, op, fp, cfg, slack, reasons)
    if report is not None:
        return report

    raise PreconditionFailed("; ".join(reasons) if reasons else "no equality argument applies to this fixed point")


def _equality_case_iii(
    ordered: OrderedSpace,
    op: CoupledOperator,
    fp: Pair,
    start: Pair,
    cfg: SolveConfig,
    slack: float,
    reasons: list,
) -> Optional[ProbeReport]:
    base = ordered.base
    x0, y0 = start
    d0 = base.distance(x0, y0)
    if not (ordered.leq(x0, y0) or ordered.leq(y0, x0)):
        reasons.append("start components not comparable")
        return None
    if d0 == INF:
        reasons.append("infinite distance between start components")
        return None
    xs, ys = [x0], [y0]
    landed = d_plus(base, (x0, y0), fp) <= slack
    while not landed and len(xs) - 1 < cfg.max_iters:
        try:
            nx = op(xs[-1], ys[-1])
            ny = op(ys[-1], xs[-1])
        except IndeterminateForm as exc:
            reasons.append(f"orbit from the start pair hit an indeterminate form ({exc})")
            return None
        xs.append(nx)
        ys.append(ny)
        landed = d_plus(base, (nx, ny), fp) <= slack
    if not landed:
        reasons.append("orbit from the start pair does not land on fp")
        return None
    violations = []
    for i in range(1, len(xs)):
        cross = base.distance(xs[i], ys[i])
        bound = cfg.declared_k ** (i - 1) * d0 + slack
        if cross > bound:
            violations.append({"n": i, "cross": render_point(cross), "bound": render_point(bound)})
    final_cross = base.distance(xs[-1], ys[-1])
    return ProbeReport(
        kind="component_equality",
        verdict="equal" if not violations else "not_equal",
        detail={
            "case": "III",
            "start_cross_distance": render_point(d0),
            "final_cross_distance": render_point(final_cross),
            "orbit_length": len(xs) - 1,
            "violations": violations[:5],
        },
    )


def _equality_case_ii(
    ordered: OrderedSpace,
    op: CoupledOperator,
    fp: Pair,
    cfg: SolveConfig,
    slack: float,
    reasons: list,
) -> Optional[ProbeReport]:
    base = ordered.base
    x, y = fp
    rng = random.Random(cfg.seed)
    z = None
    for _ in range(100):
        cand = base.sample(rng)
        above = ordered.leq(x, cand) and ordered.leq(y, cand)
        below = ordered.leq(cand, x) and ordered.leq(cand, y)
        if not (above or below):
            continue
        if base.distance(cand, x) == INF or base.distance(cand, y) == INF:
            continue
        z = cand
        break
    if z is None:
        reasons.append("no common bound of the components found at finite distance")
        return None
    dyz = base.distance(y, z)
    dzx = base.distance(z, x)
    horizon = min(cfg.max_iters, 512)
    traj = iterate(op, x, z, horizon)
    curves_ok = True
    last: dict = {}
    for i in range(1, len(traj)):
        k_i = cfg.declared_k ** i
        a = base.distance(x, traj.xs[i])
        b = base.distance(traj.ys[i], y)
        c = base.distance(traj.xs[i], traj.ys[i])
        last = {"to_x": a, "to_y": b, "cross": c}
        if a > k_i / 2 * dyz + slack or b > k_i / 2 * dyz + slack or c > k_i * dzx + slack:
            curves_ok = False
        if a <= slack and b <= slack and c <= slack:
            break
    collapsed = bool(last) and all(v <= slack for v in last.values())
    return ProbeReport(
        kind="component_equality",
        verdict="equal" if (curves_ok and collapsed) else "not_equal",
        detail={
            "case": "II",
            "bound_point": render_point(z),
            "final_curves": {k: render_point(v) for k, v in last.items()},
            "decay_bound_ok": curves_ok,
        },
    )
