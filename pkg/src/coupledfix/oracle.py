"""Exhaustive ground truth on small finite instances.

An instance is a distance table, a partial order, and an operator table
over at most 64 labels.  Everything the sampled machinery estimates can
be computed exactly here by enumeration, which is what makes these
instances useful as an independent check on the solver: the candidate a
run produces must appear in the enumerated fixed-point list, and the
sampled contraction estimate can never exceed the enumerated constant.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .extreal import INF
from .operators import CoupledOperator, estimate_contraction
from .product import OrderedSpace, pairs_comparable
from .spaces import BadParams, MetricSpace
from .solver import PreconditionFailed, SolveConfig, probe_uniqueness_comparable, solve

MAX_LABELS = 64


class OracleMismatch(AssertionError):
    """Sampled machinery disagreed with enumerated ground truth."""


@dataclass
class FiniteInstance:
    """Distance, order, and operator tables over labels 0..n-1."""

    labels: list
    distance: list
    leq: list
    f: list

    def __post_init__(self):
        n = len(self.labels)
        if not 1 <= n <= MAX_LABELS:
            raise BadParams(f"label count must be in 1..{MAX_LABELS}, got {n}")
        for name, table in (("distance", self.distance), ("leq", self.leq), ("f", self.f)):
            if len(table) != n or any(len(row) != n for row in table):
                raise BadParams(f"{name} table must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                if self.distance[i][j] < 0:
                    raise BadParams(f"distance[{i}][{j}] is negative")
                if self.distance[i][j] != self.distance[j][i]:
                    raise BadParams(f"distance table asymmetric at ({i}, {j})")
                if not (0 <= self.f[i][j] < n):
                    raise BadParams(f"f[{i}][{j}] out of range")
        for i in range(n):
            if not self.leq[i][i]:
                raise BadParams(f"order not reflexive at {i}")
            for j in range(n):
                if self.leq[i][j] and self.leq[j][i] and i != j:
                    raise BadParams(f"order not antisymmetric at ({i}, {j})")
                for k in range(n):
                    if self.leq[i][j] and self.leq[j][k] and not self.leq[i][k]:
                        raise BadParams(f"order not transitive at ({i}, {j}, {k})")

    @property
    def n(self) -> int:
        return len(self.labels)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "distance": [list(r) for r in self.distance],
            "leq": [[bool(v) for v in r] for r in self.leq],
            "f": [list(r) for r in self.f],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteInstance":
        return cls(
            labels=list(data["labels"]),
            distance=[list(map(float, r)) for r in data["distance"]],
            leq=[[bool(v) for v in r] for r in data["leq"]],
            f=[list(map(int, r)) for r in data["f"]],
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "FiniteInstance":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def as_ordered_space(self) -> OrderedSpace:
        n = self.n
        dist = self.distance
        leq = self.leq

        def sample_geq(rng: random.Random, p: int) -> int:
            ups = [q for q in range(n) if leq[p][q]]
            return rng.choice(ups)

        def sample_leq(rng: random.Random, p: int) -> int:
            downs = [q for q in range(n) if leq[q][p]]
            return rng.choice(downs)

        space = MetricSpace(
            name=f"finite_instance({n})",
            distance=lambda i, j: dist[i][j],
            d3_constant=1.0,
            equals=lambda i, j: i == j,
            contains=lambda p: isinstance(p, int) and not isinstance(p, bool) and 0 <= p < n,
            sample=lambda rng: rng.randrange(n),
        )
        return OrderedSpace(base=space, leq=lambda a, b: leq[a][b], sample_geq=sample_geq, sample_leq=sample_leq)

    def as_operator(self) -> CoupledOperator:
        f = self.f
        return CoupledOperator(lambda i, j: f[i][j], f"table({self.n} labels)")


def enumerate_coupled_fixed_points(inst: FiniteInstance) -> list:
    """All pairs (i, j) with f(i, j) = i and f(j, i) = j, by full scan."""
    return [
        (i, j)
        for i in range(inst.n)
        for j in range(inst.n)
        if inst.f[i][j] == i and inst.f[j][i] == j
    ]


def exact_contraction_constant(inst: FiniteInstance, form: str) -> float:
    """Worst ratio over every comparable quadruple, enumerated exactly.

    Ratios with zero denominator and nonzero numerator make the result
    infinite; zero-over-zero quadruples are excluded.
    """
    n = inst.n
    d = np.asarray(inst.distance, dtype=float)
    f = np.asarray(inst.f, dtype=int)
    leq = np.asarray(inst.leq, dtype=bool)
    best = 0.0
    for x in range(n):
        for u in range(n):
            if not leq[u, x]:  # need x >= u
                continue
            # vectorized over (y, v) with y <= v
            num_xy = d[np.ix_(f[x, :], f[u, :])]
            if form == "bhaskar_plus":
                num = 2.0 * num_xy
                denom = d[x, u] + d
            elif form == "max_form":
                num = num_xy
                denom = np.maximum(d[x, u], d)
            elif form == "berinde":
                num = num_xy + d[np.ix_(f[:, x], f[:, u])]
                denom = d[x, u] + d
            else:
                raise BadParams(f"unknown contraction form {form!r}")
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = num / denom
            ratio[(denom == 0) & (num == 0)] = 0.0
            ratio[(denom == 0) & (num > 0)] = INF
            ratio[np.isinf(denom)] = 0.0
            masked = ratio[leq]
            if masked.size:
                best = max(best, float(masked.max()))
    return best


@dataclass
class OracleReport:
    k_exact: float
    k_hat: float
    fixed_points: list
    start: tuple
    solver_status: str
    candidate: Optional[tuple]
    agreed: bool

    def to_json(self) -> dict:
        return {
            "k_exact": self.k_exact,
            "k_hat": self.k_hat,
            "fixed_points": [list(p) for p in self.fixed_points],
            "start": list(self.start),
            "solver_status": self.solver_status,
            "candidate": None if self.candidate is None else list(self.candidate),
            "agreed": self.agreed,
        }


def _admissible_start(inst: FiniteInstance) -> Optional[tuple]:
    for x0 in range(inst.n):
        for y0 in range(inst.n):
            if inst.leq[x0][inst.f[x0][y0]] and inst.leq[inst.f[y0][x0]][y0]:
                return (x0, y0)
    return None


def cross_check(inst: FiniteInstance, cfg: SolveConfig) -> OracleReport:
    """Run the sampled machinery against enumerated truth, or raise.

    Checks, in order: the enumerated contraction constant is below one;
    an admissible start exists; the solver converges to an enumerated
    fixed point; no two distinct comparable fixed points sit at finite
    pair distance; the uniqueness probe recognizes each fixed point as
    itself; the sampled contraction estimate stays at or below the
    enumerated constant.
    """
    form = {"bhaskar_plus": "bhaskar_plus", "bhaskar_max": "max_form", "berinde": "berinde"}[cfg.mode]
    k_exact = exact_contraction_constant(inst, form)
    if not k_exact < 1.0:
        raise PreconditionFailed(f"enumerated contraction constant {k_exact} is not below 1")
    start = _admissible_start(inst)
    if start is None:
        raise PreconditionFailed("no starting pair satisfies the order hypothesis")

    ordered = inst.as_ordered_space()
    op = inst.as_operator()
    rep = solve(ordered, op, start[0], start[1], cfg)
    fps = enumerate_coupled_fixed_points(inst)
    if rep.status != "converged" or rep.candidate not in fps:
        raise OracleMismatch(
            f"solver status {rep.status}, candidate {rep.candidate}, enumerated fixed points {fps}"
        )

    base = ordered.base
    for a in fps:
        for b in fps:
            if a < b and pairs_comparable(ordered, a, b):
                dab = base.distance(a[0], b[0]) + base.distance(a[1], b[1])
                if dab < INF:
                    raise OracleMismatch(
                        f"distinct comparable fixed points {a}, {b} at finite pair distance {dab}: construction bug"
                    )
    for fp in fps:
        probe = probe_uniqueness_comparable(ordered, op, fp, fp, cfg)
        if probe.verdict != "same":
            raise OracleMismatch(f"uniqueness probe rejects fixed point {fp} against itself")

    est = estimate_contraction(ordered, op, form, 2000, cfg.seed, cfg.declared_k)
    if est.k_hat > k_exact + 1e-12:
        raise OracleMismatch(f"sampled k_hat {est.k_hat} exceeds enumerated constant {k_exact}")

    return OracleReport(
        k_exact=k_exact,
        k_hat=est.k_hat,
        fixed_points=fps,
        start=start,
        solver_status=rep.status,
        candidate=rep.candidate,
        agreed=True,
    )


def engineered_instance(seed: int) -> FiniteInstance:
    """Seeded instance that is a contraction by construction.

    Labels 0 and 1 form a glued pair at small distance; every other
    distance is at least 1.  The operator only takes values in {0, 1}
    and never separates the glued pair, so any quadruple on which its
    values differ has denominator at least 1 and the worst ratio is at
    most twice the glue distance.  The chain order makes the operator
    mixed monotone, and (0, n-1) always satisfies the order hypothesis.
    """
    rng = random.Random(seed)
    n = rng.randint(5, 12)
    eps = rng.uniform(0.05, 0.3)
    theta = rng.randint(1, n - 3)
    values = [0.0, rng.uniform(0.0, 0.4)] + sorted(rng.uniform(0.5, 3.0) for _ in range(n - 2))

    def q(i: int) -> int:
        return 0 if i < 2 else i

    distance = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if {i, j} == {0, 1}:
                distance[i][j] = eps
            else:
                distance[i][j] = 1.0 + abs(values[i] - values[j])
    leq = [[i <= j for j in range(n)] for i in range(n)]
    constant = rng.random() < 0.2
    f = [
        [0 if constant else (1 if q(i) - q(j) >= theta else 0) for j in range(n)]
        for i in range(n)
    ]
    return FiniteInstance(labels=list(range(n)), distance=distance, leq=leq, f=f)
