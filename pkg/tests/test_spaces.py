import math
import random

import pytest

from coupledfix.extreal import INF, NEG_INF
from coupledfix.spaces import (
    BadParams,
    DomainViolation,
    MetricSpace,
    NotConvergent,
    builtin_d3_trials,
    builtin_space,
    check_d1,
    check_d2,
    check_d3,
    distance,
    is_convergent,
)


def _labels(n):
    return builtin_space("finite_discrete", n=n)


def test_distance_examples():
    std = builtin_space("standard_real")
    dis = builtin_space("dislocated_abs")
    sq = builtin_space("b_metric_squared")
    assert distance(std, 2.0, 5.0) == 3.0
    assert distance(dis, -3.0, 2.0) == 5.0
    assert distance(dis, INF, 1.0) == INF
    assert distance(sq, 1.0, 4.0) == 9.0
    assert distance(_labels(3), 2, 2) == 0.0
    assert distance(_labels(3), 0, 2) == 1.0


def test_distance_validates_domain():
    std = builtin_space("standard_real")
    with pytest.raises(DomainViolation):
        distance(std, INF, 0.0)
    with pytest.raises(DomainViolation):
        distance(std, float("nan"), 0.0)
    with pytest.raises(DomainViolation):
        distance(_labels(3), 5, 0)
    # raw access skips the check on purpose
    assert _labels(3).distance(5, 0) == 1.0


def test_builtin_space_rejects_bad_params():
    with pytest.raises(BadParams):
        builtin_space("no_such_space")
    with pytest.raises(BadParams):
        builtin_space("standard_real", n=4)
    with pytest.raises(BadParams):
        builtin_space("finite_discrete")
    with pytest.raises(BadParams):
        builtin_space("finite_discrete", n=0)


def test_d3_constant_must_be_positive_finite():
    for bad in (0.0, -1.0, INF):
        with pytest.raises(BadParams):
            MetricSpace(
                name="bad",
                distance=lambda x, y: 0.0,
                d3_constant=bad,
                equals=lambda x, y: x == y,
                contains=lambda p: True,
                sample=lambda rng: 0.0,
            )


def test_identity_and_symmetry_hold_on_builtins():
    for kind in ("standard_real", "dislocated_abs", "b_metric_squared"):
        space = builtin_space(kind)
        assert check_d1(space, 2000, seed=1).passed
        assert check_d2(space, 2000, seed=2).passed
    space = _labels(5)
    assert check_d1(space, 2000, seed=3).passed
    assert check_d2(space, 2000, seed=4).passed


def test_identity_check_catches_collapsed_distance():
    # distance that cannot tell labels apart
    broken = MetricSpace(
        name="zero_everywhere",
        distance=lambda x, y: 0.0,
        d3_constant=1.0,
        equals=lambda x, y: x == y,
        contains=lambda p: isinstance(p, int) and 0 <= p < 4,
        sample=lambda rng: rng.randrange(4),
    )
    report = check_d1(broken, 500, seed=0)
    assert not report.passed
    assert report.witnesses
    w = report.witnesses[0]
    assert w["x"] != w["y"]


def test_symmetry_check_catches_one_sided_clipping():
    broken = MetricSpace(
        name="clipped_difference",
        distance=lambda x, y: max(x - y, 0.0),
        d3_constant=1.0,
        equals=lambda x, y: x == y,
        contains=lambda p: isinstance(p, float) and math.isfinite(p),
        sample=lambda rng: rng.uniform(-5.0, 5.0),
    )
    report = check_d2(broken, 500, seed=0)
    assert not report.passed
    w = report.witnesses[0]
    assert w["d_xy"] != w["d_yx"]


def test_report_json_shape():
    report = check_d1(builtin_space("standard_real"), 10, seed=0)
    out = report.to_json()
    assert out["axiom"] == "D1"
    assert out["pass"] is True
    assert out["samples"] == 10


def test_is_convergent_geometric_decay():
    prefix = [(-2 / 3) ** i for i in range(1, 65)]
    assert is_convergent(builtin_space("standard_real"), prefix, 0.0, 1e-6)
    assert is_convergent(builtin_space("dislocated_abs"), prefix, 0.0, 1e-6)


def test_is_convergent_constant_sequences():
    # repeating a point is not enough when its self-distance is positive
    assert not is_convergent(builtin_space("dislocated_abs"), [1.0] * 40, 1.0, 1e-6)
    assert is_convergent(builtin_space("standard_real"), [1.0] * 40, 1.0, 1e-6)
    assert is_convergent(builtin_space("dislocated_abs"), [0.0] * 40, 0.0, 1e-6)


def test_is_convergent_rejects_wrong_limit():
    prefix = [0.5 + (-2 / 3) ** i for i in range(1, 65)]
    std = builtin_space("standard_real")
    assert is_convergent(std, prefix, 0.5, 1e-6)
    assert not is_convergent(std, prefix, 0.4, 1e-6)
    # in the dislocated space only 0 can absorb a sequence
    assert not is_convergent(builtin_space("dislocated_abs"), prefix, 0.5, 1e-6)


def test_is_convergent_empty_prefix():
    with pytest.raises(ValueError):
        is_convergent(builtin_space("standard_real"), [], 0.0, 1e-6)


def test_limsup_bound_alternating_trial_passes():
    prefix = [(-2 / 3) ** i for i in range(1, 65)]
    report = check_d3(builtin_space("dislocated_abs"), [(prefix, 0.0, 1.0)], horizon=64)
    assert report.passed
    assert report.samples == 1


def test_limsup_bound_one_sided_approach_passes():
    # 1/n creeps up on its limit from one side; the certified slack
    # keeps the check honest instead of failing on resolution alone
    prefix = [1.0 / n for n in range(1, 65)]
    std = builtin_space("standard_real")
    with pytest.raises(NotConvergent):
        check_d3(std, [(prefix, 0.0, 5.0)], horizon=64)
    report = check_d3(std, [(prefix, 0.0, 5.0)], horizon=64, convergence_tol=0.05)
    assert report.passed


def test_limsup_bound_fails_for_understated_constant():
    prefix = [2.0 ** -n for n in range(1, 65)]
    tight = MetricSpace(
        name="squared_tight",
        distance=lambda x, y: (x - y) ** 2,
        d3_constant=0.1,
        equals=lambda x, y: x == y,
        contains=lambda p: isinstance(p, float) and math.isfinite(p),
        sample=lambda rng: rng.uniform(-5.0, 5.0),
    )
    report = check_d3(tight, [(prefix, 0.0, 5.0)], horizon=64)
    assert not report.passed
    w = report.witnesses[0]
    assert w["c"] == 0.1
    assert w["lhs"] == 25.0
    # the same trial is fine under the constant the space really needs
    ok = check_d3(builtin_space("b_metric_squared"), [(prefix, 0.0, 5.0)], horizon=64)
    assert ok.passed


def test_limsup_bound_rejects_nonconvergent_trial():
    prefix = [1.0 if i % 2 else -1.0 for i in range(64)]
    with pytest.raises(NotConvergent):
        check_d3(builtin_space("standard_real"), [(prefix, 0.0, 5.0)], horizon=64)


def test_limsup_bound_vacuous_without_trials():
    report = check_d3(builtin_space("standard_real"), [], horizon=64)
    assert report.passed
    assert "vacuous" in report.note


def test_builtin_trials_pass_their_own_space():
    for kind in ("standard_real", "dislocated_abs", "b_metric_squared"):
        trials = builtin_d3_trials(kind, count=5, seed=9)
        assert len(trials) == 5
        assert all(len(t[0]) == 64 for t in trials)
        assert check_d3(builtin_space(kind), trials, horizon=64).passed
    trials = builtin_d3_trials("finite_discrete", count=5, seed=9, n=4)
    assert check_d3(_labels(4), trials, horizon=64).passed


def test_builtin_trials_need_params():
    with pytest.raises(BadParams):
        builtin_d3_trials("finite_discrete", count=3, seed=0)
    with pytest.raises(BadParams):
        builtin_d3_trials("no_such_space", count=3, seed=0)


def test_standard_self_distance_is_zero():
    std = builtin_space("standard_real")
    rng = random.Random(5)
    for _ in range(200):
        x = std.sample(rng)
        assert std.distance(x, x) == 0.0


def test_dislocated_self_distance_doubles_magnitude():
    dis = builtin_space("dislocated_abs")
    rng = random.Random(6)
    for _ in range(200):
        x = rng.uniform(-100.0, 100.0)
        assert dis.distance(x, x) == 2 * abs(x)
    assert dis.distance(INF, INF) == INF
    assert dis.distance(NEG_INF, NEG_INF) == INF


def test_squared_distance_satisfies_relaxed_triangle():
    # (x - z)^2 <= 2 ((x - y)^2 + (y - z)^2): the reason its constant is 2
    sq = builtin_space("b_metric_squared")
    rng = random.Random(7)
    for _ in range(1000):
        x, y, z = (rng.uniform(-50.0, 50.0) for _ in range(3))
        assert sq.distance(x, z) <= 2 * (sq.distance(x, y) + sq.distance(y, z)) + 1e-9
