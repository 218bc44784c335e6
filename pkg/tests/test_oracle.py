from importlib import resources

import pytest

from coupledfix.operators import estimate_contraction
from coupledfix.oracle import (
    FiniteInstance,
    cross_check,
    engineered_instance,
    enumerate_coupled_fixed_points,
    exact_contraction_constant,
)
from coupledfix.solver import PreconditionFailed, SolveConfig
from coupledfix.spaces import BadParams

CHAIN_3 = [[i <= j for j in range(3)] for i in range(3)]
DISCRETE_3 = [[0.0 if i == j else 1.0 for j in range(3)] for i in range(3)]


def _constant_instance():
    return FiniteInstance(
        labels=[0, 1, 2],
        distance=DISCRETE_3,
        leq=CHAIN_3,
        f=[[0] * 3 for _ in range(3)],
    )


def _projection_instance():
    # f(i, j) = i: every pair is coupled-fixed
    return FiniteInstance(
        labels=[0, 1, 2],
        distance=DISCRETE_3,
        leq=CHAIN_3,
        f=[[i] * 3 for i in range(3)],
    )


def _bundled_instance():
    path = resources.files("coupledfix.data") / "instance_k_half.json"
    return FiniteInstance.load(str(path))


def test_validation_rejects_malformed_tables():
    with pytest.raises(BadParams, match="distance table must be"):
        FiniteInstance(labels=[0, 1, 2], distance=[[0.0, 1.0], [1.0, 0.0]], leq=CHAIN_3, f=[[0] * 3] * 3)
    with pytest.raises(BadParams, match="negative"):
        FiniteInstance(
            labels=[0, 1],
            distance=[[0.0, -1.0], [-1.0, 0.0]],
            leq=[[True, True], [False, True]],
            f=[[0, 0], [0, 0]],
        )
    with pytest.raises(BadParams, match="asymmetric"):
        FiniteInstance(
            labels=[0, 1],
            distance=[[0.0, 1.0], [2.0, 0.0]],
            leq=[[True, True], [False, True]],
            f=[[0, 0], [0, 0]],
        )
    with pytest.raises(BadParams, match="out of range"):
        FiniteInstance(
            labels=[0, 1],
            distance=[[0.0, 1.0], [1.0, 0.0]],
            leq=[[True, True], [False, True]],
            f=[[0, 5], [0, 0]],
        )
    with pytest.raises(BadParams, match="label count"):
        FiniteInstance(labels=[], distance=[], leq=[], f=[])
    with pytest.raises(BadParams, match="label count"):
        n = 65
        FiniteInstance(
            labels=list(range(n)),
            distance=[[0.0] * n] * n,
            leq=[[i == j for j in range(n)] for i in range(n)],
            f=[[0] * n] * n,
        )


def test_validation_rejects_broken_orders():
    with pytest.raises(BadParams, match="reflexive"):
        FiniteInstance(
            labels=[0, 1],
            distance=[[0.0, 1.0], [1.0, 0.0]],
            leq=[[False, True], [False, True]],
            f=[[0, 0], [0, 0]],
        )
    with pytest.raises(BadParams, match="antisymmetric"):
        FiniteInstance(
            labels=[0, 1],
            distance=[[0.0, 1.0], [1.0, 0.0]],
            leq=[[True, True], [True, True]],
            f=[[0, 0], [0, 0]],
        )
    with pytest.raises(BadParams, match="transitive"):
        FiniteInstance(
            labels=[0, 1, 2],
            distance=DISCRETE_3,
            leq=[[True, True, False], [False, True, True], [False, False, True]],
            f=[[0] * 3] * 3,
        )


def test_enumeration_on_small_instances():
    assert enumerate_coupled_fixed_points(_constant_instance()) == [(0, 0)]
    proj = _projection_instance()
    assert len(enumerate_coupled_fixed_points(proj)) == 9
    # swap operator has no coupled fixed point at all
    swap = FiniteInstance(
        labels=[0, 1],
        distance=[[0.0, 1.0], [1.0, 0.0]],
        leq=[[True, False], [False, True]],
        f=[[1, 1], [0, 0]],
    )
    assert enumerate_coupled_fixed_points(swap) == []


def test_exact_constant_constant_operator():
    inst = _constant_instance()
    for form in ("bhaskar_plus", "max_form", "berinde"):
        assert exact_contraction_constant(inst, form) == 0.0


def test_exact_constant_projection_operator():
    inst = _projection_instance()
    # equal second coordinates leave the sum form a factor 2 to lose
    assert exact_contraction_constant(inst, "bhaskar_plus") == 2.0
    assert exact_contraction_constant(inst, "max_form") == 1.0
    assert exact_contraction_constant(inst, "berinde") == 1.0


def test_exact_constant_rejects_unknown_form():
    with pytest.raises(BadParams):
        exact_contraction_constant(_constant_instance(), "cubic")


def test_bundled_instance_constants():
    inst = _bundled_instance()
    assert enumerate_coupled_fixed_points(inst) == [(0, 0)]
    assert exact_contraction_constant(inst, "bhaskar_plus") == 0.5
    assert exact_contraction_constant(inst, "max_form") == 0.25
    assert exact_contraction_constant(inst, "berinde") == 0.25


def test_sampled_estimate_never_beats_enumeration():
    for seed in range(5):
        inst = engineered_instance(seed)
        k_exact = exact_contraction_constant(inst, "bhaskar_plus")
        est = estimate_contraction(
            inst.as_ordered_space(), inst.as_operator(), "bhaskar_plus", 2000, seed, declared_k=k_exact
        )
        assert est.k_hat <= k_exact + 1e-12


def test_cross_check_engineered_instances():
    cfg = SolveConfig(mode="bhaskar_plus", declared_k=0.9, hypothesis_samples=100)
    for seed in range(10):
        report = cross_check(engineered_instance(seed), cfg)
        assert report.agreed
        assert report.solver_status == "converged"
        assert tuple(report.candidate) in {tuple(p) for p in report.fixed_points}
        assert report.k_exact < 1.0
        assert report.k_hat <= report.k_exact + 1e-12


def test_cross_check_bundled_instance():
    report = cross_check(_bundled_instance(), SolveConfig(mode="bhaskar_plus", declared_k=0.5))
    assert report.agreed
    assert report.k_exact == 0.5
    assert report.candidate == (0, 0)
    out = report.to_json()
    assert out["agreed"] is True
    assert out["fixed_points"] == [[0, 0]]


def test_cross_check_refuses_expansive_instance():
    with pytest.raises(PreconditionFailed, match="not below 1"):
        cross_check(_projection_instance(), SolveConfig(declared_k=0.9))


def test_cross_check_refuses_without_admissible_start():
    # swap operator under the discrete order: nothing sits below its image
    swap = FiniteInstance(
        labels=[0, 1],
        distance=[[0.0, 1.0], [1.0, 0.0]],
        leq=[[True, False], [False, True]],
        f=[[1, 1], [0, 0]],
    )
    with pytest.raises(PreconditionFailed, match="no starting pair"):
        cross_check(swap, SolveConfig(declared_k=0.9))


def test_json_round_trip(tmp_path):
    inst = engineered_instance(3)
    again = FiniteInstance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    path = tmp_path / "inst.json"
    inst.save(path)
    assert FiniteInstance.load(path).to_json() == inst.to_json()


def test_engineered_instances_are_reproducible():
    a, b = engineered_instance(7), engineered_instance(7)
    assert a.to_json() == b.to_json()
    assert 5 <= a.n <= 12
    # the glued pair stays close; all other distances stay at least 1
    assert a.distance[0][1] < 0.5
    assert all(
        a.distance[i][j] >= 1.0
        for i in range(a.n)
        for j in range(a.n)
        if i != j and {i, j} != {0, 1}
    )
