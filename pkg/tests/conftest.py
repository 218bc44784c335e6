import pytest

import coupledfix as cf


@pytest.fixture(scope="session")
def disloc():
    return cf.ordered_space("dislocated_abs")


@pytest.fixture(scope="session")
def reals():
    return cf.ordered_space("standard_real")


@pytest.fixture(scope="session")
def mix_third():
    # F(x, y) = (x - y) / 3, the operator of the bundled example
    return cf.catalog_operator("linear_mix", {"a": 1 / 3, "b": -1 / 3})


@pytest.fixture()
def cfg23():
    return cf.SolveConfig(mode="bhaskar_plus", declared_k=2 / 3)


@pytest.fixture(scope="session")
def bundled_run(disloc, mix_third):
    """Converged solve of the bundled example from (-3, 2), shared read-only."""
    cfg = cf.SolveConfig(mode="bhaskar_plus", declared_k=2 / 3)
    rep = cf.solve(disloc, mix_third, -3.0, 2.0, cfg)
    assert rep.status == "converged"
    return rep
