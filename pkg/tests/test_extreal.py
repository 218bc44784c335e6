import math
import random

import pytest

from coupledfix.extreal import (
    INF,
    NEG_INF,
    IndeterminateForm,
    as_extreal,
    ext_abs,
    ext_add,
    ext_scale,
    ext_sub,
    format_extreal,
    parse_extreal,
)


def test_add_absorbs_finite():
    assert ext_add(INF, 5.0) == INF
    assert ext_add(-7.0, NEG_INF) == NEG_INF


def test_add_finite():
    assert ext_add(2.0, 3.0) == 5.0


def test_add_opposite_infinities_is_indeterminate():
    with pytest.raises(IndeterminateForm):
        ext_add(INF, NEG_INF)
    with pytest.raises(IndeterminateForm):
        ext_add(NEG_INF, INF)


def test_sub_opposite_infinities_defined():
    # inf - (-inf) is inf + inf, which is fine
    assert ext_sub(INF, NEG_INF) == INF
    assert ext_sub(NEG_INF, INF) == NEG_INF


def test_sub_finite():
    assert ext_sub(3.0, 5.0) == -2.0


def test_sub_same_signed_infinities_is_indeterminate():
    with pytest.raises(IndeterminateForm):
        ext_sub(INF, INF)
    with pytest.raises(IndeterminateForm):
        ext_sub(NEG_INF, NEG_INF)


def test_scale():
    assert ext_scale(INF, 1 / 3) == INF
    assert ext_scale(NEG_INF, 1 / 3) == NEG_INF
    assert ext_scale(INF, -2.0) == NEG_INF
    assert ext_scale(-6.0, 1 / 3) == -2.0


def test_scale_zero_times_infinity_is_indeterminate():
    with pytest.raises(IndeterminateForm):
        ext_scale(INF, 0.0)
    with pytest.raises(IndeterminateForm):
        ext_scale(NEG_INF, 0.0)


def test_scale_factor_must_be_finite():
    with pytest.raises(ValueError):
        ext_scale(1.0, INF)
    with pytest.raises(ValueError):
        ext_scale(1.0, float("nan"))


def test_abs():
    assert ext_abs(NEG_INF) == INF
    assert ext_abs(INF) == INF
    assert ext_abs(-3.0) == 3.0
    assert ext_abs(0.0) == 0.0


def test_abs_nonnegative_and_zero_only_at_zero():
    rng = random.Random(11)
    for _ in range(500):
        a = rng.choice((INF, NEG_INF, rng.uniform(-1e6, 1e6)))
        v = ext_abs(a)
        assert v >= 0.0
        assert (v == 0.0) == (a == 0.0)


def test_add_commutative_on_defined_inputs():
    rng = random.Random(7)
    pool = [INF, NEG_INF, 0.0, 1.5, -2.25, 1e300, -1e300]
    for _ in range(500):
        a = rng.choice(pool) if rng.random() < 0.5 else rng.uniform(-50, 50)
        b = rng.choice(pool) if rng.random() < 0.5 else rng.uniform(-50, 50)
        try:
            left = ext_add(a, b)
        except IndeterminateForm:
            with pytest.raises(IndeterminateForm):
                ext_add(b, a)
            continue
        assert left == ext_add(b, a)


def test_finite_arithmetic_matches_floats():
    rng = random.Random(3)
    for _ in range(300):
        a, b = rng.uniform(-1e8, 1e8), rng.uniform(-1e8, 1e8)
        assert ext_add(a, b) == a + b
        assert ext_sub(a, b) == a - b
        assert ext_scale(a, b) == b * a


def test_as_extreal_rejects_nan():
    with pytest.raises(ValueError):
        as_extreal(float("nan"))
    assert as_extreal("2.5") == 2.5
    assert as_extreal(INF) == INF


def test_format_parse_round_trip():
    assert format_extreal(INF) == "inf"
    assert format_extreal(NEG_INF) == "-inf"
    values = [0.0, -0.0, 0.1, -1 / 3, 1e-300, 2.5e17, math.pi, 5 / 3]
    for v in values:
        text = format_extreal(v)
        back = parse_extreal(text)
        assert back == v
        assert math.copysign(1.0, back) == math.copysign(1.0, v)
    assert parse_extreal("inf") == INF
    assert parse_extreal("-inf") == NEG_INF
    with pytest.raises(ValueError):
        parse_extreal("nan")
