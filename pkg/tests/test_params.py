import json
import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from omnidyn.params import (FIELD_NAMES, ParameterError, RobotParams, drive_constants,
                            load_params, params_from_dict, params_to_dict, unit_params, validate)

positive = st.floats(min_value=1e-3, max_value=1e3)


def test_all_ones_is_valid():
    p = RobotParams(1, 1, 1, 1, 1, math.pi / 6, 1, 1, 1, 1, 1)
    assert validate(p) is p


@pytest.mark.parametrize("field, value, message", [
    ("r", 0.0, "r must be > 0"),
    ("k_t", -1.0, "k_t must be > 0"),
    ("mass", 0.0, "mass must be > 0"),
    ("b_vn", -0.1, "b_vn must be >= 0"),
    ("delta", math.pi / 2, "delta must lie in (0, pi/2)"),
    ("delta", 0.0, "delta must lie in (0, pi/2)"),
    ("inertia", math.nan, "inertia must be finite"),
])
def test_violations_name_the_field(field, value, message):
    p = replace(unit_params(), **{field: value})
    with pytest.raises(ParameterError, match=message.replace("(", r"\(").replace(")", r"\)")):
        validate(p)


def test_first_violation_reported():
    p = replace(unit_params(), l=0.0, r=0.0)
    with pytest.raises(ParameterError, match="^l must"):
        validate(p)


def test_zero_friction_allowed():
    validate(replace(unit_params(), b_v=0.0, b_vn=0.0, b_omega=0.0))


def test_drive_constants_unit():
    dc = drive_constants(unit_params())
    assert (dc.gain, dc.damping) == (1.0, 1.0)


def test_drive_constants_hand_values():
    # 2*3/(1*2) = 3 and 4*9/(1*2) = 18
    dc = drive_constants(unit_params(k_t=2.0, l=3.0, r=1.0, r_a=2.0))
    assert dc.gain == pytest.approx(3.0, rel=1e-15)
    assert dc.damping == pytest.approx(18.0, rel=1e-15)


@given(positive, positive, positive, positive)
def test_damping_is_gain_times_back_emf_factor(k_t, l, r, r_a):
    p = unit_params(k_t=k_t, l=l, r=r, r_a=r_a)
    dc = drive_constants(p)
    assert dc.gain > 0 and dc.damping > 0
    assert dc.damping == pytest.approx(dc.gain * k_t * l / r, rel=1e-14)


@given(positive, positive, positive, positive)
def test_doubling_k_t_scales_gain_and_damping(k_t, l, r, r_a):
    a = drive_constants(unit_params(k_t=k_t, l=l, r=r, r_a=r_a))
    b = drive_constants(unit_params(k_t=2 * k_t, l=l, r=r, r_a=r_a))
    assert b.gain == pytest.approx(2 * a.gain, rel=1e-14)
    assert b.damping == pytest.approx(4 * a.damping, rel=1e-14)


def test_validate_idempotent():
    p = unit_params(d=0.3)
    assert validate(validate(p)) == p


def test_b_is_d():
    assert unit_params(d=0.37).b == 0.37


def test_params_file_roundtrip(tmp_path):
    p = unit_params(k_t=0.2, d=0.15, b_v=0.1)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(params_to_dict(p)))
    assert load_params(path) == p


def test_unknown_key_rejected():
    data = params_to_dict(unit_params())
    data["k_tt"] = 1.0
    with pytest.raises(ParameterError, match="unknown parameter"):
        params_from_dict(data)


def test_missing_key_rejected():
    data = params_to_dict(unit_params())
    del data["inertia"]
    with pytest.raises(ParameterError, match="missing parameter"):
        params_from_dict(data)


def test_non_numeric_rejected():
    data = params_to_dict(unit_params())
    data["r"] = "0.05"
    with pytest.raises(ParameterError, match="r must be a number"):
        params_from_dict(data)


def test_field_names_are_snake_case():
    assert FIELD_NAMES == ("k_t", "l", "r", "r_a", "d", "delta", "mass", "inertia",
                           "b_v", "b_vn", "b_omega")
