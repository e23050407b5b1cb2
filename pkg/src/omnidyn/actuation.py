"""DC motor electrics, wheel traction and the body-frame wrench.

Armature inductance is neglected, so the motor current is an algebraic
function of voltage and wheel speed and there is no current state.

The wrench is available along two independent routes:

* :func:`wrench_from_wheel_forces` applied to :func:`wheel_forces`, i.e. per
  wheel traction forces summed through the mount geometry;
* :func:`closed_form_wrench`, the collected expressions in body velocity.

For ``delta = pi/6`` the closed form collapses to the familiar
``-3/2 * damping * v``, ``-damping * (3/2 v_n + omega d)`` and
``-2 * damping * omega * d`` velocity terms. At other mount angles the
coefficients keep their ``delta`` dependence so that both routes agree.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from .kinematics import body_to_wheels
from .params import RobotParams, drive_constants

_THIRTY_DEG = math.pi / 6


class Variant(str, enum.Enum):
    """Which dynamics model to use.

    ``ERRONEOUS`` drops the yaw-rate coupling in the lateral force and scales
    the yaw-rate damping in the torque by a configurable factor.
    """

    CORRECT = "correct"
    ERRONEOUS = "erroneous"


class MotorInput(NamedTuple):
    u1: float = 0.0
    u2: float = 0.0
    u3: float = 0.0


class WheelForces(NamedTuple):
    f1: float = 0.0
    f2: float = 0.0
    f3: float = 0.0


class Wrench(NamedTuple):
    f_v: float = 0.0
    f_vn: float = 0.0
    gamma: float = 0.0


def motor_current(u: float, wheel_speed: float, params: RobotParams) -> float:
    """Armature current with back-EMF ``K_t * l * v / r``."""
    back_emf = params.k_t * params.l * wheel_speed / params.r
    return (u - back_emf) / params.r_a


def motor_torque(current: float, params: RobotParams) -> float:
    return params.k_t * current


def wheel_torque(motor_torque: float, params: RobotParams) -> float:
    return motor_torque * params.l


def force_from_torque(wheel_torque: float, params: RobotParams) -> float:
    return wheel_torque / params.r


def traction_force(u: float, wheel_speed: float, params: RobotParams) -> float:
    dc = drive_constants(params)
    return dc.gain * u - dc.damping * wheel_speed


def saturate(u, u_max: float | None) -> MotorInput:
    """Clip each voltage to ``[-u_max, u_max]``; ``None`` disables the bound."""
    if u_max is None:
        return MotorInput(*u)
    if not u_max > 0:
        raise ValueError("u_max must be > 0")
    return MotorInput(*(min(max(x, -u_max), u_max) for x in u))


def wheel_forces(u, vel, params: RobotParams) -> WheelForces:
    ws = body_to_wheels(vel, params)
    return WheelForces(*(traction_force(ui, wi, params) for ui, wi in zip(u, ws)))


def wheel_forces_explicit(u, vel, params: RobotParams) -> WheelForces:
    """Per-wheel forces written out in body velocity terms.

    Independent of :func:`body_to_wheels`; used as a cross-check.
    """
    dc = drive_constants(params)
    g, k = dc.gain, dc.damping
    u1, u2, u3 = u
    v, vn, w = vel
    c, s, d = math.cos(params.delta), math.sin(params.delta), params.d
    return WheelForces(
        g * u1 + k * vn,
        g * u2 - k * (v * c + vn * s + w * d),
        g * u3 - k * (-v * c + vn * s + w * d),
    )


def wrench_from_wheel_forces(f, params: RobotParams) -> Wrench:
    f1, f2, f3 = f
    c, s = math.cos(params.delta), math.sin(params.delta)
    return Wrench(c * (f2 - f3), -f1 + s * (f2 + f3), params.b * (f1 + f2 + f3))


def velocity_coefficients(params: RobotParams, variant: Variant = Variant.CORRECT,
                          torque_scale: float = 1.0) -> dict[str, float]:
    """Damping multipliers of the closed-form wrench.

    Returned keys, each to be multiplied by ``damping``:
    ``fv_v``, ``fvn_vn``, ``fvn_omega``, ``gamma_vn``, ``gamma_omega``
    (the torque entries already include the arm ``b``).
    """
    # Offsets from the 30 degree mount written as products, so the default
    # geometry reproduces 3/2, 1 and 0 exactly instead of within rounding.
    off = params.delta - _THIRTY_DEG
    mid = params.delta + _THIRTY_DEG
    two_sin_minus_one = 4.0 * math.cos(mid / 2.0) * math.sin(off / 2.0)
    cos2_minus_half = -2.0 * math.sin(mid) * math.sin(off)
    d, b = params.d, params.b
    coeffs = {
        "fv_v": 1.5 + cos2_minus_half,     # 2 cos^2(delta)
        "fvn_vn": 1.5 - cos2_minus_half,   # 1 + 2 sin^2(delta)
        "fvn_omega": (1.0 + two_sin_minus_one) * d,
        "gamma_vn": b * two_sin_minus_one,
        "gamma_omega": 2.0 * b * d,
    }
    variant = Variant(variant)
    if variant is Variant.ERRONEOUS:
        coeffs["fvn_omega"] = 0.0
        coeffs["gamma_omega"] *= torque_scale
    return coeffs


def closed_form_wrench(u, vel, params: RobotParams, variant: Variant = Variant.CORRECT,
                       torque_scale: float = 1.0) -> Wrench:
    """Body wrench ``(F_v, F_vn, Gamma)`` from voltages and body velocity.

    Parameters
    ----------
    u : sequence of 3 floats
        Armature voltages.
    vel : sequence of 3 floats
        ``(v, v_n, omega)``.
    variant : Variant
        ``ERRONEOUS`` removes the ``omega`` term from ``F_vn`` and multiplies
        the ``omega`` term of ``Gamma`` by ``torque_scale``.
    """
    dc = drive_constants(params)
    g, k = dc.gain, dc.damping
    co = velocity_coefficients(params, variant, torque_scale)
    u1, u2, u3 = u
    v, vn, w = vel
    c, s, b = math.cos(params.delta), math.sin(params.delta), params.b
    f_v = c * g * (u2 - u3) - k * co["fv_v"] * v
    f_vn = g * (-u1 + s * (u2 + u3)) - k * (co["fvn_vn"] * vn + co["fvn_omega"] * w)
    gamma = b * g * (u1 + u2 + u3) - k * (co["gamma_vn"] * vn + co["gamma_omega"] * w)
    return Wrench(f_v, f_vn, gamma)


def wrench_array(u, vel, params: RobotParams, variant: Variant = Variant.CORRECT,
                 torque_scale: float = 1.0) -> np.ndarray:
    return np.array(closed_form_wrench(u, vel, params, variant, torque_scale))
