"""Body-frame, wheel-space and world-frame velocity maps.

State ordering everywhere is ``(v, v_n, omega)``: longitudinal speed, lateral
speed and yaw rate in the body frame.

Wheel 1 is mounted on the lateral axis and sees ``v1 = -v_n`` only; wheels 2
and 3 sit symmetrically at angle ``delta`` and also pick up ``omega * d``.
The wheel-1 row carries no ``omega * d`` term even though that wheel is at
distance ``d`` from the centre; the downstream torque algebra depends on it.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .params import RobotParams


class BodyVelocity(NamedTuple):
    v: float = 0.0
    v_n: float = 0.0
    omega: float = 0.0


class WheelSpeeds(NamedTuple):
    """Translational speed of each wheel along its drive direction, m/s."""

    v1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0


class Pose(NamedTuple):
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0


def projection_matrix(delta: float, d: float) -> np.ndarray:
    """Matrix mapping ``(v, v_n, omega)`` to wheel speeds ``(v1, v2, v3)``."""
    c, s = math.cos(delta), math.sin(delta)
    return np.array([[0.0, -1.0, 0.0],
                     [c, s, d],
                     [-c, s, d]])


def inverse_projection_matrix(delta: float, d: float) -> np.ndarray:
    """Analytic inverse of :func:`projection_matrix`.

    ``det = 2 d cos(delta)``, nonzero for any admissible mount geometry.
    """
    c, s = math.cos(delta), math.sin(delta)
    return np.array([[0.0, 0.5 / c, -0.5 / c],
                     [-1.0, 0.0, 0.0],
                     [s / d, 0.5 / d, 0.5 / d]])


def body_to_wheels(vel, params: RobotParams) -> WheelSpeeds:
    v, vn, w = vel
    c, s, d = math.cos(params.delta), math.sin(params.delta), params.d
    return WheelSpeeds(-vn, v * c + vn * s + w * d, -v * c + vn * s + w * d)


def wheels_to_body(ws, params: RobotParams) -> BodyVelocity:
    v1, v2, v3 = ws
    c, s, d = math.cos(params.delta), math.sin(params.delta), params.d
    return BodyVelocity((v2 - v3) / (2.0 * c), -v1, (v2 + v3 + 2.0 * s * v1) / (2.0 * d))


def rotation(theta: float) -> np.ndarray:
    """Counterclockwise planar rotation taking body axes into the world frame."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def body_to_world(pose, vel) -> tuple[float, float, float]:
    """World-frame rates ``(xdot, ydot, thetadot)``.

    ``theta`` is measured counterclockwise from the world x-axis to the body
    ``v`` axis.
    """
    theta = pose[2]
    v, vn, w = vel
    c, s = math.cos(theta), math.sin(theta)
    return (c * v - s * vn, s * v + c * vn, w)
