"""Physical parameter set for the three-wheel omnidirectional robot.

All quantities are SI; angles in radians. The motor back-EMF constant is taken
equal to the torque constant, and all three wheels share one set of motor,
gear and wheel constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path


class ParameterError(ValueError):
    """Raised when a parameter set violates a physical bound."""


@dataclass(frozen=True)
class RobotParams:
    """Robot constants.

    Parameters
    ----------
    k_t : float
        Motor torque constant, N*m/A (also used as back-EMF constant).
    l : float
        Gear reduction ratio, wheel teeth over motor teeth.
    r : float
        Wheel radius, m.
    r_a : float
        Armature resistance, Ohm.
    d : float
        Distance from the robot centre to each wheel, m. Plays the role of the
        torque arm ``b`` as well.
    delta : float
        Wheel mount angle between the lateral axis and the vertical, rad.
    mass, inertia : float
        Robot mass (kg) and yaw inertia (kg*m^2).
    b_v, b_vn, b_omega : float
        Viscous friction on the longitudinal, lateral and yaw channels.
    """

    k_t: float
    l: float
    r: float
    r_a: float
    d: float
    delta: float = math.pi / 6
    mass: float = 1.0
    inertia: float = 1.0
    b_v: float = 0.0
    b_vn: float = 0.0
    b_omega: float = 0.0

    @property
    def b(self) -> float:
        """Torque arm; identical to ``d``."""
        return self.d


@dataclass(frozen=True)
class DriveConstants:
    """Lumped coefficients of the traction law ``f = gain*u - damping*v``."""

    gain: float
    damping: float


_POSITIVE = ("k_t", "l", "r", "r_a", "d", "mass", "inertia")
_NONNEGATIVE = ("b_v", "b_vn", "b_omega")
FIELD_NAMES = tuple(f.name for f in fields(RobotParams))


def validate(params: RobotParams) -> RobotParams:
    """Check every bound and return ``params`` unchanged.

    Raises
    ------
    ParameterError
        Naming the first field that violates its bound.
    """
    for name in FIELD_NAMES:
        value = getattr(params, name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParameterError(f"{name} must be a number")
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite")
    for name in _POSITIVE:
        if not getattr(params, name) > 0:
            raise ParameterError(f"{name} must be > 0")
    for name in _NONNEGATIVE:
        if not getattr(params, name) >= 0:
            raise ParameterError(f"{name} must be >= 0")
    if not 0 < params.delta < math.pi / 2:
        raise ParameterError("delta must lie in (0, pi/2)")
    return params


def drive_constants(params: RobotParams) -> DriveConstants:
    k = params.k_t * params.l / params.r
    gain = k / params.r_a
    return DriveConstants(gain=gain, damping=gain * k)


def params_from_dict(data: dict) -> RobotParams:
    """Build validated params from a flat mapping; unknown or missing keys fail."""
    if not isinstance(data, dict):
        raise ParameterError("parameter file must hold a JSON object")
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise ParameterError(f"unknown parameter(s): {', '.join(unknown)}")
    missing = [n for n in FIELD_NAMES if n not in data]
    if missing:
        raise ParameterError(f"missing parameter(s): {', '.join(missing)}")
    return validate(RobotParams(**data))


def load_params(path: str | Path) -> RobotParams:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return params_from_dict(data)


def params_to_dict(params: RobotParams) -> dict:
    return asdict(params)


def unit_params(**overrides: float) -> RobotParams:
    """All constants 1, frictions 0, delta = pi/6; handy for hand checks."""
    base = dict(k_t=1.0, l=1.0, r=1.0, r_a=1.0, d=1.0, delta=math.pi / 6,
                mass=1.0, inertia=1.0, b_v=0.0, b_vn=0.0, b_omega=0.0)
    base.update(overrides)
    return validate(RobotParams(**base))
