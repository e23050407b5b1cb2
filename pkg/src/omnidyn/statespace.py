"""Continuous linear model ``xdot = A x + B u`` and its zero-order-hold discretization.

The state is ``(v, v_n, omega)`` and the input is the three armature voltages.
No Coriolis terms appear; the model is the linear body-frame one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .actuation import Variant, closed_form_wrench, velocity_coefficients
from .params import RobotParams, drive_constants


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateSpace:
    a: np.ndarray
    b_mat: np.ndarray
    variant: Variant = Variant.CORRECT
    torque_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "b_mat", _frozen(self.b_mat))
        object.__setattr__(self, "variant", Variant(self.variant))
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b_mat))):
            raise ValueError("state-space matrices must be finite")

    def derivative(self, x, u) -> np.ndarray:
        return self.a @ np.asarray(x, dtype=float) + self.b_mat @ np.asarray(u, dtype=float)


@dataclass(frozen=True)
class DiscreteStateSpace:
    ad: np.ndarray
    bd: np.ndarray
    dt: float
    variant: Variant = field(default=Variant.CORRECT)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        object.__setattr__(self, "ad", _frozen(self.ad))
        object.__setattr__(self, "bd", _frozen(self.bd))

    def propagate(self, x, u) -> np.ndarray:
        return self.ad @ np.asarray(x, dtype=float) + self.bd @ np.asarray(u, dtype=float)


def _inertia_scale(params: RobotParams) -> np.ndarray:
    return np.array([params.mass, params.mass, params.inertia])


def build_a(params: RobotParams, variant: Variant = Variant.CORRECT,
            torque_scale: float = 1.0) -> np.ndarray:
    """State matrix.

    At the 30 degree mount the result is upper triangular with
    ``a[1, 2] = -damping * d / M`` as the only off-diagonal entry; the
    erroneous variant zeroes that entry and scales the damping part of
    ``a[2, 2]`` by ``torque_scale``.
    """
    k = drive_constants(params).damping
    co = velocity_coefficients(params, variant, torque_scale)
    m, inertia = params.mass, params.inertia
    a = np.zeros((3, 3))
    a[0, 0] = -(co["fv_v"] * k + params.b_v) / m
    a[1, 1] = -(co["fvn_vn"] * k + params.b_vn) / m
    a[1, 2] = -co["fvn_omega"] * k / m
    a[2, 1] = -co["gamma_vn"] * k / inertia
    a[2, 2] = -(co["gamma_omega"] * k + params.b_omega) / inertia
    return a + 0.0  # normalise -0.0 entries


def build_b(params: RobotParams) -> np.ndarray:
    g = drive_constants(params).gain
    c, s = math.cos(params.delta), math.sin(params.delta)
    rows = np.array([[0.0, g * c, -g * c],
                     [-g, g * s, g * s],
                     [g * params.b, g * params.b, g * params.b]])
    return rows / _inertia_scale(params)[:, None]


def build_state_space(params: RobotParams, variant: Variant = Variant.CORRECT,
                      torque_scale: float = 1.0) -> StateSpace:
    return StateSpace(build_a(params, variant, torque_scale), build_b(params),
                      Variant(variant), torque_scale)


def acceleration(u, x, params: RobotParams, variant: Variant = Variant.CORRECT,
                 torque_scale: float = 1.0) -> np.ndarray:
    """Body accelerations from the wrench, viscous friction subtracted."""
    wrench = np.array(closed_form_wrench(u, x, params, variant, torque_scale))
    friction = np.array([params.b_v, params.b_vn, params.b_omega]) * np.asarray(x, dtype=float)
    return (wrench - friction) / _inertia_scale(params)


def linearization_oracle(params: RobotParams, variant: Variant = Variant.CORRECT,
                         torque_scale: float = 1.0, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of :func:`acceleration` at zero state and input."""
    jac = np.zeros((3, 3))
    u0 = np.zeros(3)
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        fp = acceleration(u0, e, params, variant, torque_scale)
        fm = acceleration(u0, -e, params, variant, torque_scale)
        jac[:, j] = (fp - fm) / (2.0 * h)
    return jac


def expm(m: np.ndarray, rtol: float = 1e-16) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The series stops once the newest term is below ``rtol`` times the running
    sum (both in the 1-norm).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    norm = np.abs(m).sum(axis=0).max() if n else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    x = m / 2.0 ** squarings
    total = np.eye(n)
    term = np.eye(n)
    for k in range(1, 60):
        term = term @ x / k
        total = total + term
        if np.abs(term).sum(axis=0).max() <= rtol * np.abs(total).sum(axis=0).max():
            break
    for _ in range(squarings):
        total = total @ total
    return total


def discretize(ss: StateSpace, dt: float) -> DiscreteStateSpace:
    """Zero-order-hold discretization via the augmented matrix exponential."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    n, m = ss.b_mat.shape
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = ss.a
    aug[:n, n:] = ss.b_mat
    e = expm(aug * dt)
    return DiscreteStateSpace(e[:n, :n], e[:n, n:], dt, ss.variant)
