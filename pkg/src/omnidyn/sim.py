"""Time integration of body velocity and world pose under piecewise-constant voltages."""

from __future__ import annotations

import bisect
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .actuation import MotorInput, Variant, closed_form_wrench, saturate
from .kinematics import BodyVelocity, Pose
from .params import RobotParams
from .statespace import StateSpace, build_state_space

CSV_HEADER = "t,x,y,theta,v,vn,omega,u1,u2,u3,Fv,Fvn,Gamma"
INTEGRATORS = ("rk4", "euler")


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_final: float = 10.0
    integrator: str = "rk4"
    variant: Variant = Variant.CORRECT
    record_stride: int = 10
    torque_scale: float = 1.0
    u_max: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be > 0")
        if not self.t_final >= self.dt:
            raise ValueError("t_final must be >= dt")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if isinstance(self.record_stride, bool) or not isinstance(self.record_stride, int) \
                or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")
        if self.u_max is not None and not self.u_max > 0:
            raise ValueError("u_max must be > 0")
        self.n_steps  # validates the grid

    @property
    def n_steps(self) -> int:
        n = int(round(self.t_final / self.dt))
        if abs(n * self.dt - self.t_final) > 1e-9 * self.t_final:
            raise ValueError("t_final must be an integer multiple of dt")
        return n


class InputSchedule:
    """Piecewise-constant voltages; segment ``i`` holds from ``starts[i]`` until the next start."""

    def __init__(self, starts: Sequence[float], values: Sequence[Sequence[float]]):
        if len(starts) == 0 or len(starts) != len(values):
            raise ValueError("schedule needs one voltage triple per segment")
        if starts[0] != 0:
            raise ValueError("schedule must start at t = 0 (gap before first segment)")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("schedule segments must be strictly ordered")
        self.starts = [float(t) for t in starts]
        self.values = [MotorInput(*map(float, u)) for u in values]
        for u in self.values:
            if not all(math.isfinite(x) for x in u):
                raise ValueError("schedule voltages must be finite")

    @classmethod
    def constant(cls, u) -> InputSchedule:
        return cls([0.0], [u])

    def __call__(self, t: float) -> MotorInput:
        # Tolerance keeps grid times that land on a boundary in the new segment.
        i = bisect.bisect_right(self.starts, t + 1e-9 * max(1.0, abs(t))) - 1
        return self.values[max(i, 0)]


@dataclass
class Trajectory:
    t: np.ndarray
    pose: np.ndarray
    vel: np.ndarray
    u: np.ndarray
    wrench: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def states(self) -> np.ndarray:
        """Columns ``v, v_n, omega, x, y, theta``."""
        return np.hstack([self.vel, self.pose])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        table = np.column_stack([self.t, self.pose, self.vel, self.u, self.wrench])
        for row in table:
            buf.write(",".join(format(float(x), ".17g") for x in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> Trajectory:
        lines = text.strip("\n").split("\n")
        if lines[0] != CSV_HEADER:
            raise ValueError("unexpected trajectory header")
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).reshape(-1, 13)
        return cls(data[:, 0], data[:, 1:4], data[:, 4:7], data[:, 7:10], data[:, 10:13])


def _rhs(ss: StateSpace, u: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    a, bu = ss.a, ss.b_mat @ u

    def f(z: np.ndarray) -> np.ndarray:
        vel = z[:3]
        c, s = np.cos(z[5]), np.sin(z[5])
        out = np.empty(6)
        out[:3] = a @ vel + bu
        out[3] = c * vel[0] - s * vel[1]
        out[4] = s * vel[0] + c * vel[1]
        out[5] = vel[2]
        return out

    return f


def _advance(z: np.ndarray, u: np.ndarray, ss: StateSpace, dt: float, integrator: str) -> np.ndarray:
    f = _rhs(ss, u)
    with np.errstate(over="ignore", invalid="ignore"):
        if integrator == "euler":
            out = z + dt * f(z)
        else:
            k1 = f(z)
            k2 = f(z + 0.5 * dt * k1)
            k3 = f(z + 0.5 * dt * k2)
            k4 = f(z + dt * k3)
            out = z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise SimulationError(f"non-finite state after step: {out.tolist()}; check parameters and dt")
    return out


def step(vel, pose, u, params: RobotParams, cfg: SimConfig,
         ss: StateSpace | None = None) -> tuple[BodyVelocity, Pose]:
    """Advance velocity and pose by one ``cfg.dt`` with ``u`` held constant."""
    if ss is None:
        ss = build_state_space(params, cfg.variant, cfg.torque_scale)
    z = np.concatenate([np.asarray(vel, dtype=float), np.asarray(pose, dtype=float)])
    out = _advance(z, np.asarray(u, dtype=float), ss, cfg.dt, cfg.integrator)
    return BodyVelocity(*out[:3].tolist()), Pose(*out[3:].tolist())


def simulate(x0, u_schedule: Callable[[float], Sequence[float]], params: RobotParams,
             cfg: SimConfig, pose0=None) -> Trajectory:
    """Integrate from ``x0`` over ``[0, cfg.t_final]``.

    Parameters
    ----------
    x0 : sequence of 3 floats
        Initial ``(v, v_n, omega)``.
    u_schedule : callable
        Maps time to a voltage triple; sampled at the start of every step.
    pose0 : sequence of 3 floats, optional
        Initial ``(x, y, theta)``; zero by default.
    """
    ss = build_state_space(params, cfg.variant, cfg.torque_scale)
    n = cfg.n_steps
    z = np.concatenate([np.asarray(x0, dtype=float),
                        np.zeros(3) if pose0 is None else np.asarray(pose0, dtype=float)])
    rec_t, rec_z, rec_u, rec_w = [], [], [], []
    for k in range(n + 1):
        t = k * cfg.dt
        u = np.array(saturate(u_schedule(t), cfg.u_max))
        if k % cfg.record_stride == 0:
            rec_t.append(t)
            rec_z.append(z.copy())
            rec_u.append(u)
            rec_w.append(closed_form_wrench(u, z[:3], params, cfg.variant, cfg.torque_scale))
        if k < n:
            z = _advance(z, u, ss, cfg.dt, cfg.integrator)
    zs = np.array(rec_z)
    return Trajectory(np.array(rec_t), zs[:, 3:], zs[:, :3], np.array(rec_u),
                      np.array(rec_w, dtype=float))

