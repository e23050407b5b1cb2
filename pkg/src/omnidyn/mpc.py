"""Linear MPC for body-velocity tracking.

The prediction model is eliminated into a dense (condensed) QP in the stacked
input sequence, which is solved under box bounds by projected gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .actuation import Variant, closed_form_wrench
from .params import RobotParams
from .sim import Trajectory, _advance
from .statespace import DiscreteStateSpace, build_state_space, discretize


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MpcConfig:
    horizon: int = 10
    dt: float = 0.05
    q: tuple[float, float, float] = (100.0, 100.0, 100.0)
    r: tuple[float, float, float] = (1e-3, 1e-3, 1e-3)
    u_max: float = 12.0
    tol: float = 1e-8
    max_iter: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        if isinstance(self.horizon, bool) or not isinstance(self.horizon, int) or self.horizon < 1:
            raise ValueError("horizon must be an integer >= 1")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if len(self.q) != 3 or any(not (x >= 0 and math.isfinite(x)) for x in self.q):
            raise ValueError("q must hold 3 nonnegative weights")
        if len(self.r) != 3 or any(not (x > 0 and math.isfinite(x)) for x in self.r):
            raise ValueError("r must hold 3 positive weights")
        if not self.u_max >= 0:
            raise ValueError("u_max must be >= 0")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not self.max_iter >= 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class QpProblem:
    """Minimise ``u' H u + 2 g' u + c`` subject to ``|u_i| <= u_max``."""

    h: np.ndarray
    g: np.ndarray
    u_max: float
    c: float = 0.0

    def cost(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(u @ self.h @ u + 2.0 * self.g @ u + self.c)


@dataclass
class QpSolution:
    u: np.ndarray
    iterations: int
    residual: float
    converged: bool
    costs: list[float] = field(default_factory=list)


def prediction_matrices(ds: DiscreteStateSpace, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked ``x_1..x_N = Phi x0 + S u`` for ``u = (u_0..u_{N-1})``."""
    nx, nu = ds.bd.shape
    powers = [np.eye(nx)]
    for _ in range(horizon):
        powers.append(powers[-1] @ ds.ad)
    phi = np.vstack(powers[1:])
    s = np.zeros((nx * horizon, nu * horizon))
    for k in range(horizon):
        for j in range(k + 1):
            s[k * nx:(k + 1) * nx, j * nu:(j + 1) * nu] = powers[k - j] @ ds.bd
    return phi, s


def condense(ds: DiscreteStateSpace, cfg: MpcConfig, x0, reference) -> QpProblem:
    """Build the QP for one receding-horizon step.

    ``reference`` holds the targets for ``x_1 .. x_N`` as an ``(N, 3)`` array.
    """
    n = cfg.horizon
    x0 = np.asarray(x0, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if x0.shape != (3,):
        raise ValueError("x0 must have 3 entries")
    if ref.ndim != 2 or ref.shape[1] != 3 or ref.shape[0] < n:
        raise ValueError(f"reference must be an array of shape ({n}, 3)")
    ref = ref[:n].ravel()
    phi, s = prediction_matrices(ds, n)
    qbar = np.tile(cfg.q, n)
    rbar = np.tile(cfg.r, n)
    free = phi @ x0 - ref
    sq = s.T * qbar
    h = sq @ s + np.diag(rbar)
    h = 0.5 * (h + h.T)
    return QpProblem(h, sq @ free, cfg.u_max, float(free @ (qbar * free)))


def solve_qp(qp: QpProblem, cfg: MpcConfig, u0=None, record_costs: bool = False) -> QpSolution:
    """Projected gradient with fixed step ``1/L``, ``L`` the max absolute row sum of ``H``.

    Stops when ``max|u - P(u - grad)|`` falls below ``cfg.tol``. A solution that
    hits ``cfg.max_iter`` is returned with ``converged=False`` and its residual.
    """
    h, g, ub = qp.h, qp.g, qp.u_max
    lipschitz = float(np.abs(h).sum(axis=1).max())
    u = np.zeros_like(g) if u0 is None else np.clip(np.asarray(u0, dtype=float), -ub, ub)
    costs = [qp.cost(u)] if record_costs else []
    residual = math.inf
    it = 0
    while True:
        grad = h @ u + g
        residual = float(np.abs(u - np.clip(u - grad, -ub, ub)).max()) if u.size else 0.0
        if residual < cfg.tol or it >= cfg.max_iter or lipschitz == 0.0:
            break
        u = np.clip(u - grad / lipschitz, -ub, ub)
        it += 1
        if record_costs:
            costs.append(qp.cost(u))
    return QpSolution(u, it, residual, residual < cfg.tol, costs)


@dataclass(frozen=True)
class MpcScenario:
    """Tracking task: a reference for ``(v, v_n, omega)`` as a function of time."""

    reference: Callable[[float], Sequence[float]]
    t_final: float
    x0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    pose0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    sim_dt: float = 1e-3


@dataclass
class ClosedLoopResult:
    trajectory: Trajectory
    reference: np.ndarray
    metrics: dict[str, dict[str, float]]
    iterations: list[int]
    worst_residual: float

    def metrics_dict(self) -> dict:
        out = {k: dict(v) for k, v in self.metrics.items()}
        out["solver"] = {
            "iterations": list(self.iterations),
            "max_iterations": max(self.iterations) if self.iterations else 0,
            "worst_residual": self.worst_residual,
        }
        return out


def _substeps(cfg: MpcConfig, sim_dt: float) -> int:
    m = int(round(cfg.dt / sim_dt))
    if m < 1 or abs(m * sim_dt - cfg.dt) > 1e-9 * cfg.dt:
        raise ValueError("controller dt must be an integer multiple of the simulation dt")
    return m


def closed_loop(plant_variant: Variant, controller_variant: Variant, scenario: MpcScenario,
                params: RobotParams, cfg: MpcConfig, torque_scale: float = 1.0) -> ClosedLoopResult:
    """Receding-horizon tracking with possibly mismatched controller and plant models.

    The controller's QP uses the ``controller_variant`` model discretized at
    ``cfg.dt``; the plant is integrated with RK4 at ``scenario.sim_dt`` under
    ``plant_variant`` with the first optimal input held over the control
    interval. Tracking errors are measured at the control instants.

    Raises
    ------
    ConvergenceError
        If any QP fails to reach ``cfg.tol`` within ``cfg.max_iter``.
    """
    substeps = _substeps(cfg, scenario.sim_dt)
    n_ctrl = int(round(scenario.t_final / cfg.dt))
    if n_ctrl < 1 or abs(n_ctrl * cfg.dt - scenario.t_final) > 1e-9 * scenario.t_final:
        raise ValueError("t_final must be an integer multiple of the controller dt")
    ctrl = discretize(build_state_space(params, controller_variant, torque_scale), cfg.dt)
    plant = build_state_space(params, plant_variant, torque_scale)

    z = np.concatenate([np.asarray(scenario.x0, dtype=float), np.asarray(scenario.pose0, dtype=float)])
    warm = None
    rec_t, rec_z, rec_u, rec_w, rec_ref = [], [], [], [], []
    iterations: list[int] = []
    worst = 0.0
    for k in range(n_ctrl + 1):
        t = k * cfg.dt
        preview = np.array([scenario.reference(t + j * cfg.dt) for j in range(1, cfg.horizon + 1)],
                           dtype=float)
        qp = condense(ctrl, cfg, z[:3], preview)
        sol = solve_qp(qp, cfg, warm)
        if not sol.converged:
            raise ConvergenceError(
                f"QP not converged at t={t:.6g} after {sol.iterations} iterations "
                f"(residual {sol.residual:.3e})")
        iterations.append(sol.iterations)
        worst = max(worst, sol.residual)
        u = sol.u[:3].copy()
        warm = np.concatenate([sol.u[3:], sol.u[-3:]])
        rec_t.append(t)
        rec_z.append(z.copy())
        rec_u.append(u)
        rec_w.append(closed_form_wrench(u, z[:3], params, plant_variant, torque_scale))
        rec_ref.append(np.asarray(scenario.reference(t), dtype=float))
        if k < n_ctrl:
            for _ in range(substeps):
                z = _advance(z, u, plant, scenario.sim_dt, "rk4")

    zs = np.array(rec_z)
    traj = Trajectory(np.array(rec_t), zs[:, 3:], zs[:, :3], np.array(rec_u),
                      np.array(rec_w, dtype=float))
    ref = np.array(rec_ref)
    err = np.abs(traj.vel - ref)
    metrics = {
        name: {"rms": float(np.sqrt(np.mean(err[:, i] ** 2))), "max": float(err[:, i].max()),
               "final": float(err[-1, i])}
        for i, name in enumerate(("v", "vn", "omega"))
    }
    return ClosedLoopResult(traj, ref, metrics, iterations, worst)
