"""Dynamics, simulation and MPC for a three-wheel omnidirectional robot."""

from .actuation import (MotorInput, Variant, WheelForces, Wrench, closed_form_wrench,
                        traction_force, wheel_forces, wrench_from_wheel_forces)
from .compare import DivergenceReport, diff_trajectories, missing_term_magnitude, sensitivity_sweep
from .kinematics import BodyVelocity, Pose, WheelSpeeds, body_to_wheels, wheels_to_body
from .mpc import ConvergenceError, MpcConfig, MpcScenario, closed_loop, condense, solve_qp
from .params import (DriveConstants, ParameterError, RobotParams, drive_constants, load_params,
                     unit_params, validate)
from .sim import InputSchedule, SimConfig, SimulationError, Trajectory, simulate
from .statespace import build_a, build_b, build_state_space, discretize

__all__ = [
    "BodyVelocity", "ConvergenceError", "DivergenceReport", "DriveConstants", "InputSchedule",
    "MotorInput", "MpcConfig", "MpcScenario", "ParameterError", "Pose", "RobotParams",
    "SimConfig", "SimulationError", "Trajectory", "Variant", "WheelForces", "WheelSpeeds",
    "Wrench", "body_to_wheels", "build_a", "build_b", "build_state_space", "closed_form_wrench",
    "closed_loop", "condense", "diff_trajectories", "discretize", "drive_constants",
    "load_params", "missing_term_magnitude", "sensitivity_sweep", "simulate", "solve_qp",
    "traction_force", "unit_params", "validate", "wheel_forces", "wheels_to_body",
    "wrench_from_wheel_forces",
]
