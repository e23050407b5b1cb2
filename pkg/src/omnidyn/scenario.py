"""Scenario files for the command-line runner.

A scenario is a JSON object::

    {
      "name": "spin",
      "params": "robot.json",            # path relative to this file, or inline object
      "variants": ["correct", "erroneous"],
      "torque_scale": 1.0,
      "sim": {"dt": 0.001, "t_final": 10, "integrator": "rk4", "record_stride": 10},
      "initial": {"v": 0, "vn": 0, "omega": 0, "x": 0, "y": 0, "theta": 0},
      "inputs": [{"t_start": 0, "u1": 1, "u2": 1, "u3": 1}],
      "reference": [{"t_start": 0, "v": 0.3, "vn": 0, "omega": 1}],
      "mpc": {"horizon": 10, "dt": 0.05, "q": [100, 100, 100], "r": [0.001, 0.001, 0.001],
              "u_max": 12, "tol": 1e-8, "max_iter": 10000,
              "plant": "correct", "controller": "erroneous"},
      "threshold": 0.001,
      "output_dir": "out"
    }

``inputs`` may instead be ``{"random": {"segments": 4, "amplitude": 6}}``,
which draws piecewise-constant voltages from a seeded generator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .actuation import Variant
from .mpc import MpcConfig
from .params import RobotParams, load_params, params_from_dict
from .sim import InputSchedule, SimConfig


class ScenarioError(ValueError):
    pass


_KEYS = {"name", "params", "variants", "torque_scale", "sim", "initial", "inputs",
         "reference", "mpc", "threshold", "output_dir", "seed"}


@dataclass
class Scenario:
    name: str
    params: RobotParams
    variants: list[Variant]
    torque_scale: float
    sim: SimConfig
    x0: tuple[float, float, float]
    pose0: tuple[float, float, float]
    inputs: InputSchedule
    reference: InputSchedule | None
    mpc: MpcConfig | None
    plant: Variant
    controller: Variant
    threshold: float
    output_dir: Path | None
    seed: int = 0

    def sim_config(self, variant: Variant) -> SimConfig:
        return SimConfig(dt=self.sim.dt, t_final=self.sim.t_final, integrator=self.sim.integrator,
                         variant=variant, record_stride=self.sim.record_stride,
                         torque_scale=self.torque_scale, u_max=self.sim.u_max)


def _variant(text) -> Variant:
    try:
        return Variant(text)
    except ValueError:
        raise ScenarioError(f"unknown variant {text!r}") from None


def _segments(items, keys, t_final, what):
    if not isinstance(items, list) or not items:
        raise ScenarioError(f"{what} must be a non-empty list of segments")
    starts, values = [], []
    for seg in items:
        if not isinstance(seg, dict):
            raise ScenarioError(f"{what} segments must be objects")
        extra = set(seg) - {"t_start", *keys}
        if extra:
            raise ScenarioError(f"unknown {what} key(s): {', '.join(sorted(extra))}")
        try:
            starts.append(float(seg["t_start"]))
            values.append(tuple(float(seg.get(k, 0.0)) for k in keys))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad {what} segment {seg!r}: {exc}") from None
    if starts[0] != 0.0:
        raise ScenarioError(f"{what} schedule has a gap: first segment must start at t = 0")
    if any(b <= a for a, b in zip(starts, starts[1:])):
        raise ScenarioError(f"{what} segments must be ordered and non-overlapping")
    if starts[-1] >= t_final:
        raise ScenarioError(f"{what} segment starts at or after t_final")
    if not all(math.isfinite(x) for v in values for x in v):
        raise ScenarioError(f"{what} values must be finite")
    return starts, values


def _random_segments(opts: dict, t_final: float, seed: int):
    n = int(opts.get("segments", 4))
    amp = float(opts.get("amplitude", 1.0))
    if n < 1 or not amp >= 0:
        raise ScenarioError("random inputs need segments >= 1 and amplitude >= 0")
    rng = np.random.default_rng(seed)
    starts = [t_final * i / n for i in range(n)]
    values = [tuple(float(x) for x in rng.uniform(-amp, amp, 3)) for _ in range(n)]
    return starts, values


def load_scenario(path: str | Path, params_path: str | Path | None = None,
                  seed: int | None = None) -> Scenario:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return scenario_from_dict(data, path.parent, params_path=params_path, seed=seed)


def scenario_from_dict(data: dict, base: Path = Path("."), params_path=None,
                       seed: int | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    extra = set(data) - _KEYS
    if extra:
        raise ScenarioError(f"unknown scenario key(s): {', '.join(sorted(extra))}")

    if params_path is not None:
        params = load_params(params_path)
    elif isinstance(data.get("params"), dict):
        params = params_from_dict(data["params"])
    elif isinstance(data.get("params"), str):
        params = load_params(base / data["params"])
    else:
        raise ScenarioError("scenario needs 'params' (file path or object) or --params")

    sim_opts = dict(data.get("sim", {}))
    unknown = set(sim_opts) - {"dt", "t_final", "integrator", "record_stride", "u_max"}
    if unknown:
        raise ScenarioError(f"unknown sim key(s): {', '.join(sorted(unknown))}")
    sim = SimConfig(**sim_opts)

    init = dict(data.get("initial", {}))
    unknown = set(init) - {"v", "vn", "omega", "x", "y", "theta"}
    if unknown:
        raise ScenarioError(f"unknown initial key(s): {', '.join(sorted(unknown))}")
    x0 = tuple(float(init.get(k, 0.0)) for k in ("v", "vn", "omega"))
    pose0 = tuple(float(init.get(k, 0.0)) for k in ("x", "y", "theta"))

    seed = int(data.get("seed", 0)) if seed is None else int(seed)
    raw_inputs = data.get("inputs", [{"t_start": 0.0}])
    if isinstance(raw_inputs, dict) and set(raw_inputs) == {"random"}:
        starts, values = _random_segments(raw_inputs["random"], sim.t_final, seed)
    else:
        starts, values = _segments(raw_inputs, ("u1", "u2", "u3"), sim.t_final, "input")
    inputs = InputSchedule(starts, values)

    reference = None
    if "reference" in data:
        rs, rv = _segments(data["reference"], ("v", "vn", "omega"), sim.t_final, "reference")
        reference = InputSchedule(rs, rv)

    mpc_opts = dict(data.get("mpc", {}))
    plant = _variant(mpc_opts.pop("plant", "correct"))
    controller = _variant(mpc_opts.pop("controller", "correct"))
    unknown = set(mpc_opts) - {"horizon", "dt", "q", "r", "u_max", "tol", "max_iter"}
    if unknown:
        raise ScenarioError(f"unknown mpc key(s): {', '.join(sorted(unknown))}")
    mpc = MpcConfig(**mpc_opts) if "mpc" in data else None

    variants = data.get("variants", ["correct"])
    if isinstance(variants, str):
        variants = ["correct", "erroneous"] if variants == "both" else [variants]
    out_dir = data.get("output_dir")
    return Scenario(
        name=str(data.get("name", "scenario")),
        params=params,
        variants=[_variant(v) for v in variants],
        torque_scale=float(data.get("torque_scale", 1.0)),
        sim=sim,
        x0=x0,
        pose0=pose0,
        inputs=inputs,
        reference=reference,
        mpc=mpc,
        plant=plant,
        controller=controller,
        threshold=float(data.get("threshold", 1e-3)),
        output_dir=None if out_dir is None else base / out_dir,
        seed=seed,
    )
