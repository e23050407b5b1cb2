"""Command-line front end: ``matrices``, ``simulate``, ``compare`` and ``mpc``.

Exit status is 0 on success, 1 on a runtime or solver failure and 2 on invalid
input (bad JSON, out-of-range parameter, malformed schedule).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .actuation import Variant
from .compare import diff_trajectories, missing_term_magnitude
from .mpc import ConvergenceError, MpcScenario, closed_loop
from .params import load_params
from .scenario import Scenario, load_scenario
from .sim import SimulationError, simulate
from .statespace import build_a, build_b, build_state_space, discretize

EXIT_RUNTIME = 1
EXIT_INPUT = 2


def _dumps(obj) -> str:
    # repr-based float output round-trips exactly and is byte-stable.
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _variants(arg: str | None, default: list[Variant]) -> list[Variant]:
    if arg is None:
        return default
    if arg == "both":
        return [Variant.CORRECT, Variant.ERRONEOUS]
    return [Variant(arg)]


def _scenario(args) -> Scenario:
    sc = load_scenario(args.scenario, params_path=args.params, seed=args.seed)
    if args.torque_scale is not None:
        sc.torque_scale = args.torque_scale
    return sc


def _out_dir(args, sc: Scenario) -> Path:
    if args.out is not None:
        return Path(args.out)
    return sc.output_dir if sc.output_dir is not None else Path(".")


def cmd_matrices(args) -> int:
    params = load_params(args.params)
    scale = 1.0 if args.torque_scale is None else args.torque_scale
    result = {}
    for variant in _variants(args.variant, [Variant.CORRECT]):
        entry = {
            "A": build_a(params, variant, scale).tolist(),
            "B": build_b(params).tolist(),
            "torque_scale": scale,
        }
        if args.dt is not None:
            ds = discretize(build_state_space(params, variant, scale), args.dt)
            entry.update(dt=args.dt, Ad=ds.ad.tolist(), Bd=ds.bd.tolist())
        result[variant.value] = entry
    sys.stdout.write(_dumps(result))
    return 0


def _run(sc: Scenario, variant: Variant):
    return simulate(sc.x0, sc.inputs, sc.params, sc.sim_config(variant), pose0=sc.pose0)


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    out = _out_dir(args, sc)
    for variant in _variants(args.variant, sc.variants):
        traj = _run(sc, variant)
        write_atomic(out / f"{sc.name}_{variant.value}.csv", traj.to_csv())
    return 0


def cmd_compare(args) -> int:
    sc = _scenario(args)
    out = _out_dir(args, sc)
    ta = _run(sc, Variant.CORRECT)
    tb = _run(sc, Variant.ERRONEOUS)
    report = diff_trajectories(ta, tb, sc.threshold, sc.name).to_dict()
    report["torque_scale"] = sc.torque_scale
    report["missing_term"] = missing_term_magnitude(sc.params)
    write_atomic(out / f"{sc.name}_correct.csv", ta.to_csv())
    write_atomic(out / f"{sc.name}_erroneous.csv", tb.to_csv())
    write_atomic(out / f"{sc.name}_report.json", _dumps(report))
    return 0


def cmd_mpc(args) -> int:
    sc = _scenario(args)
    if sc.mpc is None or sc.reference is None:
        raise ValueError("mpc command needs 'mpc' and 'reference' blocks in the scenario")
    out = _out_dir(args, sc)
    task = MpcScenario(sc.reference, sc.sim.t_final, sc.x0, sc.pose0, sc.sim.dt)
    metrics = {}
    for controller in _variants(args.variant, [sc.controller]):
        res = closed_loop(sc.plant, controller, task, sc.params, sc.mpc, sc.torque_scale)
        write_atomic(out / f"{sc.name}_mpc_{controller.value}.csv", res.trajectory.to_csv())
        entry = res.metrics_dict()
        entry["plant"] = sc.plant.value
        entry["controller"] = controller.value
        metrics[controller.value] = entry
    write_atomic(out / f"{sc.name}_mpc_metrics.json", _dumps(metrics))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omnidyn",
        description="Three-wheel omnidirectional robot dynamics: matrices, simulation, "
                    "model comparison and MPC.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="parameter JSON file (overrides the scenario's)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--variant", choices=["correct", "erroneous", "both"])
    common.add_argument("--torque-scale", type=float, dest="torque_scale",
                        help="scale on the yaw-rate torque term of the erroneous model")
    common.add_argument("--seed", type=int, help="seed for randomized input schedules")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrices", parents=[common], help="print A, B (and Ad, Bd) as JSON")
    p.add_argument("--dt", type=float, help="also print the zero-order-hold discretization")
    p.set_defaults(func=cmd_matrices)

    for name, func, text in (
        ("simulate", cmd_simulate, "simulate a scenario and write trajectory CSVs"),
        ("compare", cmd_compare, "simulate both models and write a divergence report"),
        ("mpc", cmd_mpc, "run the closed-loop MPC scenario"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("scenario", help="scenario JSON file")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "matrices" and args.params is None:
        parser.error("matrices requires --params")
    try:
        return args.func(args)
    except (SimulationError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, TypeError, KeyError, OSError) as exc:
        # json.JSONDecodeError and ParameterError are ValueError subclasses.
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
