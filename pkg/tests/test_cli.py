import json
import math
import subprocess
import sys

import numpy as np
import pytest

from omnidyn.cli import main
from omnidyn.params import params_to_dict, unit_params
from omnidyn.sim import CSV_HEADER, Trajectory


@pytest.fixture
def workdir(tmp_path, robot):
    (tmp_path / "unit.json").write_text(json.dumps(params_to_dict(unit_params())))
    (tmp_path / "robot.json").write_text(json.dumps(params_to_dict(robot)))
    return tmp_path


def write_scenario(workdir, name, **fields):
    data = {"name": name, "params": "robot.json", "sim": {"dt": 0.001, "t_final": 1.0}}
    data.update(fields)
    path = workdir / f"{name}.json"
    path.write_text(json.dumps(data))
    return path


def matrices(capsys, *args):
    code = main(["matrices", *args])
    return code, capsys.readouterr()


def test_matrices_unit(workdir, capsys):
    code, out = matrices(capsys, "--params", str(workdir / "unit.json"))
    assert code == 0
    data = json.loads(out.out)
    assert data["correct"]["A"] == [[-1.5, 0, 0], [0, -1.5, -1], [0, 0, -2]]
    np.testing.assert_allclose(data["correct"]["B"],
                               [[0, math.sqrt(3) / 2, -math.sqrt(3) / 2], [-1, 0.5, 0.5], [1, 1, 1]],
                               atol=1e-15)
    assert "Ad" not in data["correct"]


def test_matrices_erroneous_and_discrete(workdir, capsys):
    code, out = matrices(capsys, "--params", str(workdir / "unit.json"), "--variant", "erroneous",
                         "--dt", "0.1", "--torque-scale", "0.5")
    assert code == 0
    data = json.loads(out.out)["erroneous"]
    assert data["A"][1][2] == 0.0
    assert data["A"][2][2] == -1.0
    assert data["Ad"][2][2] == pytest.approx(math.exp(-0.1), rel=1e-14)
    assert np.array(data["Bd"]).shape == (3, 3)


def test_matrices_both(workdir, capsys):
    code, out = matrices(capsys, "--params", str(workdir / "unit.json"), "--variant", "both")
    assert set(json.loads(out.out)) == {"correct", "erroneous"}


def test_matrices_malformed_json(workdir, capsys):
    bad = workdir / "bad.json"
    bad.write_text("{")
    code, out = matrices(capsys, "--params", str(bad))
    assert code == 2 and "error" in out.err


def test_matrices_invalid_parameter(workdir, capsys):
    data = params_to_dict(unit_params())
    data["r"] = 0.0
    (workdir / "zero_r.json").write_text(json.dumps(data))
    code, out = matrices(capsys, "--params", str(workdir / "zero_r.json"))
    assert code == 2 and "r must be > 0" in out.err


def test_matrices_requires_params():
    with pytest.raises(SystemExit) as exc:
        main(["matrices"])
    assert exc.value.code == 2


def test_simulate_zero_input(workdir):
    path = write_scenario(workdir, "rest", inputs=[{"t_start": 0, "u1": 0, "u2": 0, "u3": 0}])
    assert main(["simulate", str(path), "--out", str(workdir / "out")]) == 0
    text = (workdir / "out" / "rest_correct.csv").read_text()
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 102
    tr = Trajectory.from_csv(text)
    assert not np.any(tr.states()) and not np.any(tr.wrench)


def test_simulate_zero_sum_variants_identical(workdir):
    path = write_scenario(workdir, "zs", variants="both",
                          inputs=[{"t_start": 0, "u1": 2, "u2": -1, "u3": -1},
                                  {"t_start": 0.5, "u1": 0, "u2": 3, "u3": -3}])
    assert main(["simulate", str(path), "--out", str(workdir / "o")]) == 0
    a = (workdir / "o" / "zs_correct.csv").read_bytes()
    b = (workdir / "o" / "zs_erroneous.csv").read_bytes()
    assert a == b


def test_simulate_variant_flag_overrides(workdir):
    path = write_scenario(workdir, "one", inputs=[{"t_start": 0, "u1": 1}])
    assert main(["simulate", str(path), "--out", str(workdir / "o"), "--variant", "erroneous"]) == 0
    assert sorted(p.name for p in (workdir / "o").iterdir()) == ["one_erroneous.csv"]


@pytest.mark.parametrize("inputs", [
    [{"t_start": 0.2, "u1": 1}],
    [{"t_start": 0, "u1": 1}, {"t_start": 0.5}, {"t_start": 0.3}],
    [{"t_start": 0, "u1": 1}, {"t_start": 2.0}],
    [{"t_start": 0, "u4": 1}],
])
def test_simulate_rejects_bad_schedule(workdir, capsys, inputs):
    path = write_scenario(workdir, "bad", inputs=inputs)
    assert main(["simulate", str(path), "--out", str(workdir / "o")]) == 2
    assert not (workdir / "o" / "bad_correct.csv").exists()


def test_simulate_blow_up_exit_code(workdir, capsys):
    data = params_to_dict(unit_params(k_t=1e3))
    path = write_scenario(workdir, "boom", params=data,
                          sim={"dt": 0.1, "t_final": 100.0, "integrator": "euler"},
                          initial={"v": 1.0})
    assert main(["simulate", str(path), "--out", str(workdir / "o")]) == 1
    assert "non-finite" in capsys.readouterr().err


def test_random_inputs_follow_seed(workdir):
    path = write_scenario(workdir, "rnd", inputs={"random": {"segments": 4, "amplitude": 5}})
    outs = []
    for seed, sub in ((1, "a"), (1, "b"), (2, "c")):
        assert main(["simulate", str(path), "--seed", str(seed), "--out", str(workdir / sub)]) == 0
        outs.append((workdir / sub / "rnd_correct.csv").read_bytes())
    assert outs[0] == outs[1] != outs[2]


def test_compare_outputs(workdir):
    path = write_scenario(workdir, "spin", inputs=[{"t_start": 0, "u1": 1, "u2": 1, "u3": 1}])
    assert main(["compare", str(path), "--out", str(workdir / "c")]) == 0
    report = json.loads((workdir / "c" / "spin_report.json").read_text())
    assert report["channels"]["v"]["max"] < 1e-10
    assert report["channels"]["vn"]["max"] > 0
    assert report["first_exceedance"] is not None
    for name in ("spin_correct.csv", "spin_erroneous.csv"):
        assert (workdir / "c" / name).read_text().startswith(CSV_HEADER)


def test_compare_zero_sum_report_is_zero(workdir):
    path = write_scenario(workdir, "flat", inputs=[{"t_start": 0, "u1": 2, "u2": -1, "u3": -1}])
    assert main(["compare", str(path), "--out", str(workdir / "c")]) == 0
    report = json.loads((workdir / "c" / "flat_report.json").read_text())
    assert all(ch["max"] < 1e-10 for ch in report["channels"].values())
    assert report["first_exceedance"] is None


MPC_BLOCK = {"horizon": 10, "dt": 0.05, "q": [100, 100, 100], "r": [1e-3, 1e-3, 1e-3],
             "u_max": 12.0, "plant": "correct", "controller": "erroneous"}


def test_mpc_outputs(workdir):
    path = write_scenario(workdir, "turn", reference=[{"t_start": 0, "v": 0.3, "omega": 1.0}],
                          mpc=MPC_BLOCK)
    assert main(["mpc", str(path), "--out", str(workdir / "m"), "--variant", "both"]) == 0
    metrics = json.loads((workdir / "m" / "turn_mpc_metrics.json").read_text())
    assert metrics["erroneous"]["vn"]["rms"] > metrics["correct"]["vn"]["rms"]
    for entry in metrics.values():
        assert entry["plant"] == "correct"
        assert entry["solver"]["worst_residual"] < 1e-8
        assert len(entry["solver"]["iterations"]) == 21
    assert (workdir / "m" / "turn_mpc_erroneous.csv").exists()


def test_mpc_convergence_failure_exit_code(workdir, capsys):
    block = dict(MPC_BLOCK, max_iter=2)
    path = write_scenario(workdir, "slow", reference=[{"t_start": 0, "v": 0.3}], mpc=block)
    assert main(["mpc", str(path), "--out", str(workdir / "m")]) == 1
    assert "not converged" in capsys.readouterr().err


def test_mpc_needs_reference(workdir, capsys):
    path = write_scenario(workdir, "noref", mpc=MPC_BLOCK)
    assert main(["mpc", str(path), "--out", str(workdir / "m")]) == 2


def test_unknown_scenario_key(workdir, capsys):
    path = write_scenario(workdir, "typo", inptus=[])
    assert main(["simulate", str(path)]) == 2
    assert "unknown scenario key" in capsys.readouterr().err


def test_module_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "omnidyn", "matrices", "--params",
                           str(workdir / "unit.json")], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["correct"]["A"][1][2] == -1.0
