import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from oscillab.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main, run
from oscillab.io import emit_trajectory, format_number, jsonable, write_csv, write_json
from oscillab.models import pendulum_field
from oscillab.ode import State, VectorField, integrate
from oscillab.scenario import ScenarioError, load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def output_bytes(out, skip=("manifest.json",)):
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.name not in skip}


# io ---------------------------------------------------------------------------------

def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert float(format_number(math.pi)) == math.pi
    assert format_number(3) == "3"
    assert format_number(True) == "true"
    assert format_number(math.nan) == "nan"


def test_csv_line_endings(tmp_path):
    path = write_csv(tmp_path / "a.csv", ("t", "q"), [(0.0, 1.0), (0.5, 2.0)])
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    assert raw.decode().splitlines()[0] == "t,q"


def test_json_non_finite_and_complex(tmp_path):
    obj = {"b": math.inf, "a": [np.float64(1.5), complex(1, -2)], "c": np.arange(2)}
    assert jsonable(obj) == {"b": None, "a": [1.5, {"re": 1.0, "im": -2.0}], "c": [0, 1]}
    text = write_json(tmp_path / "x.json", obj).read_text()
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("}\n")


def test_emit_equilibrium_constant_columns(tmp_path):
    traj = integrate(pendulum_field(), State(0.0, [math.pi / 2, 0.0]), 10.0)
    rows = read_csv(emit_trajectory(traj, tmp_path / "e.csv"))
    assert rows[0] == ["t", "q", "v"]
    assert {r[1] for r in rows[1:]} == {format_number(math.pi / 2)}
    assert {float(r[2]) for r in rows[1:]} == {0.0}


def test_emit_free_motion(tmp_path):
    free = VectorField(2, lambda t, y: np.array([y[1], 0.0]))
    traj = integrate(free, State(0.0, [0.0, 1.0]), 5.0)
    rows = read_csv(emit_trajectory(traj, tmp_path / "f.csv"))
    t = np.array([float(r[0]) for r in rows[1:]])
    q = np.array([float(r[1]) for r in rows[1:]])
    assert np.all(np.diff(t) > 0)
    assert np.max(np.abs(q - t)) < 1e-12


def test_emit_label_count(tmp_path):
    traj = integrate(pendulum_field(), State(0.0, [1.0, 0.0]), 1.0)
    with pytest.raises(ValueError):
        emit_trajectory(traj, tmp_path / "x.csv", ("q",))


# scenario validation --------------------------------------------------------------------

@pytest.mark.parametrize("doc, field", [
    ({"model": "pendulum", "experiment": "simulate", "lambda": -1, "g": "sin",
      "ic": [1, 0], "t_max": 1}, "lambda"),
    ({"model": "pendulum", "experiment": "simulate", "ic": [1, 0], "t_max": 1,
      "tol": 1.0}, "tol"),
    ({"model": "pendulum", "experiment": "simulate", "g": "cos2", "ic": [1, 0],
      "t_max": 1}, "g"),
    ({"model": "pendulum", "experiment": "simulate", "g": {"kind": "const", "c": 1},
      "ic": [1, 0], "t_max": 1}, "g"),
    ({"model": "pendulum", "experiment": "dance"}, "experiment"),
    ({"model": "boat", "experiment": "simulate"}, "model"),
    ({"model": "pendulum", "experiment": "simulate", "ic": [1, 0], "t_max": 1,
      "colour": "red"}, "colour"),
    ({"model": "pendulum", "experiment": "average", "g": "sin", "lambdas": [1, 2, 3],
      "ic": [1, 0], "horizon": 1}, "lambdas"),
])
def test_scenario_errors_name_the_field(doc, field):
    with pytest.raises(ScenarioError) as info:
        load_scenario(doc)
    assert info.value.field == field
    assert str(info.value).startswith(field)


def test_scenario_defaults():
    sc = load_scenario({"model": "strip", "experiment": "simulate", "ic": [0, 0], "t_max": 1})
    assert sc.labels == ("t", "x", "y")
    assert sc.seed == 0
    assert sc.system.field()(0.0, np.array([0.0, 0.5])) == pytest.approx([0.0, 0.5])


# run ---------------------------------------------------------------------------------

def test_negative_lambda_exit_code(tmp_path, capsys):
    path = write_scenario(tmp_path, {"model": "pendulum", "experiment": "simulate",
                                     "g": "sin", "lambda": -1, "ic": [1, 0], "t_max": 1})
    out = tmp_path / "out"
    assert run(path, out) == EXIT_INVALID
    assert "lambda" in capsys.readouterr().err
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "error" and manifest["error"]["field"] == "lambda"
    assert manifest["exit_code"] == EXIT_INVALID


def test_invalid_json_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    assert run(path, tmp_path / "out") == EXIT_INVALID


def test_numerical_failure_exit_code(tmp_path):
    doc = json.loads((SCENARIOS / "pendulum_periodic_fast.json").read_text())
    doc["lambda"] = 8.5
    path = write_scenario(tmp_path, doc)
    out = tmp_path / "out"
    assert run(path, out) == EXIT_FAILED
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["error"]["type"] == "IncommensuratePeriods"


def test_curve_info_circle(tmp_path):
    out = tmp_path / "out"
    assert run(SCENARIOS / "circle_info.json", out) == EXIT_OK
    info = json.loads((out / "curve_info.json").read_text())
    assert abs(info["total_length"] - 2 * math.pi) < 1e-10
    assert abs(info["m1"] - 1) < 1e-8 and abs(info["m2"]) < 1e-8
    first = info["vertical_points"][0]
    assert first["phi"] == 0.0
    assert abs(first["s1"] - math.pi) < 1e-10 and abs(first["s2"] - 2 * math.pi) < 1e-10
    assert len(read_csv(out / "vertical_points.csv")) == 17


def test_simulate_outputs(tmp_path):
    out = tmp_path / "out"
    assert run(SCENARIOS / "pendulum_simulate.json", out) == EXIT_OK
    rows = read_csv(out / "trajectory.csv")
    assert rows[0] == ["t", "q", "v"] and len(rows) == 402
    t = np.array([float(r[0]) for r in rows[1:]])
    assert np.all(np.diff(t) > 0)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outputs"] == ["trajectory.csv", "result.json"]
    assert manifest["versions"]["oscillab"]


@pytest.mark.parametrize("name", ["pendulum_simulate.json", "circle_info.json",
                                  "ellipse_info.json", "pendulum_periodic.json",
                                  "strip_average.json"])
def test_determinism(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(SCENARIOS / name, a) == EXIT_OK
    assert run(SCENARIOS / name, b) == EXIT_OK
    assert output_bytes(a) == output_bytes(b)
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    for m in (ma, mb):
        m.pop("wall_clock_s")
    assert ma == mb


def test_manifest_echo_round_trip(tmp_path):
    a = tmp_path / "a"
    assert run(SCENARIOS / "pendulum_periodic.json", a) == EXIT_OK
    echo = json.loads((a / "manifest.json").read_text())["scenario"]
    path = write_scenario(tmp_path, echo, "echo.json")
    b = tmp_path / "b"
    assert run(path, b) == EXIT_OK
    assert output_bytes(a) == output_bytes(b)


def test_seed_override_recorded(tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(SCENARIOS / "circle_info.json"), "--out", str(out), "--seed", "7"]) == 0
    assert json.loads((out / "manifest.json").read_text())["scenario"]["seed"] == 7


def test_module_entry_point(tmp_path):
    out = tmp_path / "out"
    res = subprocess.run([sys.executable, "-m", "oscillab", "run", str(SCENARIOS / "circle_info.json"),
                          "--out", str(out)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (out / "curve_info.json").exists()
