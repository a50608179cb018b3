import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from phasetk.core.exceptions import ScenarioValidationError
from phasetk.models.scenario import ScenarioKind
from phasetk.scenarios.runner import jsonable, load_scenario, parse_scenario, run_scenario


def scenario(payload):
    return parse_scenario(json.dumps(payload, indent=2))


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def test_missing_kind_names_the_field():
    with pytest.raises(ScenarioValidationError) as excinfo:
        scenario({"manifold": {"type": "circle"}})
    assert excinfo.value.field == "kind"
    assert "kind" in str(excinfo.value)
    assert excinfo.value.exit_code == 2


def test_unknown_key_reports_path_and_line():
    text = '{\n  "kind": "check",\n  "manifold": {"type": "circle", "radus": 2.0}\n}\n'
    with pytest.raises(ScenarioValidationError) as excinfo:
        parse_scenario(text)
    assert excinfo.value.field == "manifold.radus"
    assert excinfo.value.line == 3


def test_invalid_json_reports_line():
    with pytest.raises(ScenarioValidationError) as excinfo:
        parse_scenario('{\n  "kind": "check",\n  "manifold": \n}')
    assert excinfo.value.line == 4


def test_scenario_must_be_a_mapping():
    with pytest.raises(ScenarioValidationError):
        parse_scenario("[1, 2, 3]")


@pytest.mark.parametrize(
    "payload",
    [
        {"kind": "transport", "hamiltonian": {"type": "harmonic"}, "manifold": {"type": "circle"}, "params": {"t": 1}},
        {"kind": "flow", "hamiltonian": {"type": "free"}, "params": {"t": 1.0}},
        {"kind": "hj", "hamiltonian": {"type": "free"}, "manifold": {"type": "circle"}, "params": {"t": 1.0}},
        {"kind": "check", "manifold": {"type": "torus"}},
        {"kind": "flow", "hamiltonian": {"type": "translation"}, "params": {"t": 1.0, "initial": [[0, 0]]}},
        {"kind": "weyl", "params": {"grid": [{"min": 1.0, "max": 0.0}], "z_a": [0, 0]}},
    ],
    ids=["transport-points", "flow-initial", "hj-grid", "torus-radii", "translation-shift", "grid-bounds"],
)
def test_kind_requirements(payload):
    with pytest.raises(ScenarioValidationError):
        scenario(payload)


def test_yaml_scenarios_load(tmp_path):
    path = tmp_path / "ebk.yaml"
    path.write_text("kind: ebk\nmanifold:\n  type: circle\n  radius: 1.0\nparams:\n  hbar: 1.0\n")
    loaded, text = load_scenario(path)
    assert loaded.kind is ScenarioKind.EBK
    assert text.startswith("kind: ebk")
    with pytest.raises(ScenarioValidationError):
        load_scenario(tmp_path / "missing.json")


def test_check_run(tmp_path):
    result = run_scenario(
        scenario(
            {
                "kind": "check",
                "manifold": {"type": "circle", "radius": 1.0},
                "params": {"samples": 64, "matrix": [[0, 1], [-1, 0]]},
                "output": {"prefix": "circle"},
            }
        ),
        tmp_path,
    )
    assert [path.name for path in result.files] == ["circle.csv", "circle.json", "manifest.json"]
    summary = result.summary
    assert summary["lagrangian"]
    assert summary["caustic_count"] == 2
    assert summary["periods"][0]["period"] == pytest.approx(-math.pi, abs=1e-9)
    assert summary["matrix"]["symplectic"] and summary["matrix"]["free"]
    rows = read_csv(tmp_path / "circle.csv")
    assert [float(row["theta1"]) for row in rows] == pytest.approx([0.0, math.pi], abs=1e-9)


def test_flow_run(tmp_path):
    result = run_scenario(
        scenario(
            {
                "kind": "flow",
                "hamiltonian": {"type": "harmonic"},
                "params": {"initial": [[1.0, 0.0]], "t": math.pi / 2, "steps": 256, "method": "Gauss-Legendre"},
            }
        ),
        tmp_path,
    )
    x, p = result.summary["final_points"][0]
    assert x == pytest.approx(0.0, abs=1e-9)
    assert p == pytest.approx(-1.0, abs=1e-9)
    assert result.summary["energy_drift"] < 1e-10
    assert len(read_csv(tmp_path / "results.csv")) == 257
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["integrator"] == "gauss4"
    assert manifest["steps"] == 256


def test_transport_run_with_invariance(tmp_path):
    result = run_scenario(
        scenario(
            {
                "kind": "transport",
                "hamiltonian": {"type": "harmonic"},
                "manifold": {"type": "circle"},
                "params": {
                    "points": [{"theta": [0.0]}, {"theta": [1.0], "windings": [1]}],
                    "times": [0.5, math.pi / 2],
                    "steps": 512,
                    "method": "gauss4",
                    "invariant": True,
                },
            }
        ),
        tmp_path,
    )
    assert result.summary["points"] == 2
    assert result.summary["max_defect"] < 1e-7
    rows = read_csv(tmp_path / "results.csv")
    assert len(rows) == 4
    quarter = [row for row in rows if row["point"] == "0" and float(row["t"]) > 1.0][0]
    assert float(quarter["increment"]) == pytest.approx(0.0, abs=1e-7)


def test_hj_run(tmp_path):
    result = run_scenario(
        scenario(
            {
                "kind": "hj",
                "hamiltonian": {"type": "free"},
                "manifold": {"type": "quadratic_graph", "matrix": [[1.0]]},
                "params": {"grid": [{"min": -1.0, "max": 1.0, "nodes": 21}], "t": 1.0, "steps": 20},
            }
        ),
        tmp_path,
    )
    assert result.summary["breakdown_time"] == "inf"
    assert result.summary["valid_fraction"] == 1.0
    assert len(read_csv(tmp_path / "results.csv")) == 21 * 21


def test_hj_run_requires_exact_manifold(tmp_path):
    payload = {
        "kind": "hj",
        "hamiltonian": {"type": "free"},
        "manifold": {"type": "circle"},
        "params": {"grid": [{"min": -1.0, "max": 1.0, "nodes": 5}], "t": 1.0},
    }
    with pytest.raises(ScenarioValidationError) as excinfo:
        run_scenario(scenario(payload), tmp_path)
    assert excinfo.value.field == "manifold.type"


def test_ebk_run(tmp_path):
    result = run_scenario(
        scenario({"kind": "ebk", "manifold": {"type": "circle", "radius": 1.0}, "params": {"hbar": 1.0}}), tmp_path
    )
    assert result.summary["quantized"] is True
    assert result.summary["reports"][0]["maslov"] == 2
    row = read_csv(tmp_path / "results.csv")[0]
    assert row["w1"] == "1" and row["quantized"] == "1"


def test_weyl_run(tmp_path):
    step = 40.0 / 1024
    result = run_scenario(
        scenario(
            {
                "kind": "weyl",
                "params": {
                    "grid": [{"min": -20.0, "max": 20.0, "nodes": 1025}],
                    "z_a": [2 * step, 0.5],
                    "z_b": [-3 * step, -0.3],
                },
            }
        ),
        tmp_path,
    )
    composition = result.summary["composition"]
    assert composition["phase"] == pytest.approx(composition["expected"], abs=1e-12)
    assert composition["max_deviation"] < 1e-9
    assert result.summary["norm_defect"] < 1e-12


def test_invariance_run(tmp_path):
    result = run_scenario(
        scenario(
            {
                "kind": "invariance",
                "hamiltonian": {"type": "harmonic"},
                "params": {
                    "curve": {"type": "segment", "start": [0.0, 0.0], "end": [1.0, 1.0]},
                    "t": 1.0,
                    "refinements": [65, 129],
                    "steps": 256,
                    "method": "gauss4",
                },
            }
        ),
        tmp_path,
    )
    assert result.summary["passed"]
    assert [row["samples"] for row in read_csv(tmp_path / "results.csv")] == ["65", "129"]


def test_run_rejects_mismatched_kind(tmp_path):
    check = scenario({"kind": "check", "manifold": {"type": "circle"}})
    with pytest.raises(ScenarioValidationError) as excinfo:
        run_scenario(check, tmp_path, kind=ScenarioKind.FLOW)
    assert excinfo.value.field == "kind"


def test_run_rejects_unknown_integrator(tmp_path):
    payload = {
        "kind": "flow",
        "hamiltonian": {"type": "free"},
        "params": {"initial": [[0, 1]], "t": 1, "method": "rk4"},
    }
    with pytest.raises(ScenarioValidationError) as excinfo:
        run_scenario(scenario(payload), tmp_path)
    assert excinfo.value.field == "params.method"


def test_reruns_are_identical_except_timestamp(tmp_path):
    text = json.dumps({"kind": "ebk", "manifold": {"type": "torus", "radii": [1.0, 2.0]}})
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        run_scenario(parse_scenario(text), out, source_text=text)
    assert (first / "results.csv").read_bytes() == (second / "results.csv").read_bytes()
    assert (first / "results.json").read_bytes() == (second / "results.json").read_bytes()
    manifests = [json.loads((out / "manifest.json").read_text()) for out in (first, second)]
    for manifest in manifests:
        manifest.pop("timestamp")
    assert manifests[0] == manifests[1]
    assert manifests[0]["input_sha256"] is not None


def test_jsonable_converts_non_finite_numbers():
    assert jsonable({"a": np.float64("inf"), "b": np.arange(2), "c": np.bool_(True)}) == {
        "a": "inf",
        "b": [0, 1],
        "c": True,
    }


EXAMPLE_DIR = Path(__file__).resolve().parents[2] / "docs" / "scenarios"


@pytest.mark.parametrize("path", sorted(EXAMPLE_DIR.glob("*.*")), ids=lambda path: path.name)
def test_documented_scenarios_validate(path):
    loaded, _ = load_scenario(path)
    assert loaded.name != "scenario"


def test_documented_torus_is_quantized(tmp_path):
    loaded, text = load_scenario(EXAMPLE_DIR / "torus-ebk.yaml")
    result = run_scenario(loaded, tmp_path, source_text=text)
    assert result.summary["quantized"] is True
    assert [report["maslov"] for report in result.summary["reports"]] == [2, 2, 4]
