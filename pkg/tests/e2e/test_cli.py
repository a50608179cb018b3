import json
import math

import pytest
from click.testing import CliRunner

from phasetk.cli import cli
from phasetk.core.observability import configure_logging

pytestmark = pytest.mark.e2e


@pytest.fixture
def runner():
    yield CliRunner(mix_stderr=False)
    # the CLI binds log handlers to the runner's streams
    configure_logging()


def write_scenario(path, payload):
    path.write_text(json.dumps(payload, indent=2))
    return path


@pytest.fixture
def ebk_file(tmp_path):
    return write_scenario(
        tmp_path / "ebk.json",
        {"kind": "ebk", "name": "unit-circle", "manifold": {"type": "circle", "radius": 1.0}, "params": {"hbar": 1.0}},
    )


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "ptk" in result.output


def test_ebk_command(runner, ebk_file, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, ["ebk", "--scenario", str(ebk_file), "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    assert result.output.splitlines() == [str(out / name) for name in ("results.csv", "results.json", "manifest.json")]
    summary = json.loads((out / "results.json").read_text())
    assert summary["quantized"] is True
    assert summary["reports"][0]["maslov"] == 2
    assert summary["name"] == "unit-circle"


def test_transport_command(runner, tmp_path):
    scenario = write_scenario(
        tmp_path / "transport.json",
        {
            "kind": "transport",
            "hamiltonian": {"type": "harmonic"},
            "manifold": {"type": "circle"},
            "params": {"points": [{"theta": [0.0]}], "t": math.pi / 2, "method": "gauss4"},
            "output": {"prefix": "quarter"},
        },
    )
    out = tmp_path / "out"
    result = runner.invoke(cli, ["transport", "--scenario", str(scenario), "--out", str(out), "--steps", "512"])
    assert result.exit_code == 0, result.stderr
    lines = (out / "quarter.csv").read_text().splitlines()
    header, row = lines[0].split(","), lines[1].split(",")
    assert float(row[header.index("increment")]) == pytest.approx(0.0, abs=1e-7)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["steps"] == 512


def test_missing_kind_exits_with_validation_code(runner, tmp_path):
    scenario = write_scenario(tmp_path / "bad.json", {"manifold": {"type": "circle"}})
    result = runner.invoke(cli, ["check", "--scenario", str(scenario), "--out", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert "kind" in result.stderr


def test_command_must_match_scenario_kind(runner, ebk_file, tmp_path):
    result = runner.invoke(cli, ["flow", "--scenario", str(ebk_file), "--out", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert "expected 'flow'" in result.stderr


def test_reruns_are_deterministic(runner, ebk_file, tmp_path):
    outputs = [tmp_path / "first", tmp_path / "second"]
    for out in outputs:
        assert runner.invoke(cli, ["ebk", "--scenario", str(ebk_file), "--out", str(out), "--seed", "7"]).exit_code == 0
    for name in ("results.csv", "results.json"):
        assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()
    manifests = [json.loads((out / "manifest.json").read_text()) for out in outputs]
    assert manifests[0].pop("timestamp") != ""
    manifests[1].pop("timestamp")
    assert manifests[0] == manifests[1]
    assert manifests[0]["seed"] == 7


@pytest.mark.slow
def test_selftest_passes_every_tag(runner, tmp_path):
    report = tmp_path / "selftest.json"
    result = runner.invoke(cli, ["selftest", "--out", str(report)])
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert len(lines) == 10
    assert all(line.startswith("PASS ") for line in lines)
    tags = {line.split()[1] for line in lines}
    assert {"stv", "eg1", "eg2", "eg3", "phg", "ph6", "fif", "fund"} <= tags
    assert json.loads(report.read_text())["passed"] is True


def test_selftest_reports_a_broken_translation_law(runner, mocker):
    mocker.patch("phasetk.transport.translations.translation_increment", return_value=0.0)
    result = runner.invoke(cli, ["selftest", "--tag", "eg1"])
    assert result.exit_code == 1
    assert result.output.startswith("FAIL eg1 (translation)")


def test_selftest_rejects_unknown_tags(runner):
    result = runner.invoke(cli, ["selftest", "--tag", "no-such-law"])
    assert result.exit_code == 2
    assert "no-such-law" in result.stderr


def test_selftest_rejects_empty_selection(runner, tmp_path):
    cases = tmp_path / "cases.json"
    cases.write_text(json.dumps({"oracle_cases": [{"tag": "eg1", "tolerance": 1e-9}]}))
    result = runner.invoke(cli, ["selftest", "--cases", str(cases), "--tag", "phg"])
    assert result.exit_code == 2
    assert "no oracle cases selected" in result.stderr
