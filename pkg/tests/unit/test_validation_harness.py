import json
import math

import pytest

from phasetk.core.exceptions import ScenarioValidationError, StepFailure
from phasetk.validation import LAWS, ORACLES, OracleCase, OracleHarness


class StubOracle:
    def __init__(self, pairs=None, error=None):
        self.pairs = pairs or []
        self.error = error
        self.draws = []

    def __call__(self, params, rng):
        self.draws.append(float(rng.uniform()))
        if self.error is not None:
            raise self.error
        return list(self.pairs)


@pytest.fixture
def stub(monkeypatch):
    oracle = StubOracle(pairs=[(1.0, 1.0 + 1e-10), (2.0, 2.0)])
    monkeypatch.setitem(ORACLES, "stub", oracle)
    return oracle


def test_default_cases_cover_every_tag():
    harness = OracleHarness()
    harness.load_default_cases()
    assert set(harness.tags) == set(ORACLES)
    assert all(case.tolerance > 0 for case in harness.cases)


def test_passing_and_failing_cases(stub):
    harness = OracleHarness([OracleCase("loose", "stub", 1e-9), OracleCase("tight", "stub", 1e-11)])
    report = harness.run_all()
    assert report["case_count"] == 2
    assert not report["passed"]
    assert report["tags"]["stub"]["cases"] == 2
    assert report["tags"]["stub"]["max_error"] == pytest.approx(1e-10, abs=1e-15)
    assert [r["passed"] for r in report["results"]] == [True, False]


def test_library_errors_fail_the_case(monkeypatch):
    monkeypatch.setitem(ORACLES, "broken", StubOracle(error=StepFailure("diverged", details={"t": 0.5})))
    result = OracleHarness().run_case(OracleCase("broken", "broken", 1.0))
    assert not result.passed
    assert math.isinf(result.max_error)
    assert result.error == "diverged"


def test_empty_oracle_output_fails(monkeypatch):
    monkeypatch.setitem(ORACLES, "silent", StubOracle())
    assert not OracleHarness().run_case(OracleCase("silent", "silent", 1.0)).passed


def test_seed_offset_changes_the_stream(stub):
    case = OracleCase("seeded", "stub", 1.0, seed=5)
    OracleHarness().run_case(case)
    OracleHarness(seed=0).run_case(case)
    OracleHarness(seed=3).run_case(case)
    assert stub.draws[0] == stub.draws[1]
    assert stub.draws[2] != stub.draws[0]


def test_selection_errors(stub):
    harness = OracleHarness([OracleCase("only", "stub", 1.0)])
    with pytest.raises(ScenarioValidationError):
        harness.select(["no-such-tag"])
    with pytest.raises(ScenarioValidationError):
        harness.select(["eg1"])
    assert [case.case_id for case in harness.select(["stub"])] == ["only"]


def test_unknown_tags_are_rejected_on_load(tmp_path):
    path = tmp_path / "cases.json"
    path.write_text(json.dumps({"oracle_cases": [{"tag": "made-up", "tolerance": 1.0}]}))
    with pytest.raises(ScenarioValidationError):
        OracleHarness().load_cases_from_file(path)
    with pytest.raises(FileNotFoundError):
        OracleHarness().load_cases_from_file(tmp_path / "missing.json")
    with pytest.raises(ScenarioValidationError):
        OracleHarness().add_case(OracleCase("x", "made-up", 1.0))


def test_cases_file_round_trip(tmp_path, stub):
    path = tmp_path / "cases.json"
    path.write_text(json.dumps({"oracle_cases": [{"case_id": "a", "tag": "stub", "tolerance": 1e-6, "seed": 4}]}))
    harness = OracleHarness()
    harness.load_cases_from_file(path)
    assert harness.cases == [OracleCase("a", "stub", 1e-6, seed=4)]

    report = harness.run_all(["stub"])
    saved = OracleHarness.save_results(report, tmp_path / "out" / "report.json")
    payload = json.loads(saved.read_text())
    assert payload["passed"] is True
    assert "timestamp" in payload


def test_real_commutation_oracles_pass():
    harness = OracleHarness()
    harness.load_default_cases()
    report = harness.run_all(["eg2", "eg3", "laz"])
    assert report["passed"], report["tags"]
    assert report["tags"]["eg2"]["law"] == "translation-composition"


def test_bundled_tags_are_the_equation_tags():
    harness = OracleHarness()
    harness.load_default_cases()
    assert {"stv", "eg1", "eg2", "eg3", "phg", "ph6", "fif", "fund"} <= set(harness.tags)
    assert set(LAWS) == set(ORACLES)
    assert all(case.description.startswith(LAWS[case.tag]) for case in harness.cases)


@pytest.mark.parametrize("tag", ["stv", "eg1", "phg"])
def test_bundled_cases_draw_fifty_trials_per_law(tag):
    harness = OracleHarness()
    harness.load_default_cases()
    assert all(case.params["trials"] >= 50 for case in harness.select([tag]))
