from phasetk.core.exceptions import (
    EXIT_NUMERICAL_FAILURE,
    EXIT_VALIDATION,
    CausticAtPoint,
    DimensionMismatch,
    PhaseToolkitError,
    ScenarioValidationError,
    StepFailure,
)


def test_str_includes_code_and_details():
    exc = DimensionMismatch("shapes differ", details={"n": 2})
    assert str(exc) == "[dimension_mismatch] shapes differ :: {'n': 2}"
    assert isinstance(exc, ValueError)
    assert isinstance(exc, PhaseToolkitError)


def test_exit_codes_split_validation_from_numerics():
    assert ScenarioValidationError("bad").exit_code == EXIT_VALIDATION
    assert DimensionMismatch("bad").exit_code == EXIT_VALIDATION
    assert CausticAtPoint("singular").exit_code == EXIT_NUMERICAL_FAILURE
    assert StepFailure("diverged").exit_code == EXIT_NUMERICAL_FAILURE


def test_structured_accessors():
    assert StepFailure("diverged", details={"t": 0.25}).time == 0.25
    exc = ScenarioValidationError("missing", details={"field": "kind", "line": 3})
    assert exc.field == "kind"
    assert exc.line == 3
    assert ScenarioValidationError("missing").field is None
