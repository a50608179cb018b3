"""Custom exception hierarchy for the phase toolkit."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Optional

EXIT_OK = 0
EXIT_NUMERICAL_FAILURE = 1
EXIT_VALIDATION = 2


@dataclass(eq=False)
class PhaseToolkitError(Exception):
    """Base class for toolkit errors with structured payloads."""

    message: str
    details: Optional[Dict[str, Any]] = None

    error_code: ClassVar[str] = "phasetk_error"
    exit_code: ClassVar[int] = EXIT_NUMERICAL_FAILURE

    def __post_init__(self) -> None:
        super().__init__(self.message)

    def __str__(self) -> str:
        base = f"[{self.error_code}] {self.message}"
        if self.details:
            return f"{base} :: {self.details}"
        return base


class DimensionMismatch(PhaseToolkitError, ValueError):
    """Raised when vectors or matrices have incompatible shapes."""

    error_code = "dimension_mismatch"
    exit_code = EXIT_VALIDATION


class NotSymplectic(PhaseToolkitError, ValueError):
    """Raised when a matrix fails the symplectic test at the configured tolerance."""

    error_code = "not_symplectic"
    exit_code = EXIT_VALIDATION


class FreeConditionViolated(PhaseToolkitError):
    """Raised when a symplectic matrix has a singular upper-right block."""

    error_code = "free_condition_violated"


class NotLagrangian(PhaseToolkitError, ValueError):
    """Raised when the symplectic form does not vanish on a manifold's tangent spaces."""

    error_code = "not_lagrangian"
    exit_code = EXIT_VALIDATION


class DomainViolation(PhaseToolkitError, ValueError):
    """Raised when a parameter path leaves the manifold's domain."""

    error_code = "domain_violation"


class TopologyError(PhaseToolkitError, ValueError):
    """Raised when a loop class does not fit the manifold's periodic axes."""

    error_code = "topology_error"
    exit_code = EXIT_VALIDATION


class CausticAtPoint(PhaseToolkitError):
    """Raised when the projection to position space is singular at the requested point."""

    error_code = "caustic_at_point"


class NonGenericCaustic(PhaseToolkitError):
    """Raised when a loop meets the caustic non-transversally."""

    error_code = "non_generic_caustic"


class QuadratureNotConverged(PhaseToolkitError):
    """Raised when interval halving exhausts its budget before meeting tolerance."""

    error_code = "quadrature_not_converged"


class StepFailure(PhaseToolkitError):
    """Raised when the implicit solve of an integrator step does not converge."""

    error_code = "step_failure"

    @property
    def time(self) -> Optional[float]:
        return (self.details or {}).get("t")


class ScenarioValidationError(PhaseToolkitError, ValueError):
    """Raised when a scenario file fails to parse or validate."""

    error_code = "scenario_invalid"
    exit_code = EXIT_VALIDATION

    @property
    def field(self) -> Optional[str]:
        return (self.details or {}).get("field")

    @property
    def line(self) -> Optional[int]:
        return (self.details or {}).get("line")


__all__ = [
    "EXIT_OK",
    "EXIT_NUMERICAL_FAILURE",
    "EXIT_VALIDATION",
    "PhaseToolkitError",
    "DimensionMismatch",
    "NotSymplectic",
    "NotLagrangian",
    "FreeConditionViolated",
    "DomainViolation",
    "TopologyError",
    "CausticAtPoint",
    "NonGenericCaustic",
    "QuadratureNotConverged",
    "StepFailure",
    "ScenarioValidationError",
]
