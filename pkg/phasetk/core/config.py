"""
Configuration management for the phase toolkit.

This module centralizes environment-driven configuration using Pydantic's
`BaseSettings`. Every numerical module reads its default tolerances from the
shared `settings` instance; explicit keyword arguments always win.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field, PositiveFloat, PositiveInt, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

INTEGRATORS = ("midpoint", "gauss4", "verlet")
_INTEGRATOR_ALIASES = {
    "midpoint": "midpoint",
    "implicitmidpoint": "midpoint",
    "gauss4": "gauss4",
    "gausslegendre": "gauss4",
    "verlet": "verlet",
    "stormerverlet": "verlet",
}


def normalise_integrator(value: str) -> str:
    """Canonical integrator name for user spellings like 'Gauss-Legendre'."""

    name = str(value).strip().lower().replace("-", "").replace("_", "")
    if name not in _INTEGRATOR_ALIASES:
        raise ValueError(f"unknown integrator {value!r}; expected one of {', '.join(INTEGRATORS)}")
    return _INTEGRATOR_ALIASES[name]


class Settings(BaseSettings):
    """Toolkit configuration sourced from environment variables prefixed with ``PTK_``."""

    model_config = SettingsConfigDict(
        env_prefix="PTK_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    APP_NAME: str = "phasetk"
    ENVIRONMENT: str = Field("development", pattern=r"^(development|ci|production)$")
    BASE_DIR: Path = Field(default_factory=lambda: Path(__file__).resolve().parents[2])
    OUTPUT_DIR: Path = Field(default_factory=lambda: Path("ptk-output"))

    # Linear symplectic algebra
    TOL_SYMP: PositiveFloat = 1e-9
    TOL_DET: PositiveFloat = 1e-12

    # Manifolds and quadrature
    TOL_LAG: PositiveFloat = 1e-8
    TOL_QUAD: PositiveFloat = 1e-9
    QUAD_MIN_INTERVALS: PositiveInt = 16
    QUAD_MAX_LEVEL: PositiveInt = 14
    TOL_CAUSTIC: PositiveFloat = 1e-8
    CAUSTIC_XTOL: PositiveFloat = 1e-12

    # Dynamics
    # unset picks verlet for separable Hamiltonians and midpoint otherwise
    INTEGRATOR: Optional[str] = None
    DEFAULT_STEPS: PositiveInt = 512
    NEWTON_TOL: PositiveFloat = 1e-12
    NEWTON_MAX_ITER: PositiveInt = 50
    TOL_INVARIANCE: PositiveFloat = 1e-7

    # Hamilton-Jacobi
    TOL_PDE: PositiveFloat = 1e-4

    # Semiclassical
    TOL_EBK: PositiveFloat = 1e-6
    MASLOV_SCAN_SAMPLES: PositiveInt = 256

    # Runtime
    THREADS: PositiveInt = 1
    DEFAULT_SEED: int = 2025
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "console"

    @field_validator("INTEGRATOR", mode="before")
    def _normalise_integrator(cls, value: Optional[str]) -> Optional[str]:
        if value is None or str(value).strip().lower() in {"", "auto"}:
            return None
        return normalise_integrator(value)

    @field_validator("LOG_FORMAT", mode="before")
    def _normalise_log_format(cls, value: str) -> str:
        fmt = str(value).strip().lower()
        if fmt not in {"console", "json"}:
            raise ValueError("LOG_FORMAT must be 'console' or 'json'")
        return fmt

    @field_validator("LOG_LEVEL", mode="before")
    def _normalise_log_level(cls, value: str) -> str:
        return str(value).strip().upper()

    def tolerances(self) -> dict[str, float]:
        """Numerical tolerances echoed into run manifests."""

        return {name.lower(): float(value) for name, value in self.model_dump().items() if name.startswith("TOL_")}


@lru_cache()
def get_settings() -> Settings:
    """Return a cached `Settings` instance."""

    return Settings()


# Singleton-style settings instance for modules that prefer direct access.
settings = get_settings()
