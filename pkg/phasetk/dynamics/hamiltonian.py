"""Hamiltonian functions on extended phase space.

Callables act on arrays of phase vectors with trailing axis 2n and a scalar
time, so the integrators can propagate whole batches of initial points at
once. Missing derivatives are filled in with central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from phasetk.core.exceptions import DimensionMismatch
from phasetk.core.observability import get_logger
from phasetk.utils.numerics import FD_STEP

logger = get_logger(__name__)

ScalarField = Callable[[np.ndarray, float], np.ndarray]
VectorField = Callable[[np.ndarray, float], np.ndarray]

EULER_TOL = 1e-8


def _fd_gradient(H: ScalarField, z: np.ndarray, t: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    grad = np.empty_like(z)
    h = FD_STEP * np.maximum(1.0, np.max(np.abs(z), axis=-1, keepdims=True))
    for k in range(z.shape[-1]):
        e = np.zeros(z.shape[-1])
        e[k] = 1.0
        step = h * e
        grad[..., k] = (
            -np.asarray(H(z + 2 * step, t))
            + 8 * np.asarray(H(z + step, t))
            - 8 * np.asarray(H(z - step, t))
            + np.asarray(H(z - 2 * step, t))
        ) / (12 * h[..., 0])
    return grad


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """H(z, t) on R²ⁿ with optional analytic gradient and Hessian.

    Flags:
      * ``time_independent``: H does not depend on t.
      * ``quadratic_homogeneous``: H(λz) = λ²H(z); checked at construction by
        the Euler identity z·∇H = 2H on random points.
      * ``separable``: H = T(p) + V(x), which enables Störmer–Verlet.
    """

    n: int
    H: ScalarField
    grad: Optional[VectorField] = None
    hess: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    time_independent: bool = True
    quadratic_homogeneous: bool = False
    separable: bool = False
    name: str = "hamiltonian"
    check_seed: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionMismatch("Hamiltonian dimension must be >= 1", details={"n": self.n})
        if self.quadratic_homogeneous:
            defect = self.euler_defect(np.random.default_rng(self.check_seed))
            if defect > EULER_TOL:
                raise ValueError(
                    f"Hamiltonian {self.name!r} is flagged quadratic homogeneous but z·∇H != 2H "
                    f"(defect {defect:.3e})"
                )

    def value(self, z: np.ndarray, t: float = 0.0) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != 2 * self.n:
            raise DimensionMismatch("phase vectors must have 2n components", details={"shape": z.shape, "n": self.n})
        return np.broadcast_to(np.asarray(self.H(z, t), dtype=float), z.shape[:-1])

    def __call__(self, z: np.ndarray, t: float = 0.0) -> np.ndarray:
        return self.value(z, t)

    def gradient(self, z: np.ndarray, t: float = 0.0) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.grad is not None:
            return np.broadcast_to(np.asarray(self.grad(z, t), dtype=float), z.shape)
        return _fd_gradient(self.value, z, t)

    def hessian(self, z: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Second derivatives, shape (..., 2n, 2n)."""

        z = np.asarray(z, dtype=float)
        if self.hess is not None:
            return np.broadcast_to(np.asarray(self.hess(z, t), dtype=float), z.shape + (z.shape[-1],))
        h = FD_STEP * np.maximum(1.0, np.max(np.abs(z), axis=-1, keepdims=True))
        columns = []
        for k in range(z.shape[-1]):
            step = np.zeros(z.shape[-1])
            step[k] = 1.0
            step = h * step
            columns.append((self.gradient(z + step, t) - self.gradient(z - step, t)) / (2 * h))
        hess = np.stack(columns, axis=-1)
        return 0.5 * (hess + np.swapaxes(hess, -1, -2))

    def vector_field(self, z: np.ndarray, t: float = 0.0) -> np.ndarray:
        """X_H = (∂H/∂p, −∂H/∂x)."""

        g = self.gradient(z, t)
        return np.concatenate([g[..., self.n :], -g[..., : self.n]], axis=-1)

    def vector_field_jacobian(self, z: np.ndarray, t: float = 0.0) -> np.ndarray:
        """∂X_H/∂z = J·Hess H, shape (..., 2n, 2n)."""

        hess = self.hessian(z, t)
        return np.concatenate([hess[..., self.n :, :], -hess[..., : self.n, :]], axis=-2)

    def euler_defect(self, rng: np.random.Generator, samples: int = 8) -> float:
        z = rng.normal(size=(samples, 2 * self.n))
        values = self.value(z, 0.0)
        lhs = np.sum(z * self.gradient(z, 0.0), axis=-1)
        return float(np.max(np.abs(lhs - 2.0 * values) / (1.0 + np.abs(values))))

    def __repr__(self) -> str:
        return f"Hamiltonian(name={self.name!r}, n={self.n})"


__all__ = ["Hamiltonian", "ScalarField", "VectorField"]
