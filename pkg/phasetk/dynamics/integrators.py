"""Symplectic one-step methods with co-integrated Poincaré–Cartan action.

Every step returns the new batch of phase vectors together with the action
increment ∫ p dx − H dt over the step, computed on the method's own stage
points so that both have the same order.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from phasetk.core.config import INTEGRATORS, normalise_integrator, settings
from phasetk.core.exceptions import StepFailure
from phasetk.core.observability import get_logger
from phasetk.dynamics.hamiltonian import Hamiltonian

logger = get_logger(__name__)


class Integrator(ABC):
    name: str
    order: int

    @abstractmethod
    def step(self, H: Hamiltonian, z: np.ndarray, t: float, h: float) -> tuple[np.ndarray, np.ndarray]:
        """Advance an (m, 2n) batch from t to t + h; returns (z_next, action_increment)."""


class ImplicitRungeKutta(Integrator):
    """Collocation Runge–Kutta method solved by batched Newton iteration on the stage values."""

    def __init__(
        self,
        name: str,
        order: int,
        a: np.ndarray,
        b: np.ndarray,
        c: np.ndarray,
        newton_tol: Optional[float] = None,
        newton_max_iter: Optional[int] = None,
    ) -> None:
        self.name = name
        self.order = order
        self.a = np.atleast_2d(np.asarray(a, dtype=float))
        self.b = np.asarray(b, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.newton_tol = settings.NEWTON_TOL if newton_tol is None else newton_tol
        self.newton_max_iter = settings.NEWTON_MAX_ITER if newton_max_iter is None else newton_max_iter

    @property
    def stages(self) -> int:
        return self.b.size

    def _field(self, H: Hamiltonian, Z: np.ndarray, t: float, h: float) -> np.ndarray:
        return np.stack([H.vector_field(Z[:, i], t + self.c[i] * h) for i in range(self.stages)], axis=1)

    def _solve_stages(self, H: Hamiltonian, z: np.ndarray, t: float, h: float) -> np.ndarray:
        m, d = z.shape
        s = self.stages
        X0 = H.vector_field(z, t)
        Z = z[:, None, :] + (self.c[None, :, None] * h) * X0[:, None, :]
        eye = np.eye(s * d)
        for _ in range(self.newton_max_iter):
            X = self._field(H, Z, t, h)
            residual = Z - z[:, None, :] - h * np.einsum("ij,mjd->mid", self.a, X)
            DX = np.stack([H.vector_field_jacobian(Z[:, i], t + self.c[i] * h) for i in range(s)], axis=1)
            # block (i, j) of the Newton matrix is δ_ij I − h a_ij DX_j
            blocks = -h * self.a[None, :, :, None, None] * DX[:, None, :, :, :]
            jac = eye[None] + blocks.transpose(0, 1, 3, 2, 4).reshape(m, s * d, s * d)
            try:
                delta = np.linalg.solve(jac, residual.reshape(m, s * d, 1))[..., 0].reshape(m, s, d)
            except np.linalg.LinAlgError as exc:
                logger.warning("integrator.singular_newton_matrix", method=self.name, t=t)
                raise StepFailure(f"{self.name} Newton matrix is singular", details={"t": t}) from exc
            Z = Z - delta
            scale = 1.0 + float(np.max(np.abs(Z)))
            if not np.all(np.isfinite(Z)):
                break
            if float(np.max(np.abs(delta))) <= self.newton_tol * scale:
                return Z
        logger.warning("integrator.newton_not_converged", method=self.name, t=t, iterations=self.newton_max_iter)
        raise StepFailure(
            f"{self.name} implicit solve did not converge",
            details={"t": t, "h": h, "max_iter": self.newton_max_iter},
        )

    def step(self, H: Hamiltonian, z: np.ndarray, t: float, h: float) -> tuple[np.ndarray, np.ndarray]:
        n = H.n
        Z = self._solve_stages(H, z, t, h)
        K = self._field(H, Z, t, h)
        z_next = z + h * np.einsum("i,mid->md", self.b, K)
        lagrangian = np.stack(
            [
                np.sum(Z[:, i, n:] * K[:, i, :n], axis=-1) - H.value(Z[:, i], t + self.c[i] * h)
                for i in range(self.stages)
            ],
            axis=1,
        )
        return z_next, h * lagrangian @ self.b


def implicit_midpoint(**kwargs) -> ImplicitRungeKutta:
    return ImplicitRungeKutta("midpoint", 2, [[0.5]], [1.0], [0.5], **kwargs)


def gauss_legendre4(**kwargs) -> ImplicitRungeKutta:
    """Two-stage Gauss–Legendre collocation, symplectic and fourth order."""

    r = math.sqrt(3.0) / 6.0
    return ImplicitRungeKutta(
        "gauss4",
        4,
        [[0.25, 0.25 - r], [0.25 + r, 0.25]],
        [0.5, 0.5],
        [0.5 - r, 0.5 + r],
        **kwargs,
    )


class StormerVerlet(Integrator):
    """Kick–drift–kick Störmer–Verlet for separable H = T(p) + V(x)."""

    name = "verlet"
    order = 2

    def step(self, H: Hamiltonian, z: np.ndarray, t: float, h: float) -> tuple[np.ndarray, np.ndarray]:
        if not H.separable:
            raise ValueError(f"Störmer–Verlet needs a separable Hamiltonian, got {H.name!r}")
        n = H.n
        x0, p0 = z[:, :n], z[:, n:]
        p_half = p0 - 0.5 * h * H.gradient(z, t)[:, :n]
        drift = np.concatenate([x0, p_half], axis=1)
        x1 = x0 + h * H.gradient(drift, t + 0.5 * h)[:, n:]
        landed = np.concatenate([x1, p_half], axis=1)
        p1 = p_half - 0.5 * h * H.gradient(landed, t + h)[:, :n]
        action = np.sum(p_half * (x1 - x0), axis=-1) - 0.5 * h * (H.value(drift, t) + H.value(landed, t + h))
        return np.concatenate([x1, p1], axis=1), action


def get_integrator(name: Optional[str] = None, H: Optional[Hamiltonian] = None) -> Integrator:
    """Integrator by name.

    ``None`` selects PTK_INTEGRATOR when it is set, else Störmer–Verlet for a
    separable ``H`` and implicit midpoint for anything else.
    """

    key = settings.INTEGRATOR if name is None else normalise_integrator(name)
    if key is None:
        key = "verlet" if H is not None and H.separable else "midpoint"
    if key == "midpoint":
        return implicit_midpoint()
    if key == "gauss4":
        return gauss_legendre4()
    if key == "verlet":
        return StormerVerlet()
    raise ValueError(f"unknown integrator {name!r}; expected one of {', '.join(INTEGRATORS)}")


__all__ = [
    "Integrator",
    "ImplicitRungeKutta",
    "StormerVerlet",
    "implicit_midpoint",
    "gauss_legendre4",
    "get_integrator",
]
