"""Built-in Hamiltonians."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from phasetk.core.exceptions import DimensionMismatch
from phasetk.dynamics.curves import CurveSpec
from phasetk.dynamics.hamiltonian import Hamiltonian
from phasetk.symplectic.linear import PhasePoint


def free_particle(n: int = 1, mass: float = 1.0) -> Hamiltonian:
    """H = |p|² / 2m."""

    def H(z, t):
        return 0.5 * np.sum(z[..., n:] ** 2, axis=-1) / mass

    def grad(z, t):
        return np.concatenate([np.zeros_like(z[..., :n]), z[..., n:] / mass], axis=-1)

    hess = np.zeros((2 * n, 2 * n))
    hess[n:, n:] = np.eye(n) / mass
    return Hamiltonian(
        n, H, grad, lambda z, t: hess, quadratic_homogeneous=True, separable=True, name="free"
    )


def harmonic_oscillator(n: int = 1, omega: float = 1.0, mass: float = 1.0) -> Hamiltonian:
    """H = |p|²/2m + mω²|x|²/2."""

    k = mass * omega**2

    def H(z, t):
        return 0.5 * np.sum(z[..., n:] ** 2, axis=-1) / mass + 0.5 * k * np.sum(z[..., :n] ** 2, axis=-1)

    def grad(z, t):
        return np.concatenate([k * z[..., :n], z[..., n:] / mass], axis=-1)

    hess = np.diag(np.concatenate([np.full(n, k), np.full(n, 1.0 / mass)]))
    return Hamiltonian(
        n, H, grad, lambda z, t: hess, quadratic_homogeneous=True, separable=True, name="harmonic"
    )


def quadratic(Q: Union[Sequence[Sequence[float]], np.ndarray]) -> Hamiltonian:
    """H = ½ zᵀQz for a symmetric 2n×2n matrix Q."""

    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.shape[0] != Q.shape[1] or Q.shape[0] % 2:
        raise DimensionMismatch("Q must be a square matrix of even size", details={"shape": Q.shape})
    Q = 0.5 * (Q + Q.T)
    n = Q.shape[0] // 2
    separable = bool(np.allclose(Q[:n, n:], 0.0))
    return Hamiltonian(
        n,
        lambda z, t: 0.5 * np.einsum("...i,ij,...j->...", z, Q, z),
        lambda z, t: z @ Q,
        lambda z, t: Q,
        quadratic_homogeneous=True,
        separable=separable,
        name="quadratic",
    )


def translation(z_a: PhasePoint) -> Hamiltonian:
    """H^a(z) = σ(z, z_a) = p·x_a − p_a·x, whose time-one flow is z ↦ z + z_a."""

    n = z_a.n
    gradient = np.concatenate([-z_a.p, z_a.x])

    def H(z, t):
        return z[..., n:] @ z_a.x - z[..., :n] @ z_a.p

    return Hamiltonian(
        n,
        H,
        lambda z, t: np.broadcast_to(gradient, z.shape),
        lambda z, t: np.zeros((2 * n, 2 * n)),
        separable=True,
        name="translation",
    )


def displacement(curve: CurveSpec) -> Hamiltonian:
    """H^γ(z, t) = σ(z, γ̇(t)); its flow rigidly translates by γ(t) − γ(t₀)."""

    n = curve.n

    def H(z, t):
        rate = curve.velocity(np.array([t]))[0]
        return z[..., n:] @ rate[:n] - z[..., :n] @ rate[n:]

    def grad(z, t):
        rate = curve.velocity(np.array([t]))[0]
        return np.broadcast_to(np.concatenate([-rate[n:], rate[:n]]), z.shape)

    return Hamiltonian(
        n,
        H,
        grad,
        lambda z, t: np.zeros((2 * n, 2 * n)),
        time_independent=False,
        separable=True,
        name="displacement",
    )


def anharmonic(n: int = 1, quartic: float = 0.25) -> Hamiltonian:
    """H = ½|p|² + c Σ xⱼ⁴ with c = ¼ by default."""

    def H(z, t):
        return 0.5 * np.sum(z[..., n:] ** 2, axis=-1) + quartic * np.sum(z[..., :n] ** 4, axis=-1)

    def grad(z, t):
        return np.concatenate([4.0 * quartic * z[..., :n] ** 3, z[..., n:]], axis=-1)

    def hess(z, t):
        diag = np.concatenate([12.0 * quartic * z[..., :n] ** 2, np.ones_like(z[..., n:])], axis=-1)
        return diag[..., :, None] * np.eye(2 * n)

    return Hamiltonian(n, H, grad, hess, separable=True, name="anharmonic")


BUILTIN_HAMILTONIANS = {
    "free": free_particle,
    "harmonic": harmonic_oscillator,
    "quadratic": quadratic,
    "translation": translation,
    "displacement": displacement,
    "anharmonic": anharmonic,
}


__all__ = [
    "free_particle",
    "harmonic_oscillator",
    "quadratic",
    "translation",
    "displacement",
    "anharmonic",
    "BUILTIN_HAMILTONIANS",
]
