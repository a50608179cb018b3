"""Lagrangian manifolds: parametrized immersions, exact graphs and product tori.

Every manifold is described by an immersion ψ of an n-dimensional parameter
space into phase space. Parameters on periodic axes have period 2π and are
always handled in lifted (unwrapped) form, so that a point of the universal
cover is simply a lifted parameter vector. All evaluation methods are batched
over the leading axis of an ``(m, n)`` array of parameters.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Any, Callable, Optional, Sequence

import numpy as np

from phasetk.core.config import settings
from phasetk.core.exceptions import DimensionMismatch, NotLagrangian
from phasetk.core.observability import get_logger
from phasetk.symplectic.linear import LagrangianPlane, PhasePoint
from phasetk.utils.numerics import batched_directional_derivative, central_gradient

logger = get_logger(__name__)

TWO_PI = 2.0 * math.pi

BatchMap = Callable[[np.ndarray], np.ndarray]


class LagrangianManifold(ABC):
    """Common interface of every manifold the toolkit can phase."""

    n: int
    periodic: tuple[bool, ...]
    base: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def _init_common(
        self,
        n: int,
        periodic: Sequence[bool],
        base: Optional[Sequence[float]],
        domain: Optional[tuple[Sequence[float], Sequence[float]]],
    ) -> None:
        if n < 1:
            raise DimensionMismatch("manifold dimension must be >= 1", details={"n": n})
        periodic = tuple(bool(flag) for flag in periodic)
        if len(periodic) != n:
            raise DimensionMismatch("periodic mask needs one entry per parameter axis", details={"n": n})
        base_arr = np.zeros(n) if base is None else np.array(base, dtype=float).reshape(n)
        if domain is None:
            lower, upper = np.full(n, -np.inf), np.full(n, np.inf)
        else:
            lower = np.array(domain[0], dtype=float).reshape(n)
            upper = np.array(domain[1], dtype=float).reshape(n)
        mask = np.array(periodic)
        lower[mask], upper[mask] = -np.inf, np.inf
        if np.any(base_arr[mask] < 0.0) or np.any(base_arr[mask] >= TWO_PI):
            raise ValueError("base parameter on periodic axes must lie in [0, 2π)")
        base_arr.setflags(write=False)
        self.n = n
        self.periodic = periodic
        self.base = base_arr
        self.lower = lower
        self.upper = upper

    # ------------------------------------------------------------------ geometry

    @abstractmethod
    def embed_many(self, thetas: np.ndarray) -> np.ndarray:
        """ψ on an (m, n) batch of parameters, returning (m, 2n) phase vectors."""

    def tangents_many(self, thetas: np.ndarray, directions: np.ndarray) -> np.ndarray:
        """Directional derivatives dψ(θ)·d for a batch, shape (m, 2n)."""

        return batched_directional_derivative(self.embed_many, thetas, directions)

    def position_tangents(self, thetas: np.ndarray, directions: np.ndarray) -> np.ndarray:
        return self.tangents_many(thetas, directions)[:, : self.n]

    def jacobians_many(self, thetas: np.ndarray) -> np.ndarray:
        """Full Jacobians ∂ψ/∂θ, shape (m, 2n, n)."""

        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        columns = []
        for axis in range(self.n):
            direction = np.zeros_like(thetas)
            direction[:, axis] = 1.0
            columns.append(self.tangents_many(thetas, direction))
        return np.stack(columns, axis=-1)

    def embed(self, theta: Sequence[float]) -> PhasePoint:
        return PhasePoint.from_vector(self.embed_many(np.reshape(np.asarray(theta, dtype=float), (1, self.n)))[0])

    def jacobian(self, theta: Sequence[float]) -> np.ndarray:
        return self.jacobians_many(np.reshape(np.asarray(theta, dtype=float), (1, self.n)))[0]

    # ---------------------------------------------------------------- topology

    @property
    def periodic_axes(self) -> tuple[int, ...]:
        return tuple(axis for axis, flag in enumerate(self.periodic) if flag)

    @property
    def n_periodic(self) -> int:
        return len(self.periodic_axes)

    @property
    def is_exact(self) -> bool:
        return False

    def winding_shift(self, windings: Sequence[int]) -> np.ndarray:
        """Parameter displacement 2π·w placed on the periodic axes."""

        windings = tuple(int(w) for w in windings)
        if len(windings) != self.n_periodic:
            raise DimensionMismatch(
                "winding vector needs one entry per periodic axis",
                details={"windings": windings, "periodic_axes": self.periodic_axes},
            )
        shift = np.zeros(self.n)
        for axis, winding in zip(self.periodic_axes, windings):
            shift[axis] = TWO_PI * winding
        return shift

    def contains_many(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        return np.all((thetas >= self.lower) & (thetas <= self.upper), axis=-1)

    # --------------------------------------------------------- Lagrangian test

    def sample_parameters(self, count: int, rng: np.random.Generator) -> np.ndarray:
        samples = np.empty((count, self.n))
        for axis in range(self.n):
            if self.periodic[axis]:
                samples[:, axis] = rng.uniform(0.0, TWO_PI, size=count)
            elif np.isfinite(self.lower[axis]) and np.isfinite(self.upper[axis]):
                samples[:, axis] = rng.uniform(self.lower[axis], self.upper[axis], size=count)
            else:
                low = self.lower[axis] if np.isfinite(self.lower[axis]) else self.base[axis] - 1.0
                high = self.upper[axis] if np.isfinite(self.upper[axis]) else self.base[axis] + 1.0
                samples[:, axis] = rng.uniform(low, high, size=count)
        return samples

    def pullback_defect(self, thetas: np.ndarray) -> np.ndarray:
        """max_{i<j} |σ(∂ᵢψ, ∂ⱼψ)| at each parameter, shape (m,)."""

        jac = self.jacobians_many(thetas)
        X, P = jac[:, : self.n, :], jac[:, self.n :, :]
        # σ(u_i, u_j) = p_i·x_j − p_j·x_i
        gram = np.einsum("mki,mkj->mij", P, X) - np.einsum("mki,mkj->mij", X, P)
        return np.max(np.abs(gram), axis=(1, 2))

    def check_lagrangian(self, samples: int = 100, tol: Optional[float] = None, seed: int = 0) -> bool:
        tol = settings.TOL_LAG if tol is None else tol
        thetas = self.sample_parameters(samples, np.random.default_rng(seed))
        defect = float(np.max(self.pullback_defect(thetas)))
        logger.debug("manifold.lagrangian_check", manifold=type(self).__name__, defect=defect, tol=tol)
        return defect <= tol

    def assert_lagrangian(self, samples: int = 32, tol: Optional[float] = None) -> None:
        if not self.check_lagrangian(samples, tol):
            raise NotLagrangian("σ does not vanish on the manifold's tangent spaces", details={"manifold": repr(self)})


class ParamManifold(LagrangianManifold):
    """Manifold given by an immersion ψ : Θ → R²ⁿ with optional 2π-periodic axes.

    ``psi`` must accept an (m, n) array and return (m, 2n); ``tangent`` (same
    batching, plus a direction array) is optional and defaults to fourth-order
    finite differences.
    """

    def __init__(
        self,
        n: int,
        psi: BatchMap,
        periodic: Sequence[bool],
        base: Optional[Sequence[float]] = None,
        domain: Optional[tuple[Sequence[float], Sequence[float]]] = None,
        tangent: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
        name: str = "param",
        validate: bool = True,
    ) -> None:
        self._init_common(n, periodic, base, domain)
        self._psi = psi
        self._tangent = tangent
        self.name = name
        if validate:
            self.assert_lagrangian()

    @classmethod
    def from_pointwise(
        cls, n: int, psi: Callable[[np.ndarray], Sequence[float]], periodic: Sequence[bool], **kwargs: Any
    ) -> "ParamManifold":
        def batched(thetas: np.ndarray) -> np.ndarray:
            return np.array([np.asarray(psi(theta), dtype=float) for theta in np.atleast_2d(thetas)])

        return cls(n, batched, periodic, **kwargs)

    def embed_many(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        out = np.asarray(self._psi(thetas), dtype=float)
        if out.shape != (thetas.shape[0], 2 * self.n):
            raise DimensionMismatch("ψ must return an (m, 2n) array", details={"shape": out.shape})
        return out

    def tangents_many(self, thetas: np.ndarray, directions: np.ndarray) -> np.ndarray:
        if self._tangent is None:
            return super().tangents_many(thetas, directions)
        return np.asarray(self._tangent(np.atleast_2d(thetas), np.atleast_2d(directions)), dtype=float)

    def __repr__(self) -> str:
        return f"ParamManifold(name={self.name!r}, n={self.n}, periodic={self.periodic})"


class TorusManifold(ParamManifold):
    """Product of planar circles x_j = R_j cos θ_j, p_j = R_j sin θ_j."""

    def __init__(self, radii: Sequence[float], base: Optional[Sequence[float]] = None) -> None:
        radii_arr = np.array(radii, dtype=float).reshape(-1)
        if radii_arr.size < 1 or np.any(radii_arr <= 0):
            raise ValueError("torus radii must be positive")
        self.radii = radii_arr
        n = radii_arr.size
        super().__init__(
            n,
            self._psi_torus,
            periodic=[True] * n,
            base=base,
            tangent=self._tangent_torus,
            name="torus" if n > 1 else "circle",
            validate=False,
        )

    def _psi_torus(self, thetas: np.ndarray) -> np.ndarray:
        return np.hstack([self.radii * np.cos(thetas), self.radii * np.sin(thetas)])

    def _tangent_torus(self, thetas: np.ndarray, directions: np.ndarray) -> np.ndarray:
        return np.hstack([-self.radii * np.sin(thetas) * directions, self.radii * np.cos(thetas) * directions])

    def __repr__(self) -> str:
        return f"TorusManifold(radii={self.radii.tolist()})"


class CircleManifold(TorusManifold):
    """The circle x = R cos θ, p = R sin θ (the n = 1 torus)."""

    def __init__(self, radius: float = 1.0, base: float = 0.0) -> None:
        super().__init__([radius], base=[base])

    @property
    def radius(self) -> float:
        return float(self.radii[0])

    def __repr__(self) -> str:
        return f"CircleManifold(radius={self.radius})"


class PlaneManifold(ParamManifold):
    """A Lagrangian plane {Ax + Bp = 0} parametrized linearly by its kernel basis."""

    def __init__(self, plane: LagrangianPlane, tol: Optional[float] = None) -> None:
        if not plane.is_lagrangian(tol):
            raise NotLagrangian("the plane is not Lagrangian", details={"A": plane.A.tolist(), "B": plane.B.tolist()})
        self.plane = plane
        self.basis = plane.kernel_basis(tol)
        super().__init__(
            plane.n,
            lambda thetas: thetas @ self.basis.T,
            periodic=[False] * plane.n,
            tangent=lambda thetas, directions: directions @ self.basis.T,
            name="linear-plane",
            validate=False,
        )

    def __repr__(self) -> str:
        return f"PlaneManifold(A={self.plane.A.tolist()}, B={self.plane.B.tolist()})"


class ExactManifold(LagrangianManifold):
    """Graph p = ∇Φ(x) of a generating function; the parameters are the positions.

    ``phi`` and ``grad`` act on single points unless ``vectorized`` is true,
    in which case they take (m, n) arrays. Without ``grad`` the gradient is a
    fourth-order central difference of ``phi``.
    """

    def __init__(
        self,
        n: int,
        phi: Callable[[np.ndarray], float],
        grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        domain: Optional[tuple[Sequence[float], Sequence[float]]] = None,
        base: Optional[Sequence[float]] = None,
        vectorized: bool = False,
        name: str = "exact",
    ) -> None:
        self._init_common(n, [False] * n, base, domain)
        self._phi = phi
        self._grad = grad
        self._vectorized = vectorized
        self.name = name

    @property
    def is_exact(self) -> bool:
        return True

    def potential_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if self._vectorized:
            return np.asarray(self._phi(xs), dtype=float).reshape(xs.shape[0])
        return np.array([float(self._phi(x)) for x in xs])

    def gradient_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if self._grad is None:
            return np.array([central_gradient(lambda y: float(self.potential_many(y[None, :])[0]), x) for x in xs])
        if self._vectorized:
            return np.asarray(self._grad(xs), dtype=float).reshape(xs.shape)
        return np.array([np.asarray(self._grad(x), dtype=float).reshape(self.n) for x in xs])

    def potential(self, x: Sequence[float]) -> float:
        return float(self.potential_many(np.reshape(np.asarray(x, dtype=float), (1, self.n)))[0])

    def embed_many(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        return np.hstack([thetas, self.gradient_many(thetas)])

    def tangents_many(self, thetas: np.ndarray, directions: np.ndarray) -> np.ndarray:
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        momentum = batched_directional_derivative(self.gradient_many, thetas, directions)
        return np.hstack([directions, momentum])

    def position_tangents(self, thetas: np.ndarray, directions: np.ndarray) -> np.ndarray:
        return np.atleast_2d(np.asarray(directions, dtype=float))

    def __repr__(self) -> str:
        return f"ExactManifold(name={self.name!r}, n={self.n})"


class QuadraticGraphManifold(ExactManifold):
    """The Lagrangian plane p = Mx with Φ(x) = ½Mx·x (M symmetric)."""

    def __init__(self, M: Sequence[Sequence[float]] | float, tol: Optional[float] = None) -> None:
        matrix = np.atleast_2d(np.asarray(M, dtype=float))
        tol = settings.TOL_SYMP if tol is None else tol
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch("M must be square", details={"shape": matrix.shape})
        if np.max(np.abs(matrix - matrix.T)) > tol * max(1.0, float(np.max(np.abs(matrix)))):
            raise NotLagrangian("the graph of a non-symmetric matrix is not Lagrangian", details={"M": matrix.tolist()})
        self.matrix = 0.5 * (matrix + matrix.T)
        super().__init__(
            self.matrix.shape[0],
            phi=lambda xs: 0.5 * np.einsum("mi,ij,mj->m", xs, self.matrix, xs),
            grad=lambda xs: xs @ self.matrix.T,
            vectorized=True,
            name="quadratic-graph",
        )

    def tangents_many(self, thetas: np.ndarray, directions: np.ndarray) -> np.ndarray:
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        return np.hstack([directions, directions @ self.matrix.T])

    def __repr__(self) -> str:
        return f"QuadraticGraphManifold(M={self.matrix.tolist()})"


__all__ = [
    "TWO_PI",
    "LagrangianManifold",
    "ParamManifold",
    "TorusManifold",
    "CircleManifold",
    "PlaneManifold",
    "ExactManifold",
    "QuadraticGraphManifold",
]
