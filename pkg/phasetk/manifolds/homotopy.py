"""Points of the universal cover and loop classes for product-periodic manifolds.

A point of the cover is stored as a lifted parameter path starting at the
manifold's base parameter. Its homotopy class is fully described by the
endpoint reduced to [0, 2π) on periodic axes together with the winding vector
(number of net 2π crossings per periodic axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from phasetk.core.exceptions import DimensionMismatch, DomainViolation, TopologyError
from phasetk.core.observability import get_logger
from phasetk.manifolds.base import TWO_PI, LagrangianManifold
from phasetk.symplectic.linear import PhasePoint

logger = get_logger(__name__)


def _windings_of(manifold: LagrangianManifold, lift: np.ndarray) -> tuple[int, ...]:
    return tuple(int(np.floor(lift[axis] / TWO_PI)) for axis in manifold.periodic_axes)


@dataclass(frozen=True)
class LoopClass:
    """Free homotopy class of a loop, one winding number per periodic axis."""

    windings: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "windings", tuple(int(w) for w in self.windings))

    @classmethod
    def trivial(cls, manifold: LagrangianManifold) -> "LoopClass":
        return cls((0,) * manifold.n_periodic)

    @classmethod
    def generators(cls, manifold: LagrangianManifold) -> list["LoopClass"]:
        """Unit loops around each periodic axis."""

        k = manifold.n_periodic
        return [cls(tuple(int(i == j) for j in range(k))) for i in range(k)]

    @property
    def is_trivial(self) -> bool:
        return not any(self.windings)

    def __add__(self, other: "LoopClass") -> "LoopClass":
        if len(self.windings) != len(other.windings):
            raise DimensionMismatch("loop classes have different winding lengths")
        return LoopClass(tuple(a + b for a, b in zip(self.windings, other.windings)))

    def __neg__(self) -> "LoopClass":
        return LoopClass(tuple(-w for w in self.windings))

    def shift(self, manifold: LagrangianManifold) -> np.ndarray:
        """Lifted parameter displacement realizing the loop on ``manifold``."""

        if manifold.n_periodic == 0:
            if self.is_trivial:
                return np.zeros(manifold.n)
            raise TopologyError(
                "manifold has no periodic axes; only the trivial loop exists",
                details={"windings": self.windings},
            )
        if len(self.windings) != manifold.n_periodic:
            raise TopologyError(
                "winding vector does not match the manifold's periodic axes",
                details={"windings": self.windings, "periodic_axes": manifold.periodic_axes},
            )
        return manifold.winding_shift(self.windings)


@dataclass(frozen=True, eq=False)
class HomotopyPoint:
    """A point ž of the universal cover, realized by a lifted parameter polyline."""

    manifold: LagrangianManifold = field(repr=False)
    path: np.ndarray

    def __post_init__(self) -> None:
        path = np.atleast_2d(np.array(self.path, dtype=float))
        n = self.manifold.n
        if path.ndim != 2 or path.shape[1] != n:
            raise DimensionMismatch("path must have shape (k, n)", details={"shape": path.shape, "n": n})
        if not np.allclose(path[0], self.manifold.base, rtol=0.0, atol=1e-12):
            path = np.vstack([self.manifold.base, path])
        if not np.all(np.isfinite(path)):
            raise ValueError("path entries must be finite")
        path.setflags(write=False)
        object.__setattr__(self, "path", path)

    @classmethod
    def on(
        cls,
        manifold: LagrangianManifold,
        endpoint: Sequence[float],
        windings: Optional[Sequence[int]] = None,
    ) -> "HomotopyPoint":
        """Straight lifted path from the base point to ``endpoint + 2π·windings``."""

        endpoint_arr = np.array(endpoint, dtype=float).reshape(manifold.n)
        if windings is None:
            windings = (0,) * manifold.n_periodic
        lift = endpoint_arr + LoopClass(tuple(windings)).shift(manifold)
        return cls(manifold, np.vstack([manifold.base, lift]))

    @classmethod
    def base(cls, manifold: LagrangianManifold) -> "HomotopyPoint":
        return cls(manifold, manifold.base[None, :])

    @property
    def lift(self) -> np.ndarray:
        return self.path[-1]

    @property
    def windings(self) -> tuple[int, ...]:
        return _windings_of(self.manifold, self.lift)

    @property
    def endpoint(self) -> np.ndarray:
        """Endpoint reduced to [0, 2π) on the periodic axes."""

        reduced = self.lift.copy()
        for axis in self.manifold.periodic_axes:
            reduced[axis] = np.mod(reduced[axis], TWO_PI)
        return reduced

    def point(self) -> PhasePoint:
        return self.manifold.embed(self.lift)

    def extended(self, lifted_points: np.ndarray) -> "HomotopyPoint":
        """Append lifted parameter samples to the representative path."""

        lifted = np.atleast_2d(np.asarray(lifted_points, dtype=float))
        return HomotopyPoint(self.manifold, np.vstack([self.path, lifted]))

    def looped(self, loop: LoopClass) -> "HomotopyPoint":
        """γ̌ž: traverse ``loop`` at the base point, then the path of ž."""

        return HomotopyPoint(self.manifold, self.path + loop.shift(self.manifold))

    def straightened(self) -> "HomotopyPoint":
        """Homotopic representative with a single straight lifted segment."""

        return HomotopyPoint(self.manifold, np.vstack([self.manifold.base, self.lift]))

    def __repr__(self) -> str:
        return (
            f"HomotopyPoint(manifold={self.manifold!r}, endpoint={self.endpoint.tolist()}, "
            f"windings={self.windings})"
        )


def lift_path(
    manifold: LagrangianManifold,
    start: Sequence[float],
    points: np.ndarray,
    tol: float = 1e-10,
) -> np.ndarray:
    """Lift phase-space samples lying on the manifold to a continuous parameter path.

    Each sample is located by a least-squares solve of ψ(θ) = z started from the
    previous parameter, so the result follows the samples continuously through
    periodic axes. Raises DomainViolation when a sample sits further than
    ``tol`` (relative to the sample scale) from the manifold.
    """

    samples = np.atleast_2d(np.asarray(points, dtype=float))
    theta = np.array(start, dtype=float).reshape(manifold.n)
    lifted = np.empty((samples.shape[0], manifold.n))
    worst, worst_index = 0.0, 0
    for k, target in enumerate(samples):
        solution = least_squares(
            lambda th: manifold.embed_many(th[None, :])[0] - target,
            theta,
            jac=lambda th: manifold.jacobians_many(th[None, :])[0],
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        theta = solution.x
        lifted[k] = theta
        residual = float(np.max(np.abs(solution.fun)))
        if residual > worst:
            worst, worst_index = residual, k
    bound = tol * max(1.0, float(np.max(np.abs(samples))))
    if worst > bound:
        logger.warning("manifold.lift_residual", residual=worst, tol=tol, sample=worst_index)
        raise DomainViolation(
            "samples do not lie on the manifold",
            details={"residual": worst, "tol": bound, "sample": worst_index},
        )
    return lifted


__all__ = ["LoopClass", "HomotopyPoint", "lift_path"]
