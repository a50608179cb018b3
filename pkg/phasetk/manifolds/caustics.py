"""Caustics: parameters where a manifold stops projecting diffeomorphically onto position space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from phasetk.core.config import settings
from phasetk.core.observability import get_logger
from phasetk.manifolds.base import TWO_PI, ExactManifold, LagrangianManifold

logger = get_logger(__name__)

GridLike = Union[int, Sequence[Sequence[float]]]


def projection_determinant(manifold: LagrangianManifold, thetas: np.ndarray) -> np.ndarray:
    """det(∂x/∂θ) divided by the lengths of the tangent vectors ∂ψ/∂θⱼ.

    The normalization makes the value scale free and bounded by one in
    magnitude; it vanishes exactly on the caustic.
    """

    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if isinstance(manifold, ExactManifold):
        return np.ones(thetas.shape[0])
    jac = manifold.jacobians_many(thetas)
    det = np.linalg.det(jac[:, : manifold.n, :])
    norms = np.prod(np.linalg.norm(jac, axis=1), axis=-1)
    return det / np.where(norms > 0, norms, 1.0)


@dataclass(frozen=True)
class CausticSet:
    """Caustic parameters found on a scan grid (rows of ``points``)."""

    points: np.ndarray
    grid: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    def axis_values(self, axis: int, decimals: int = 9) -> np.ndarray:
        """Distinct caustic coordinates along ``axis`` (useful for product manifolds)."""

        if self.is_empty:
            return np.empty(0)
        return np.unique(np.round(self.points[:, axis], decimals))

    def contains(self, theta: Sequence[float], atol: float = 1e-8) -> bool:
        if self.is_empty:
            return False
        theta = np.asarray(theta, dtype=float)
        return bool(np.any(np.all(np.abs(self.points - theta) <= atol, axis=1)))


def _scan_grid(manifold: LagrangianManifold, grid: GridLike) -> tuple[np.ndarray, ...]:
    if isinstance(grid, int):
        axes = []
        for axis in range(manifold.n):
            if manifold.periodic[axis]:
                axes.append(np.linspace(0.0, TWO_PI, grid, endpoint=False))
            else:
                low = manifold.lower[axis] if np.isfinite(manifold.lower[axis]) else manifold.base[axis] - 1.0
                high = manifold.upper[axis] if np.isfinite(manifold.upper[axis]) else manifold.base[axis] + 1.0
                axes.append(np.linspace(low, high, grid))
        return tuple(axes)
    axes = tuple(np.asarray(values, dtype=float) for values in grid)
    if len(axes) != manifold.n:
        raise ValueError("scan grid needs one axis per parameter")
    return axes


def caustic_points(
    manifold: LagrangianManifold,
    grid: GridLike = 64,
    tol_caustic: Optional[float] = None,
    xtol: Optional[float] = None,
) -> CausticSet:
    """Scan a tensor grid of parameters for caustics.

    Nodes with |det| below ``tol_caustic`` are reported directly; sign changes
    of the normalized determinant between neighbouring nodes (cyclically on
    periodic axes spanning a full period) are refined by bracketing to ``xtol``.
    """

    tol_caustic = settings.TOL_CAUSTIC if tol_caustic is None else tol_caustic
    xtol = settings.CAUSTIC_XTOL if xtol is None else xtol
    axes = _scan_grid(manifold, grid)
    if isinstance(manifold, ExactManifold):
        return CausticSet(points=np.empty((0, manifold.n)), grid=axes)

    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    shape = mesh.shape[:-1]
    det = projection_determinant(manifold, mesh.reshape(-1, manifold.n)).reshape(shape)

    found = [mesh[np.abs(det) < tol_caustic]]
    for axis in range(manifold.n):
        values = axes[axis]
        full_period = values.size > 1 and np.isclose(values[-1] + (values[1] - values[0]), values[0] + TWO_PI)
        wrap = manifold.periodic[axis] and full_period
        upper = np.roll(det, -1, axis=axis)
        crossing = det * upper < 0
        if not wrap:
            index = [slice(None)] * manifold.n
            index[axis] = -1
            crossing[tuple(index)] = False
        for node in zip(*np.nonzero(crossing)):
            start = mesh[node]
            k = node[axis]
            stop = values[k + 1] if k + 1 < values.size else values[0] + TWO_PI

            def along(s: float, start: np.ndarray = start) -> float:
                theta = start.copy()
                theta[axis] = s
                return float(projection_determinant(manifold, theta[None, :])[0])

            root_value = brentq(along, values[k], stop, xtol=xtol)
            point = start.copy()
            point[axis] = np.mod(root_value, TWO_PI) if manifold.periodic[axis] else root_value
            found.append(point[None, :])

    points = np.vstack(found) if found else np.empty((0, manifold.n))
    if points.shape[0]:
        _, unique_index = np.unique(np.round(points, 9), axis=0, return_index=True)
        points = points[np.sort(unique_index)]
    logger.debug("manifold.caustics", manifold=repr(manifold), count=int(points.shape[0]))
    return CausticSet(points=points, grid=axes)


__all__ = ["projection_determinant", "CausticSet", "caustic_points"]
