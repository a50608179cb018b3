"""Maslov index of loops as a signed count of caustic crossings."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from phasetk.core.config import settings
from phasetk.core.exceptions import NonGenericCaustic
from phasetk.core.observability import get_logger
from phasetk.manifolds.base import LagrangianManifold
from phasetk.manifolds.caustics import projection_determinant
from phasetk.manifolds.homotopy import LoopClass

logger = get_logger(__name__)

# keeps the default representative off the coordinate lines θ ∈ {0, π}
GENERIC_OFFSET = 0.3819660112501051
JACOBIAN_STEP = 1e-6


def _legs(manifold: LagrangianManifold, loop: LoopClass, start: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Axis-aligned legs (origin, displacement) realizing ``loop`` from ``start``."""

    legs = []
    origin = start.copy()
    shift = loop.shift(manifold)
    for axis in manifold.periodic_axes:
        if shift[axis] == 0.0:
            continue
        step = np.zeros(manifold.n)
        step[axis] = shift[axis]
        legs.append((origin.copy(), step))
        origin = origin + step
    return legs


def _crossing_sign(manifold: LagrangianManifold, theta: np.ndarray, direction: np.ndarray, tol: float) -> int:
    """−sign of the crossing form (∂p/∂θ v)·(d/ds ∂x/∂θ v) on the kernel line v."""

    n = manifold.n
    jac = manifold.jacobian(theta)
    jx, jp = jac[:n, :], jac[n:, :]
    unit = direction / np.linalg.norm(direction)
    forward = manifold.jacobian(theta + JACOBIAN_STEP * unit)[:n, :]
    backward = manifold.jacobian(theta - JACOBIAN_STEP * unit)[:n, :]
    djx = (forward - backward) / (2.0 * JACOBIAN_STEP)

    _, singular, vh = np.linalg.svd(jx)
    scale = max(float(np.linalg.norm(jac, 2)), 1e-300)
    if n > 1 and singular[-2] / scale < tol:
        raise NonGenericCaustic(
            "caustic of corank greater than one on the loop",
            details={"theta": theta.tolist(), "singular_values": singular.tolist()},
        )
    v = vh[-1]
    form = float(np.dot(jp @ v, djx @ v)) / scale**2
    if abs(form) < tol:
        raise NonGenericCaustic("loop is tangent to the caustic", details={"theta": theta.tolist(), "form": form})
    return -int(np.sign(form))


def _leg_index(
    manifold: LagrangianManifold, origin: np.ndarray, step: np.ndarray, samples: int, tol: float, xtol: float
) -> int:
    count = max(2, int(samples * round(abs(step).max() / (2.0 * np.pi))))
    s = (np.arange(count) + 0.5) / count
    s = np.concatenate([[0.0], s, [1.0]])
    det = projection_determinant(manifold, origin + s[:, None] * step)
    near = np.abs(det) < tol
    signs = np.sign(np.where(near, 0.0, det))

    for k in np.nonzero(near[1:-1])[0] + 1:
        left, right = signs[k - 1], signs[k + 1]
        if left == right:
            raise NonGenericCaustic(
                "determinant touches zero without changing sign",
                details={"theta": (origin + s[k] * step).tolist()},
            )

    def along(value: float) -> float:
        return float(projection_determinant(manifold, (origin + value * step)[None, :])[0])

    index = 0
    k = 0
    while k < s.size - 1:
        lo = k
        hi = k + 1
        while hi < s.size - 1 and signs[hi] == 0.0:
            hi += 1
        if signs[lo] != 0.0 and signs[hi] != 0.0 and signs[lo] != signs[hi]:
            root = brentq(along, s[lo], s[hi], xtol=xtol)
            index += _crossing_sign(manifold, origin + root * step, step, tol)
        k = hi
    return index


def maslov_index(
    manifold: LagrangianManifold,
    loop: LoopClass,
    samples: Optional[int] = None,
    start: Optional[Sequence[float]] = None,
    tol_caustic: Optional[float] = None,
) -> int:
    """Signed count of transversal caustic crossings along a representative of ``loop``.

    The representative runs along the periodic axes one after another, starting
    from ``start`` (default: the base parameter shifted off the coordinate
    lines). Each crossing contributes ±1 by the sign of its crossing form, so a
    circle traversed once in the positive sense has index 2 and the index is
    additive over winding vectors.
    """

    if loop.is_trivial:
        loop.shift(manifold)
        return 0
    samples = settings.MASLOV_SCAN_SAMPLES if samples is None else samples
    tol = settings.TOL_CAUSTIC if tol_caustic is None else tol_caustic
    if start is None:
        origin = manifold.base.astype(float).copy()
        for rank, axis in enumerate(manifold.periodic_axes):
            origin[axis] += GENERIC_OFFSET * (rank + 1)
    else:
        origin = np.array(start, dtype=float).reshape(manifold.n)

    total = 0
    for leg_origin, step in _legs(manifold, loop, origin):
        total += _leg_index(manifold, leg_origin, step, samples, tol, settings.CAUSTIC_XTOL)
    logger.debug("semiclassical.maslov", windings=loop.windings, index=total, samples=samples)
    return total


__all__ = ["maslov_index"]
