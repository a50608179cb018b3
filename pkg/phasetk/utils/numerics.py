"""Finite differences and refined quadrature shared by the numerical modules."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson

from phasetk.core.config import settings
from phasetk.core.exceptions import QuadratureNotConverged
from phasetk.core.observability import get_logger

logger = get_logger(__name__)

EPS = np.finfo(float).eps
FD_STEP = EPS ** (1.0 / 3.0)


def fd_step(x: np.ndarray) -> np.ndarray:
    """Step h = eps^(1/3) * scale, scale taken per component."""

    return FD_STEP * np.maximum(1.0, np.abs(x))


def central_gradient(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    """Fourth-order central-difference gradient of a scalar function."""

    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    steps = fd_step(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = steps[k]
        grad[k] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * steps[k])
    return grad


def central_jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    """Fourth-order central-difference Jacobian, shape (len(f(x)), len(x))."""

    x = np.asarray(x, dtype=float)
    steps = fd_step(x)
    columns = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = steps[k]
        columns.append(
            (-np.asarray(f(x + 2 * e)) + 8 * np.asarray(f(x + e)) - 8 * np.asarray(f(x - e)) + np.asarray(f(x - 2 * e)))
            / (12 * steps[k])
        )
    return np.stack(columns, axis=-1)


def batched_directional_derivative(
    f: Callable[[np.ndarray], np.ndarray], points: np.ndarray, directions: np.ndarray
) -> np.ndarray:
    """d/ds f(points + s*directions) at s=0 for a batch, fourth-order stencil.

    ``f`` maps an (m, k) array to an (m, d) array.
    """

    points = np.asarray(points, dtype=float)
    directions = np.asarray(directions, dtype=float)
    scale = np.maximum(1.0, np.max(np.abs(points), axis=-1, keepdims=True))
    norm = np.linalg.norm(directions, axis=-1, keepdims=True)
    unit = np.divide(directions, norm, out=np.zeros_like(directions), where=norm > 0)
    h = FD_STEP * scale
    ahead = -f(points + 2 * h * unit) + 8 * f(points + h * unit)
    behind = -8 * f(points - h * unit) + f(points - 2 * h * unit)
    derivative = (ahead + behind) / (12 * h)
    return derivative * norm


def refined_simpson(
    sample: Callable[[int], tuple[np.ndarray, float]],
    *,
    tol: Optional[float] = None,
    min_intervals: Optional[int] = None,
    max_level: Optional[int] = None,
    label: str = "integral",
) -> float:
    """Composite Simpson with interval doubling until successive values agree.

    ``sample(m)`` returns integrand values on ``m + 1`` uniform nodes (trailing
    axes are summed after integration) and the node spacing. Convergence means
    ``|I_k - I_{k-1}| < tol * (1 + |I_k|)``.
    """

    tol = settings.TOL_QUAD if tol is None else tol
    intervals = settings.QUAD_MIN_INTERVALS if min_intervals is None else min_intervals
    intervals += intervals % 2
    max_level = settings.QUAD_MAX_LEVEL if max_level is None else max_level

    previous: Optional[float] = None
    value = 0.0
    for level in range(max_level + 1):
        values, spacing = sample(intervals)
        value = float(np.sum(simpson(values, dx=spacing, axis=0)))
        if previous is not None and abs(value - previous) < tol * (1.0 + abs(value)):
            logger.debug("quadrature.refined", label=label, intervals=intervals, level=level, value=value)
            return value
        previous = value
        intervals *= 2

    logger.warning("quadrature.not_converged", label=label, intervals=intervals // 2, value=value)
    raise QuadratureNotConverged(
        f"{label} did not converge after {max_level} halvings",
        details={"value": value, "previous": previous, "tol": tol},
    )


def chord_action(points: np.ndarray, n: int) -> float:
    """Exact ∫ p dx along a phase-space polyline with rows (x, p)."""

    points = np.asarray(points, dtype=float)
    if points.shape[0] < 2:
        return 0.0
    x, p = points[:, :n], points[:, n:]
    return float(np.sum(0.5 * (p[1:] + p[:-1]) * (x[1:] - x[:-1])))


def extrapolated_chord_action(points: np.ndarray, n: int) -> float:
    """∫ p dx along a smooth curve known at uniformly spaced samples.

    Chord sums on the full and on the every-other-sample polyline are combined
    by Richardson extrapolation; falls back to the plain chord sum when the
    number of segments is odd.
    """

    points = np.asarray(points, dtype=float)
    segments = points.shape[0] - 1
    fine = chord_action(points, n)
    if segments < 2 or segments % 2:
        return fine
    coarse = chord_action(points[::2], n)
    return (4.0 * fine - coarse) / 3.0


__all__ = [
    "EPS",
    "FD_STEP",
    "fd_step",
    "central_gradient",
    "central_jacobian",
    "batched_directional_derivative",
    "refined_simpson",
    "chord_action",
    "extrapolated_chord_action",
]
