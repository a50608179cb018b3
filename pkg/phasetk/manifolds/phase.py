"""Phases of Lagrangian manifolds as line integrals of p dx on the universal cover."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import root

from phasetk.core.config import settings
from phasetk.core.exceptions import CausticAtPoint, DimensionMismatch, DomainViolation
from phasetk.core.observability import get_logger
from phasetk.manifolds.base import ExactManifold, LagrangianManifold
from phasetk.manifolds.caustics import projection_determinant
from phasetk.manifolds.homotopy import HomotopyPoint, LoopClass
from phasetk.symplectic.linear import PhasePoint
from phasetk.utils.numerics import refined_simpson

logger = get_logger(__name__)

PolylineLike = Union[np.ndarray, Sequence[PhasePoint]]


def _as_phase_array(path: PolylineLike) -> np.ndarray:
    if isinstance(path, np.ndarray):
        points = np.atleast_2d(np.asarray(path, dtype=float))
    else:
        points = np.array([z.as_vector() for z in path], dtype=float)
    if points.ndim != 2 or points.shape[1] % 2:
        raise DimensionMismatch("phase-space polyline needs rows of even length 2n", details={"shape": points.shape})
    return points


def path_action_integral(path: PolylineLike, tol: Optional[float] = None) -> float:
    """∫ p dx along a phase-space polyline.

    Each segment is resampled uniformly and integrated with composite Simpson;
    refinement stops once successive halvings agree to ``tol``.
    """

    points = _as_phase_array(path)
    if points.shape[0] < 2:
        raise ValueError("a path needs at least two samples")
    n = points.shape[1] // 2
    start, delta = points[:-1], np.diff(points, axis=0)

    def sample(m: int) -> tuple[np.ndarray, float]:
        s = np.linspace(0.0, 1.0, m + 1)[:, None, None]
        momenta = start[None, :, n:] + s * delta[None, :, n:]
        return np.sum(momenta * delta[None, :, :n], axis=-1), 1.0 / m

    return refined_simpson(sample, tol=tol, label="path_action")


def parameter_path_integral(
    manifold: LagrangianManifold,
    path: np.ndarray,
    tol: Optional[float] = None,
    label: str = "phase",
) -> float:
    """∫ p dx along ψ(θ(s)) for a piecewise-linear parameter path θ(s)."""

    path = np.atleast_2d(np.asarray(path, dtype=float))
    if path.shape[0] < 2:
        return 0.0
    if not np.all(manifold.contains_many(path)):
        outside = path[~manifold.contains_many(path)][0]
        raise DomainViolation(
            "parameter path leaves the manifold's domain",
            details={"theta": outside.tolist(), "lower": manifold.lower.tolist(), "upper": manifold.upper.tolist()},
        )
    start, delta = path[:-1], np.diff(path, axis=0)
    keep = np.any(delta != 0.0, axis=1)
    start, delta = start[keep], delta[keep]
    if start.shape[0] == 0:
        return 0.0
    n = manifold.n

    def sample(m: int) -> tuple[np.ndarray, float]:
        s = np.linspace(0.0, 1.0, m + 1)[:, None, None]
        thetas = (start[None, :, :] + s * delta[None, :, :]).reshape(-1, n)
        directions = np.broadcast_to(delta[None, :, :], (m + 1,) + delta.shape).reshape(-1, n)
        momenta = manifold.embed_many(thetas)[:, n:]
        velocity = manifold.position_tangents(thetas, directions)
        return np.sum(momenta * velocity, axis=-1).reshape(m + 1, -1), 1.0 / m

    return refined_simpson(sample, tol=tol, label=label)


def phase(manifold: LagrangianManifold, hp: HomotopyPoint, tol: Optional[float] = None) -> float:
    """φ(ž) = ∫ p dx along the representative path of ž, with φ(z̄) = 0."""

    if hp.manifold is not manifold:
        raise ValueError("homotopy point belongs to a different manifold")
    if isinstance(manifold, ExactManifold):
        if not np.all(manifold.contains_many(hp.path)):
            raise DomainViolation("parameter path leaves the manifold's domain", details={"lift": hp.lift.tolist()})
        return manifold.potential(hp.lift) - manifold.potential(manifold.base)
    return parameter_path_integral(manifold, hp.path, tol=tol)


def loop_period(manifold: LagrangianManifold, loop: LoopClass, tol: Optional[float] = None) -> float:
    """C(γ) = ∮_γ p dx for the loop class, traversed from the base point."""

    shift = loop.shift(manifold)
    if loop.is_trivial:
        return 0.0
    path = np.vstack([manifold.base, manifold.base + shift])
    value = parameter_path_integral(manifold, path, tol=tol, label="loop_period")
    logger.debug("manifold.loop_period", windings=loop.windings, period=value)
    return value


@dataclass
class LocalGeneratingFunction:
    """Φ_local(x) near a non-caustic point ž, so that p = ∇Φ_local(x) on that sheet.

    Positions are mapped back to parameters by a Newton solve of x(θ) = x that
    starts at the anchor parameter and must not cross the caustic.
    """

    manifold: LagrangianManifold
    anchor: HomotopyPoint
    anchor_phase: float
    anchor_sign: float
    tol: Optional[float] = None

    def parameter(self, x: Sequence[float]) -> np.ndarray:
        target = np.array(x, dtype=float).reshape(self.manifold.n)
        if isinstance(self.manifold, ExactManifold):
            return target
        n = self.manifold.n
        solution = root(
            lambda th: self.manifold.embed_many(th[None, :])[0, :n] - target,
            self.anchor.lift,
            jac=lambda th: self.manifold.jacobians_many(th[None, :])[0, :n, :],
            method="hybr",
            tol=1e-14,
        )
        theta = solution.x
        if not solution.success:
            raise CausticAtPoint("position is not reachable on this sheet", details={"x": target.tolist()})
        path = np.linspace(self.anchor.lift, theta, 9)
        signs = np.sign(projection_determinant(self.manifold, path))
        if np.any(signs != self.anchor_sign):
            raise CausticAtPoint(
                "the chart from the anchor to this position crosses a caustic",
                details={"x": target.tolist(), "theta": theta.tolist()},
            )
        return theta

    def __call__(self, x: Sequence[float]) -> float:
        theta = self.parameter(x)
        if isinstance(self.manifold, ExactManifold):
            return self.anchor_phase + self.manifold.potential(theta) - self.manifold.potential(self.anchor.lift)
        segment = np.vstack([self.anchor.lift, theta])
        return self.anchor_phase + parameter_path_integral(self.manifold, segment, tol=self.tol, label="local_phase")

    def momentum(self, x: Sequence[float]) -> np.ndarray:
        """p(x) on the sheet, the exact gradient of Φ_local."""

        theta = self.parameter(x)
        return self.manifold.embed_many(theta[None, :])[0, self.manifold.n :]


def local_generating_function(
    manifold: LagrangianManifold,
    hp: HomotopyPoint,
    tol: Optional[float] = None,
    tol_caustic: Optional[float] = None,
) -> LocalGeneratingFunction:
    """Local expression Φ(x) = φ(ž(x)) of the phase on the sheet through ž."""

    tol_caustic = settings.TOL_CAUSTIC if tol_caustic is None else tol_caustic
    det = float(projection_determinant(manifold, hp.lift[None, :])[0])
    if abs(det) < tol_caustic:
        raise CausticAtPoint(
            "projection to position space is singular at the requested point",
            details={"theta": hp.lift.tolist(), "det": det},
        )
    return LocalGeneratingFunction(
        manifold=manifold,
        anchor=hp,
        anchor_phase=phase(manifold, hp, tol=tol),
        anchor_sign=float(np.sign(det)),
        tol=tol,
    )


__all__ = [
    "path_action_integral",
    "parameter_path_integral",
    "phase",
    "loop_period",
    "LocalGeneratingFunction",
    "local_generating_function",
]
