"""Transport of manifold phases under Hamiltonian flows and under symplectic frame changes.

Transported phases are reported as functions of the original point ž of the
universal cover: φ(ž, t) = φ(ž) + ∫ α_H along the trajectory of π(ž).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from phasetk.core.config import settings
from phasetk.core.observability import get_logger
from phasetk.dynamics.flow import MethodLike, PhasedTrajectory, flow, flow_batch
from phasetk.dynamics.hamiltonian import Hamiltonian
from phasetk.manifolds.base import LagrangianManifold
from phasetk.manifolds.homotopy import HomotopyPoint, lift_path
from phasetk.manifolds.phase import phase
from phasetk.symplectic.linear import PhasePoint, SymplecticMap, frame_phase_shift
from phasetk.utils.numerics import extrapolated_chord_action

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class TransportedPhase:
    """φ(ž, t) together with the transported point z_t."""

    manifold: LagrangianManifold
    hp: HomotopyPoint
    t: float
    value: float
    endpoint: PhasePoint
    initial_phase: float
    trajectory: Optional[PhasedTrajectory] = None

    @property
    def increment(self) -> float:
        return self.value - self.initial_phase


def transport_phase(
    H: Hamiltonian,
    manifold: LagrangianManifold,
    hp: HomotopyPoint,
    t: float,
    t0: float = 0.0,
    steps: Optional[int] = None,
    method: MethodLike = None,
    tol: Optional[float] = None,
) -> TransportedPhase:
    """φ(ž, t) = φ(ž) + ∫ p dx − H dt along the trajectory from π(ž)."""

    initial = phase(manifold, hp, tol=tol)
    z = hp.point()
    trajectory = flow(H, z, t0, t, steps=steps, method=method)
    value = initial + float(trajectory.action[-1])
    return TransportedPhase(
        manifold=manifold,
        hp=hp,
        t=float(t),
        value=value,
        endpoint=trajectory.final,
        initial_phase=initial,
        trajectory=trajectory,
    )


def transport_phase_many(
    H: Hamiltonian,
    manifold: LagrangianManifold,
    points: list[HomotopyPoint],
    t: float,
    t0: float = 0.0,
    steps: Optional[int] = None,
    method: MethodLike = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched transport: (phases at t, transported points (m, 2n))."""

    initial = np.array([phase(manifold, hp) for hp in points])
    Z0 = np.array([hp.point().as_vector() for hp in points])
    bundle = flow_batch(H, Z0, t0, t, steps=steps, method=method)
    return initial + bundle.final_action, bundle.final_points


def quadratic_transport_phase(S: SymplecticMap, manifold: LagrangianManifold, hp: HomotopyPoint) -> float:
    """φ(ž) + ½(p_t·x_t − p·x) for the linear flow S of a quadratic homogeneous H."""

    return phase(manifold, hp) + frame_phase_shift(S, hp.point())


def frame_phase(R: SymplecticMap, manifold: LagrangianManifold, hp: HomotopyPoint) -> float:
    """Phase of R(𝕍) at R(π(ž)), anchored at R(z̄)."""

    return phase(manifold, hp) + frame_phase_shift(R, hp.point())


def lagrangian_phase(manifold: LagrangianManifold, hp: HomotopyPoint) -> float:
    """λ(ž) = φ(ž) − ½ p·x."""

    z = hp.point()
    return phase(manifold, hp) - 0.5 * float(np.dot(z.p, z.x))


def frame_lagrangian_phase(R: SymplecticMap, manifold: LagrangianManifold, hp: HomotopyPoint) -> float:
    """λ computed in the frame R: phase of R(𝕍) minus ½ p_R·x_R."""

    z_r = R.apply(hp.point())
    return frame_phase(R, manifold, hp) - 0.5 * float(np.dot(z_r.p, z_r.x))


def base_point_defect(
    H: Hamiltonian,
    manifold: LagrangianManifold,
    hp: HomotopyPoint,
    t: float,
    t0: float = 0.0,
    samples: int = 257,
    steps: Optional[int] = None,
    method: MethodLike = None,
) -> float:
    """[φ(ž, t) − φ_t(ž_t)] − ∫ α_H along the base-point trajectory.

    φ_t is the phase of the transported manifold anchored at the transported
    base point; it is evaluated as ∫ p dx along the image of the representative
    path, so the whole comparison reduces to the circulation of α_H around the
    surface swept by that path.
    """

    path = hp.straightened().path
    s = np.linspace(0.0, 1.0, samples)[:, None]
    curve = manifold.embed_many(path[0] + s * (path[-1] - path[0]))
    bundle = flow_batch(H, curve, t0, t, steps=steps, method=method)
    transported = phase(manifold, hp) + float(bundle.final_action[-1])
    moved_phase = extrapolated_chord_action(bundle.final_points, manifold.n)
    return (transported - moved_phase) - float(bundle.final_action[0])


def invariant_manifold_defect(
    H: Hamiltonian,
    manifold: LagrangianManifold,
    hp: HomotopyPoint,
    t: float,
    energy: Optional[float] = None,
    steps: Optional[int] = None,
    method: MethodLike = None,
) -> float:
    """φ(ž, t) − (φ(ž_t) − E t) for a manifold invariant under the flow of H.

    ž_t is ž followed by the flow arc of π(ž), lifted back onto the manifold;
    an arc drifting more than TOL_INVARIANCE off the manifold raises
    DomainViolation.
    """

    transported = transport_phase(H, manifold, hp, t, steps=steps, method=method)
    z = hp.point()
    if energy is None:
        energy = float(H.value(z.as_vector(), 0.0))
    arc = lift_path(manifold, hp.lift, transported.trajectory.points[1:], tol=settings.TOL_INVARIANCE)
    moved = hp.extended(arc)
    defect = transported.value - (phase(manifold, moved) - energy * t)
    logger.debug("transport.invariant_manifold", t=float(t), energy=energy, defect=defect)
    return defect


__all__ = [
    "TransportedPhase",
    "transport_phase",
    "transport_phase_many",
    "quadratic_transport_phase",
    "frame_phase",
    "lagrangian_phase",
    "frame_lagrangian_phase",
    "base_point_defect",
    "invariant_manifold_defect",
]
