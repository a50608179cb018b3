"""Phase laws for phase-space translations and displacement along curves.

A translation T(z_a) is the time-one flow of H^a(z) = σ(z, z_a). It carries
the phase of a manifold point with position x₀ by the increment
½ p_a·x_a + p_a·x₀; composing translations reproduces the Heisenberg–Weyl
phase algebra.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from phasetk.core.observability import get_logger
from phasetk.dynamics.curves import CurveSpec
from phasetk.manifolds.base import LagrangianManifold
from phasetk.manifolds.homotopy import HomotopyPoint
from phasetk.manifolds.phase import phase
from phasetk.symplectic.linear import PhasePoint, SymplecticMap, frame_phase_shift
from phasetk.utils.numerics import refined_simpson

logger = get_logger(__name__)


def translation_increment(z_a: PhasePoint, x0: np.ndarray) -> float:
    """Phase gained by a point at position x0 under T(z_a)."""

    x0 = np.asarray(x0, dtype=float)
    return float(0.5 * np.dot(z_a.p, z_a.x) + np.dot(z_a.p, x0))


def translation_phase(
    z_a: PhasePoint, manifold: LagrangianManifold, hp: HomotopyPoint, tol: Optional[float] = None
) -> float:
    """Phase of T(z_a)𝕍 at the image of ž."""

    return phase(manifold, hp, tol=tol) + translation_increment(z_a, hp.point().x)


def sequential_translation_phase(base_phase: float, x0: np.ndarray, shifts: list[PhasePoint]) -> float:
    """Apply translations in list order starting from a point at position x0."""

    value = base_phase
    position = np.asarray(x0, dtype=float)
    for shift in shifts:
        value += translation_increment(shift, position)
        position = position + shift.x
    return value


def translation_commutation_defects(
    z_a: PhasePoint, z_b: PhasePoint, manifold: LagrangianManifold, hp: HomotopyPoint
) -> tuple[float, float]:
    """(joint − sequential, ab − ba) phase differences for two translations.

    φ_{a,b} is the phase of T(z_a)T(z_b)𝕍 (z_b applied first). The first value
    is φ_{a+b} − φ_{a,b} = −½σ(z_a, z_b); the second is φ_{a,b} − φ_{b,a} =
    σ(z_a, z_b).
    """

    base = phase(manifold, hp)
    x0 = hp.point().x
    joint = base + translation_increment(z_a + z_b, x0)
    ab = sequential_translation_phase(base, x0, [z_b, z_a])
    ba = sequential_translation_phase(base, x0, [z_a, z_b])
    return joint - ab, ab - ba


def covariance_defect(
    S: SymplecticMap, z_a: PhasePoint, manifold: LagrangianManifold, hp: HomotopyPoint
) -> float:
    """Phase of S(T(z_a)𝕍) minus phase of T(S z_a)(S𝕍) at the common image point."""

    base = phase(manifold, hp)
    z = hp.point()
    translate_then_map = base + translation_increment(z_a, z.x) + frame_phase_shift(S, z + z_a)
    z_s = S.apply(z)
    map_then_translate = base + frame_phase_shift(S, z) + translation_increment(S.apply(z_a), z_s.x)
    return translate_then_map - map_then_translate


def _displaced(curve: CurveSpec, z0: PhasePoint, t0: float) -> Callable[[np.ndarray], np.ndarray]:
    offset = z0.as_vector() - curve.points(np.array([t0]))[0]
    return lambda s: curve.points(s) + offset


def displacement_phase(
    curve: CurveSpec,
    manifold: LagrangianManifold,
    hp: HomotopyPoint,
    t: float,
    t0: float = 0.0,
    tol: Optional[float] = None,
) -> float:
    """Phase of the manifold displaced along γ from t0 to t, at the image of ž.

    φ(ž) + ½(p_t·x_t − p₀·x₀) − ½∫(p dx − x dp), the integral taken along the
    displaced trajectory z₀ + γ(s) − γ(t0).
    """

    z0 = hp.point()
    n = z0.n
    base = phase(manifold, hp, tol=tol)
    if t == t0:
        return base
    trajectory = _displaced(curve, z0, t0)

    def sample(m: int) -> tuple[np.ndarray, float]:
        s = np.linspace(t0, t, m + 1)
        z = trajectory(s)
        dz = curve.velocity(s)
        return np.sum(z[:, n:] * dz[:, :n] - z[:, :n] * dz[:, n:], axis=-1), (t - t0) / m

    symmetric = refined_simpson(sample, tol=tol, label="displacement")
    end = trajectory(np.array([t]))[0]
    boundary = 0.5 * (float(np.dot(end[n:], end[:n])) - float(np.dot(z0.p, z0.x)))
    return base + boundary - 0.5 * symmetric


def polygonal_displacement_phase(
    curve: CurveSpec,
    manifold: LagrangianManifold,
    hp: HomotopyPoint,
    t: float,
    segments: int,
    t0: float = 0.0,
) -> float:
    """Displacement phase approximated by a product of ``segments`` translations along chords of γ."""

    if segments < 1:
        raise ValueError("segments must be >= 1")
    vertices = curve.points(np.linspace(t0, t, segments + 1))
    chords = [PhasePoint.from_vector(v) for v in np.diff(vertices, axis=0)]
    return sequential_translation_phase(phase(manifold, hp), hp.point().x, chords)


__all__ = [
    "translation_increment",
    "translation_phase",
    "sequential_translation_phase",
    "translation_commutation_defects",
    "covariance_defect",
    "displacement_phase",
    "polygonal_displacement_phase",
]
