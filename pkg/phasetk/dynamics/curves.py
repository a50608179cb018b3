"""Smooth phase-space curves s ↦ γ(s), used by displacement Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from phasetk.core.exceptions import DimensionMismatch
from phasetk.symplectic.linear import PhasePoint
from phasetk.utils.numerics import FD_STEP

CurveMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """γ : R → R²ⁿ evaluated on arrays of parameters.

    ``gamma`` maps an array of shape (k,) to (k, 2n); ``derivative`` has the
    same signature and defaults to a fourth-order central difference.
    """

    n: int
    gamma: CurveMap
    derivative: Optional[CurveMap] = None
    name: str = "curve"

    def points(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        values = np.asarray(self.gamma(s), dtype=float).reshape(s.shape[0], -1)
        if values.shape[1] != 2 * self.n:
            raise DimensionMismatch("curve must return 2n components", details={"shape": values.shape, "n": self.n})
        if not np.all(np.isfinite(values)):
            raise ValueError(f"curve {self.name!r} is not finite on the queried interval")
        return values

    def velocity(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.derivative is not None:
            return np.asarray(self.derivative(s), dtype=float).reshape(s.shape[0], 2 * self.n)
        h = (FD_STEP * np.maximum(1.0, np.abs(s)))[:, None]
        hs = h[:, 0]
        ahead = -self.points(s + 2 * hs) + 8 * self.points(s + hs)
        behind = -8 * self.points(s - hs) + self.points(s - 2 * hs)
        return (ahead + behind) / (12 * h)

    def at(self, s: float) -> PhasePoint:
        return PhasePoint.from_vector(self.points(np.array([s]))[0])

    @classmethod
    def constant(cls, z: PhasePoint) -> "CurveSpec":
        vector = z.as_vector()
        return cls(
            z.n,
            lambda s: np.broadcast_to(vector, (np.size(s), vector.size)).copy(),
            lambda s: np.zeros((np.size(s), vector.size)),
            name="constant",
        )

    @classmethod
    def segment(cls, start: PhasePoint, end: PhasePoint, duration: float = 1.0) -> "CurveSpec":
        """Straight line from ``start`` at s=0 to ``end`` at s=duration."""

        a, b = start.as_vector(), end.as_vector()
        rate = (b - a) / duration
        return cls(
            start.n,
            lambda s: a + np.atleast_1d(s)[:, None] * rate,
            lambda s: np.broadcast_to(rate, (np.size(s), rate.size)).copy(),
            name="segment",
        )

    @classmethod
    def circle(cls, radius: float, center: Optional[PhasePoint] = None, omega: float = 1.0) -> "CurveSpec":
        """x = c_x + r cos(ωs), p = c_p + r sin(ωs) in one degree of freedom."""

        c = np.zeros(2) if center is None else center.as_vector()
        if c.size != 2:
            raise DimensionMismatch("circle curves live in one degree of freedom")

        def gamma(s: np.ndarray) -> np.ndarray:
            s = np.atleast_1d(s)
            return np.stack([c[0] + radius * np.cos(omega * s), c[1] + radius * np.sin(omega * s)], axis=-1)

        def derivative(s: np.ndarray) -> np.ndarray:
            s = np.atleast_1d(s)
            return np.stack([-radius * omega * np.sin(omega * s), radius * omega * np.cos(omega * s)], axis=-1)

        return cls(1, gamma, derivative, name="circle")


__all__ = ["CurveSpec"]
