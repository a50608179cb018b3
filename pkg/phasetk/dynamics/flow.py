"""Hamiltonian flows f_{t,t0} with the accumulated action ∫ p dx − H dt."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from phasetk.core.config import settings
from phasetk.core.exceptions import DimensionMismatch
from phasetk.core.observability import get_logger
from phasetk.dynamics.hamiltonian import Hamiltonian
from phasetk.dynamics.integrators import Integrator, get_integrator
from phasetk.symplectic.linear import PhasePoint
from phasetk.utils.numerics import central_jacobian, chord_action, extrapolated_chord_action

logger = get_logger(__name__)

MethodLike = Union[str, Integrator, None]


@dataclass(frozen=True, eq=False)
class PhasedTrajectory:
    """Samples (t_k, z_k, a_k) of one trajectory, a_k = ∫ p dx − H dt from t_0."""

    times: np.ndarray
    points: np.ndarray
    action: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        if times.size > 1 and not (np.all(np.diff(times) > 0) or np.all(np.diff(times) < 0)):
            raise ValueError("trajectory times must be strictly monotone")

    @property
    def n(self) -> int:
        return self.points.shape[1] // 2

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def samples(self) -> list[tuple[float, PhasePoint, float]]:
        return [
            (float(t), PhasePoint.from_vector(z), float(a)) for t, z, a in zip(self.times, self.points, self.action)
        ]

    @property
    def initial(self) -> PhasePoint:
        return PhasePoint.from_vector(self.points[0])

    @property
    def final(self) -> PhasePoint:
        return PhasePoint.from_vector(self.points[-1])


@dataclass(frozen=True, eq=False)
class TrajectoryBundle:
    """Trajectories of a batch of initial points sharing one time grid.

    ``points`` has shape (k, m, 2n) and ``action`` (k, m).
    """

    times: np.ndarray
    points: np.ndarray
    action: np.ndarray

    @property
    def size(self) -> int:
        return int(self.points.shape[1])

    @property
    def final_points(self) -> np.ndarray:
        return self.points[-1]

    @property
    def final_action(self) -> np.ndarray:
        return self.action[-1]

    def trajectory(self, index: int) -> PhasedTrajectory:
        return PhasedTrajectory(self.times, self.points[:, index], self.action[:, index])


def _propagate(
    integrator: Integrator, H: Hamiltonian, Z0: np.ndarray, times: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    points = np.empty((times.size,) + Z0.shape)
    action = np.zeros((times.size, Z0.shape[0]))
    points[0] = Z0
    z = Z0
    for k in range(times.size - 1):
        h = times[k + 1] - times[k]
        z, da = integrator.step(H, z, times[k], h)
        points[k + 1] = z
        action[k + 1] = action[k] + da
    return points, action


def flow_batch(
    H: Hamiltonian,
    Z0: np.ndarray,
    t0: float,
    t1: float,
    steps: Optional[int] = None,
    method: MethodLike = None,
    threads: Optional[int] = None,
) -> TrajectoryBundle:
    """Propagate an (m, 2n) batch of initial points from t0 to t1.

    The batch is split into contiguous chunks run on a thread pool of at most
    ``threads`` workers (default PTK_THREADS); results do not depend on the
    chunking.
    """

    Z0 = np.atleast_2d(np.asarray(Z0, dtype=float))
    if Z0.shape[1] != 2 * H.n:
        raise DimensionMismatch("initial points must have 2n components", details={"shape": Z0.shape, "n": H.n})
    steps = settings.DEFAULT_STEPS if steps is None else int(steps)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    integrator = method if isinstance(method, Integrator) else get_integrator(method, H)
    if t1 == t0:
        return TrajectoryBundle(np.array([t0], dtype=float), Z0[None].copy(), np.zeros((1, Z0.shape[0])))
    times = np.linspace(t0, t1, steps + 1)

    threads = settings.THREADS if threads is None else max(1, int(threads))
    chunks = np.array_split(np.arange(Z0.shape[0]), min(threads, Z0.shape[0]))
    if len(chunks) == 1:
        points, action = _propagate(integrator, H, Z0, times)
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda idx: _propagate(integrator, H, Z0[idx], times), chunks))
        points = np.concatenate([part[0] for part in parts], axis=1)
        action = np.concatenate([part[1] for part in parts], axis=1)

    logger.debug(
        "flow.completed",
        hamiltonian=H.name,
        method=integrator.name,
        batch=int(Z0.shape[0]),
        steps=steps,
        t0=float(t0),
        t1=float(t1),
    )
    return TrajectoryBundle(times, points, action)


def flow(
    H: Hamiltonian,
    z0: PhasePoint,
    t0: float,
    t1: float,
    steps: Optional[int] = None,
    method: MethodLike = None,
) -> PhasedTrajectory:
    """Trajectory of z0 under the flow of H from t0 to t1 with its accumulated action."""

    return flow_batch(H, z0.as_vector()[None, :], t0, t1, steps=steps, method=method, threads=1).trajectory(0)


def flow_map(
    H: Hamiltonian,
    Z0: np.ndarray,
    t0: float,
    t1: float,
    steps: Optional[int] = None,
    method: MethodLike = None,
) -> np.ndarray:
    return flow_batch(H, Z0, t0, t1, steps=steps, method=method).final_points


def action_increment(trajectory: PhasedTrajectory) -> float:
    """∫ p dx − H dt along the whole trajectory."""

    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    return float(trajectory.action[-1])


def flow_jacobian(
    H: Hamiltonian,
    z0: PhasePoint,
    t: float,
    t0: float = 0.0,
    steps: Optional[int] = None,
    method: MethodLike = None,
) -> np.ndarray:
    """Finite-difference Jacobian of z0 ↦ f_{t,t0}(z0)."""

    return central_jacobian(
        lambda z: flow_map(H, z[None, :], t0, t, steps=steps, method=method)[0],
        z0.as_vector(),
    )


def _curve_array(curve: Union[np.ndarray, Sequence[PhasePoint]]) -> np.ndarray:
    if isinstance(curve, np.ndarray):
        return np.atleast_2d(np.asarray(curve, dtype=float))
    return np.array([z.as_vector() for z in curve], dtype=float)


def invariance_defect(
    H: Hamiltonian,
    curve: Union[np.ndarray, Sequence[PhasePoint]],
    t: float,
    t0: float = 0.0,
    steps: Optional[int] = None,
    method: MethodLike = None,
    extrapolate: bool = True,
) -> float:
    """Circulation of α_H = p dx − H dt around the boundary of the swept surface.

    The boundary is the initial curve at t0, the trajectory of its end point,
    the transported curve at t (reversed) and the trajectory of its start point
    (reversed). Curve integrals use the chord rule on the samples, optionally
    Richardson-extrapolated.
    """

    points = _curve_array(curve)
    if points.shape[0] < 2:
        raise ValueError("curve needs at least two samples")
    if t == t0:
        return 0.0
    n = H.n
    bundle = flow_batch(H, points, t0, t, steps=steps, method=method)
    line = extrapolated_chord_action if extrapolate else chord_action
    initial = line(points, n)
    transported = line(bundle.final_points, n)
    defect = initial + float(bundle.final_action[-1]) - transported - float(bundle.final_action[0])
    logger.debug("flow.invariance_defect", hamiltonian=H.name, t=float(t), samples=int(points.shape[0]), defect=defect)
    return defect


__all__ = [
    "PhasedTrajectory",
    "TrajectoryBundle",
    "flow",
    "flow_batch",
    "flow_map",
    "action_increment",
    "flow_jacobian",
    "invariance_defect",
]
