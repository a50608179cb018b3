"""Method-of-characteristics solver for the Cauchy problem of Hamilton–Jacobi.

Characteristics are seeded at every grid node x′ with momentum ∇Φ₀(x′) and
propagated together with their action, so that Φ(x_t, t) = Φ₀(x′) + ∫ p dx − H dt.
The solution is resampled onto the fixed grid while the map x′ ↦ x_t stays
injective; past the first caustic a node is marked invalid rather than
extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline, RegularGridInterpolator

from phasetk.core.config import settings
from phasetk.core.exceptions import DimensionMismatch
from phasetk.core.observability import get_logger
from phasetk.dynamics.flow import MethodLike, flow_batch
from phasetk.dynamics.hamiltonian import Hamiltonian
from phasetk.manifolds.base import ExactManifold

logger = get_logger(__name__)

GridLike = Union[np.ndarray, Sequence[Sequence[float]]]
InitialDatum = Union[ExactManifold, Callable[[np.ndarray], float]]

COVER_SLACK = 1e-12
FOOT_NEWTON_ITER = 30
FOOT_NEWTON_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class HJSolution:
    """Φ(x, t) on a fixed tensor grid.

    ``phi`` has shape (k, *grid_shape) with NaN where the solution is not
    available; ``valid_until`` holds, per node, the time at which the
    characteristic seeded there reaches a caustic (+∞ inside the horizon).
    """

    axes: tuple[np.ndarray, ...]
    times: np.ndarray
    phi: np.ndarray
    momentum: np.ndarray
    valid_until: np.ndarray
    characteristics: np.ndarray
    characteristic_phase: np.ndarray

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return tuple(axis.size for axis in self.axes)

    @property
    def nodes(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1).reshape(-1, self.n)

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.phi)

    @property
    def breakdown_time(self) -> float:
        return float(np.min(self.valid_until))

    def time_index(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times - t)))

    def gradient(self, index: int) -> np.ndarray:
        """Finite-difference ∇ₓΦ at time slice ``index``, shape (*grid_shape, n)."""

        slices = np.gradient(self.phi[index], *self.axes, edge_order=2)
        if self.n == 1:
            slices = [slices]
        return np.stack(slices, axis=-1)


def _as_axes(grid: GridLike) -> tuple[np.ndarray, ...]:
    if isinstance(grid, np.ndarray) and grid.ndim == 1:
        axes: tuple[np.ndarray, ...] = (np.asarray(grid, dtype=float),)
    else:
        axes = tuple(np.asarray(axis, dtype=float) for axis in grid)
    for axis in axes:
        if axis.ndim != 1 or axis.size < 3 or np.any(np.diff(axis) <= 0):
            raise ValueError("grid axes must be strictly increasing with at least three nodes")
    return axes


def _as_manifold(phi0: InitialDatum, n: int, grad: Optional[Callable[[np.ndarray], np.ndarray]]) -> ExactManifold:
    if isinstance(phi0, ExactManifold):
        if phi0.n != n:
            raise DimensionMismatch("initial datum and grid dimensions differ", details={"datum": phi0.n, "grid": n})
        return phi0
    return ExactManifold(n, phi0, grad, name="initial-datum")


def _jacobians(positions: np.ndarray, axes: tuple[np.ndarray, ...]) -> np.ndarray:
    """∂x_t/∂x′ from neighbouring characteristics, shape (k, nodes, n, n)."""

    n = len(axes)
    shape = positions.shape[:1] + tuple(axis.size for axis in axes)
    columns = []
    for i in range(n):
        component = positions[..., i].reshape(shape)
        derivs = [np.gradient(component, axes[j], axis=1 + j) for j in range(n)]
        columns.append(np.stack(derivs, axis=-1))
    return np.stack(columns, axis=-2).reshape(shape[0], -1, n, n)


def _breakdown_times(times: np.ndarray, jac: np.ndarray, tol: float) -> np.ndarray:
    """First time each characteristic meets a caustic, +∞ if it never does.

    A caustic is reached when |det ∂x_t/∂x′| falls below ``tol`` relative to
    its initial value, or when an eigenvalue of the step ratio
    J(t_{j-1})⁻¹ J(t_j) is non-positive. The second test sees focal points
    where several eigenvalues vanish together and det keeps its sign; the
    crossing is placed by linear interpolation of that eigenvalue.
    """

    det = np.linalg.det(jac)
    scale = np.abs(det[0])
    relative = np.abs(det) / np.where(scale > 0, scale, 1.0)
    result = np.full(jac.shape[1], np.inf)
    for j in range(times.size):
        pending = np.isinf(result)
        touched = pending & (relative[j] <= tol)
        result[touched] = times[j]
        if j == 0:
            continue
        candidates = np.nonzero(pending & ~touched & (relative[j - 1] > tol))[0]
        if candidates.size == 0:
            continue
        ratio = np.linalg.solve(jac[j - 1, candidates], jac[j, candidates])
        lowest = np.min(np.linalg.eigvals(ratio).real, axis=-1)
        crossed = lowest <= 0.0
        weight = 1.0 / (1.0 - lowest[crossed])
        result[candidates[crossed]] = times[j - 1] + weight * (times[j] - times[j - 1])
    return result


def _resample_1d(
    grid: np.ndarray, x_t: np.ndarray, phi_t: np.ndarray, p_t: np.ndarray, alive: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    phi = np.full(grid.size, np.nan)
    momentum = np.full(grid.size, np.nan)
    increasing = np.append(np.diff(x_t) > 0, False)
    link = alive & np.append(alive[1:], False) & increasing
    start = 0
    while start < x_t.size:
        if not link[start]:
            start += 1
            continue
        stop = start
        while stop < x_t.size and link[stop]:
            stop += 1
        run = slice(start, stop + 1)
        xs = x_t[run]
        slack = COVER_SLACK * max(1.0, float(np.max(np.abs(xs))))
        inside = (grid >= xs[0] - slack) & (grid <= xs[-1] + slack) & np.isnan(phi)
        if np.any(inside):
            spline = CubicHermiteSpline(xs, phi_t[run], p_t[run])
            targets = np.clip(grid[inside], xs[0], xs[-1])
            phi[inside] = spline(targets)
            momentum[inside] = np.interp(targets, xs, p_t[run])
        start = stop + 1
    return phi, momentum


def _resample_nd(
    axes: tuple[np.ndarray, ...],
    nodes: np.ndarray,
    x_t: np.ndarray,
    phi_t: np.ndarray,
    p_t: np.ndarray,
    alive: np.ndarray,
    tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    n = len(axes)
    shape = tuple(axis.size for axis in axes)
    method = "cubic" if min(shape) >= 4 else "linear"
    position = RegularGridInterpolator(axes, x_t.reshape(shape + (n,)), method=method)
    value = RegularGridInterpolator(axes, phi_t.reshape(shape), method=method)
    momenta = RegularGridInterpolator(axes, p_t.reshape(shape + (n,)), method="linear")
    living = RegularGridInterpolator(axes, alive.reshape(shape).astype(float), method="nearest")
    columns = []
    for i in range(n):
        derivs = [np.gradient(x_t[:, i].reshape(shape), axes[j], axis=j) for j in range(n)]
        columns.append(np.stack(derivs, axis=-1))
    jacobian = RegularGridInterpolator(axes, np.stack(columns, axis=-2), method="linear")

    lower = np.array([axis[0] for axis in axes])
    upper = np.array([axis[-1] for axis in axes])
    foot = nodes.copy()
    for _ in range(FOOT_NEWTON_ITER):
        residual = position(foot) - nodes
        jac = jacobian(foot)
        # feet on a singular Jacobian stay put and are rejected below
        usable = np.abs(np.linalg.det(jac)) > tol
        step = np.zeros_like(foot)
        if np.any(usable):
            step[usable] = np.linalg.solve(jac[usable], residual[usable][..., None])[..., 0]
        foot = np.clip(foot - step, lower, upper)
    scale = np.maximum(1.0, np.max(np.abs(nodes), axis=-1))
    converged = np.max(np.abs(position(foot) - nodes), axis=-1) <= FOOT_NEWTON_TOL * scale
    ok = converged & (np.linalg.det(jacobian(foot)) > tol) & (living(foot) > 0.5)
    phi = np.where(ok, value(foot), np.nan)
    momentum = np.where(ok[:, None], momenta(foot), np.nan)
    return phi, momentum


def hj_solve(
    H: Hamiltonian,
    phi0: InitialDatum,
    grid: GridLike,
    t_max: float,
    steps: Optional[int] = None,
    method: MethodLike = None,
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tol_caustic: Optional[float] = None,
) -> HJSolution:
    """Solve ∂Φ/∂t + H(x, ∇Φ, t) = 0 with Φ(·, 0) = Φ₀ on a tensor grid."""

    tol = settings.TOL_CAUSTIC if tol_caustic is None else tol_caustic

    axes = _as_axes(grid)
    n = len(axes)
    if H.n != n:
        raise DimensionMismatch("Hamiltonian and grid dimensions differ", details={"H": H.n, "grid": n})
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    datum = _as_manifold(phi0, n, grad)

    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    seeds = np.hstack([nodes, datum.gradient_many(nodes)])
    initial_phase = datum.potential_many(nodes)
    bundle = flow_batch(H, seeds, 0.0, t_max, steps=steps, method=method)

    positions = bundle.points[..., :n]
    momenta = bundle.points[..., n:]
    char_phase = initial_phase[None, :] + bundle.action
    shape = tuple(axis.size for axis in axes)
    valid_until = _breakdown_times(bundle.times, _jacobians(positions, axes), tol).reshape(shape)
    k = bundle.times.size
    phi = np.full((k, nodes.shape[0]), np.nan)
    momentum = np.full((k, nodes.shape[0], n), np.nan)
    phi[0] = initial_phase
    momentum[0] = seeds[:, n:]
    flat_until = valid_until.reshape(-1)
    for index in range(1, k):
        alive = bundle.times[index] < flat_until
        if not np.any(alive):
            continue
        if n == 1:
            values, slopes = _resample_1d(
                axes[0], positions[index, :, 0], char_phase[index], momenta[index, :, 0], alive
            )
            phi[index], momentum[index, :, 0] = values, slopes
        else:
            phi[index], momentum[index] = _resample_nd(
                axes, nodes, positions[index], char_phase[index], momenta[index], alive, tol
            )

    solution = HJSolution(
        axes=axes,
        times=bundle.times,
        phi=phi.reshape((k,) + shape),
        momentum=momentum.reshape((k,) + shape + (n,)),
        valid_until=valid_until,
        characteristics=bundle.points,
        characteristic_phase=char_phase,
    )
    if np.isfinite(solution.breakdown_time):
        logger.info("hj.breakdown", t=solution.breakdown_time, cells=int(np.sum(np.isfinite(valid_until))))
    logger.debug("hj.solved", n=n, nodes=int(nodes.shape[0]), steps=k - 1, t_max=float(t_max))
    return solution


def breakdown_time(
    H: Hamiltonian,
    phi0: InitialDatum,
    grid: GridLike,
    t_max: float,
    steps: Optional[int] = None,
    method: MethodLike = None,
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tol_caustic: Optional[float] = None,
) -> float:
    """Earliest caustic arrival over the grid, +∞ if none occurs before t_max."""

    solution = hj_solve(H, phi0, grid, t_max, steps=steps, method=method, grad=grad, tol_caustic=tol_caustic)
    return solution.breakdown_time


def hj_residual(solution: HJSolution, H: Hamiltonian) -> np.ndarray:
    """|∂Φ/∂t + H(x, ∇ₓΦ, t)| by central differences; NaN where Φ or a neighbour is invalid."""

    dphi_dt = np.gradient(solution.phi, solution.times, axis=0, edge_order=2)
    nodes = solution.nodes
    residual = np.empty_like(solution.phi)
    for index, t in enumerate(solution.times):
        grad = solution.gradient(index).reshape(-1, solution.n)
        z = np.hstack([nodes, grad])
        finite = np.all(np.isfinite(z), axis=-1)
        values = np.full(nodes.shape[0], np.nan)
        if np.any(finite):
            values[finite] = H.value(z[finite], float(t))
        residual[index] = np.abs(dphi_dt[index] + values.reshape(solution.grid_shape))
    return residual


def max_residual(solution: HJSolution, H: Hamiltonian) -> float:
    residual = hj_residual(solution, H)
    return float(np.nanmax(residual)) if np.any(np.isfinite(residual)) else float("nan")


__all__ = ["HJSolution", "hj_solve", "breakdown_time", "hj_residual", "max_residual"]
