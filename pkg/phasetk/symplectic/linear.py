"""Linear symplectic algebra: phase points, symplectic matrices, Lagrangian planes.

Conventions: a phase point is z = (x, p) with n positions and n momenta, the
symplectic form is σ(z, z') = p·x' − p'·x and J = (0 I; −I 0), so that a
matrix S is symplectic when SᵀJS = J.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import expm, null_space

from phasetk.core.config import settings
from phasetk.core.exceptions import DimensionMismatch, FreeConditionViolated, NotSymplectic

ArrayLike = Union[np.ndarray, list, tuple, float]


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A point z = (x, p) of the 2n-dimensional phase space."""

    x: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_1d(np.array(self.x, dtype=float))
        p = np.atleast_1d(np.array(self.p, dtype=float))
        if x.ndim != 1 or x.shape != p.shape or x.size < 1:
            raise DimensionMismatch(
                "position and momentum must be vectors of equal length n >= 1",
                details={"x_shape": x.shape, "p_shape": p.shape},
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise ValueError("phase point entries must be finite")
        x.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @classmethod
    def from_vector(cls, z: ArrayLike) -> "PhasePoint":
        z = np.asarray(z, dtype=float).ravel()
        if z.size % 2:
            raise DimensionMismatch("phase vector must have even length", details={"length": z.size})
        n = z.size // 2
        return cls(z[:n], z[n:])

    @classmethod
    def origin(cls, n: int) -> "PhasePoint":
        return cls(np.zeros(n), np.zeros(n))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        _check_same_dimension(self, other)
        return PhasePoint(self.x + other.x, self.p + other.p)

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        _check_same_dimension(self, other)
        return PhasePoint(self.x - other.x, self.p - other.p)

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.x, -self.p)

    def __mul__(self, factor: float) -> "PhasePoint":
        return PhasePoint(factor * self.x, factor * self.p)

    __rmul__ = __mul__

    def isclose(self, other: "PhasePoint", atol: float = 1e-12) -> bool:
        return self.n == other.n and bool(np.allclose(self.as_vector(), other.as_vector(), rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"PhasePoint(x={self.x.tolist()}, p={self.p.tolist()})"


def _check_same_dimension(z: PhasePoint, z2: PhasePoint) -> None:
    if z.n != z2.n:
        raise DimensionMismatch("phase points live in different dimensions", details={"n": z.n, "n2": z2.n})


def standard_symplectic_matrix(n: int) -> np.ndarray:
    """J = (0 I; −I 0) in dimension 2n."""

    identity = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, identity], [-identity, zero]])


def symplectic_form(z: PhasePoint, z2: PhasePoint) -> float:
    """σ(z, z2) = p·x2 − p2·x."""

    _check_same_dimension(z, z2)
    return float(np.dot(z.p, z2.x) - np.dot(z2.p, z.x))


def _square_even(S: np.ndarray) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch("symplectic test needs a square matrix", details={"shape": S.shape})
    if S.shape[0] % 2 or S.shape[0] == 0:
        raise DimensionMismatch("symplectic test needs an even dimension", details={"shape": S.shape})
    return S


def symplectic_defect(S: Union[np.ndarray, "SymplecticMap"]) -> float:
    """‖SᵀJS − J‖_max."""

    matrix = _square_even(S.matrix if isinstance(S, SymplecticMap) else S)
    J = standard_symplectic_matrix(matrix.shape[0] // 2)
    return float(np.max(np.abs(matrix.T @ J @ matrix - J)))


def is_symplectic(S: Union[np.ndarray, "SymplecticMap"], tol: Optional[float] = None) -> bool:
    """True iff ‖SᵀJS − J‖_max is within tolerance, relative to max(1, ‖S‖_max²)."""

    tol = settings.TOL_SYMP if tol is None else tol
    matrix = _square_even(S.matrix if isinstance(S, SymplecticMap) else S)
    scale = max(1.0, float(np.max(np.abs(matrix))) ** 2)
    return symplectic_defect(matrix) <= tol * scale


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """A 2n×2n matrix S = (A B; C D) with SᵀJS = J."""

    matrix: np.ndarray
    tol: Optional[float] = None

    def __post_init__(self) -> None:
        matrix = _square_even(np.array(self.matrix, dtype=float))
        if not is_symplectic(matrix, self.tol):
            raise NotSymplectic(
                "matrix is not symplectic at the configured tolerance",
                details={"defect": symplectic_defect(matrix)},
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def A(self) -> np.ndarray:
        return self.matrix[: self.n, : self.n]

    @property
    def B(self) -> np.ndarray:
        return self.matrix[: self.n, self.n :]

    @property
    def C(self) -> np.ndarray:
        return self.matrix[self.n :, : self.n]

    @property
    def D(self) -> np.ndarray:
        return self.matrix[self.n :, self.n :]

    @classmethod
    def from_blocks(
        cls, A: ArrayLike, B: ArrayLike, C: ArrayLike, D: ArrayLike, tol: Optional[float] = None
    ) -> "SymplecticMap":
        blocks = [np.atleast_2d(np.asarray(block, dtype=float)) for block in (A, B, C, D)]
        return cls(np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]]), tol)

    @classmethod
    def identity(cls, n: int) -> "SymplecticMap":
        return cls(np.eye(2 * n))

    @classmethod
    def standard(cls, n: int) -> "SymplecticMap":
        return cls(standard_symplectic_matrix(n))

    @classmethod
    def from_quadratic_hamiltonian(cls, Q: ArrayLike, t: float) -> "SymplecticMap":
        """Time-t flow exp(tJQ) of H(z) = ½ zᵀQz (Q symmetrised)."""

        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        Q = 0.5 * (Q + Q.T)
        J = standard_symplectic_matrix(Q.shape[0] // 2)
        return cls(expm(t * (J @ Q)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, scale: float = 0.5) -> "SymplecticMap":
        """exp(J·Q) for a random symmetric Q; symplectic by construction."""

        G = rng.normal(scale=scale, size=(2 * n, 2 * n))
        return cls.from_quadratic_hamiltonian(G + G.T, 0.5)

    def apply(self, z: PhasePoint) -> PhasePoint:
        if z.n != self.n:
            raise DimensionMismatch("matrix and point dimensions differ", details={"n": self.n, "point_n": z.n})
        return PhasePoint.from_vector(self.matrix @ z.as_vector())

    def apply_vectors(self, Z: np.ndarray) -> np.ndarray:
        """Apply to the rows of an (m, 2n) array."""

        return np.asarray(Z, dtype=float) @ self.matrix.T

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.matrix @ other.matrix, self.tol)

    def inverse(self) -> "SymplecticMap":
        J = standard_symplectic_matrix(self.n)
        return SymplecticMap(-J @ self.matrix.T @ J, self.tol)

    def is_free(self, tol_det: Optional[float] = None) -> bool:
        tol_det = settings.TOL_DET if tol_det is None else tol_det
        return abs(float(np.linalg.det(self.B))) > tol_det

    def __repr__(self) -> str:
        return f"SymplecticMap(n={self.n}, matrix={self.matrix.tolist()})"


def _numeric_rank(matrix: np.ndarray, tol: float) -> int:
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > tol * singular_values[0]))


@dataclass(frozen=True, eq=False)
class LagrangianPlane:
    """The linear subspace {z : Ax + Bp = 0}."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.array(self.A, dtype=float))
        B = np.atleast_2d(np.array(self.B, dtype=float))
        if A.shape != B.shape or A.shape[0] != A.shape[1]:
            raise DimensionMismatch("A and B must be square of equal size", details={"A": A.shape, "B": B.shape})
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_graph(cls, M: ArrayLike) -> "LagrangianPlane":
        """The graph p = Mx, written as Mx − p = 0."""

        M = np.atleast_2d(np.asarray(M, dtype=float))
        return cls(M, -np.eye(M.shape[0]))

    def kernel_basis(self, tol: Optional[float] = None) -> np.ndarray:
        """Columns spanning the plane, each a phase vector (x, p)."""

        tol = settings.TOL_SYMP if tol is None else tol
        return null_space(np.hstack([self.A, self.B]), rcond=tol)

    def sigma_on_kernel(self, tol: Optional[float] = None) -> np.ndarray:
        """Matrix of σ(u_i, u_j) over the kernel basis vectors."""

        U = self.kernel_basis(tol)
        n = self.n
        X, P = U[:n], U[n:]
        return P.T @ X - X.T @ P

    def is_lagrangian(self, tol: Optional[float] = None) -> bool:
        return is_lagrangian_plane(self.A, self.B, tol)


def is_lagrangian_plane(A: ArrayLike, B: ArrayLike, tol: Optional[float] = None) -> bool:
    """True iff rank [A B] = n and ABᵀ = BAᵀ within tolerance.

    The plane is the kernel of the row block [A B]; σ vanishes on it exactly
    when the rows pair to zero under J, i.e. ABᵀ − BAᵀ = 0.
    """

    tol = settings.TOL_SYMP if tol is None else tol
    plane = LagrangianPlane(A, B)
    rows = np.hstack([plane.A, plane.B])
    if _numeric_rank(rows, tol) != plane.n:
        return False
    scale = max(1.0, float(np.max(np.abs(rows))) ** 2)
    commutator = plane.A @ plane.B.T - plane.B @ plane.A.T
    return float(np.max(np.abs(commutator))) <= tol * scale


def _require_free(S: SymplecticMap, tol_det: Optional[float]) -> None:
    tol_det = settings.TOL_DET if tol_det is None else tol_det
    det_b = float(np.linalg.det(S.B))
    if abs(det_b) <= tol_det:
        raise FreeConditionViolated("upper-right block B is singular", details={"det_B": det_b, "tol_det": tol_det})


def free_generating_function(S: SymplecticMap, xS: ArrayLike, x: ArrayLike, tol_det: Optional[float] = None) -> float:
    """W(x_S, x) = ½ DB⁻¹x_S·x_S − B⁻¹x_S·x + ½ B⁻¹Ax·x for a free S.

    (x_S, p_S) = S(x, p) exactly when p_S = ∇₁W and p = −∇₂W.
    """

    _require_free(S, tol_det)
    xS = np.atleast_1d(np.asarray(xS, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if xS.shape != (S.n,) or x.shape != (S.n,):
        raise DimensionMismatch("arguments must have length n", details={"n": S.n})
    binv_xs = np.linalg.solve(S.B, xS)
    binv_ax = np.linalg.solve(S.B, S.A @ x)
    return float(0.5 * xS @ (S.D @ binv_xs) - binv_xs @ x + 0.5 * x @ binv_ax)


def free_generating_gradients(
    S: SymplecticMap, xS: ArrayLike, x: ArrayLike, tol_det: Optional[float] = None
) -> tuple[np.ndarray, np.ndarray]:
    """(∇₁W, ∇₂W) at (x_S, x)."""

    _require_free(S, tol_det)
    xS = np.atleast_1d(np.asarray(xS, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    Binv = np.linalg.inv(S.B)
    first_quadratic = S.D @ Binv
    second_quadratic = Binv @ S.A
    grad_first = 0.5 * (first_quadratic + first_quadratic.T) @ xS - Binv.T @ x
    grad_second = 0.5 * (second_quadratic + second_quadratic.T) @ x - Binv @ xS
    return grad_first, grad_second


def frame_phase_shift(S: SymplecticMap, z: PhasePoint) -> float:
    """Phase increment ½(p_S·x_S − p·x) picked up by a change of symplectic frame."""

    zS = S.apply(z)
    return float(0.5 * (zS.p @ zS.x - z.p @ z.x))


def pullback_form_defect(S: SymplecticMap, z: PhasePoint, dz: PhasePoint) -> float:
    """(p_S dx_S − x_S dp_S) − (p dx − x dp) for the tangent vector dz at z."""

    zS, dzS = S.apply(z), S.apply(dz)
    return float((zS.p @ dzS.x - zS.x @ dzS.p) - (z.p @ dz.x - z.x @ dz.p))


__all__ = [
    "PhasePoint",
    "SymplecticMap",
    "LagrangianPlane",
    "standard_symplectic_matrix",
    "symplectic_form",
    "symplectic_defect",
    "is_symplectic",
    "is_lagrangian_plane",
    "free_generating_function",
    "free_generating_gradients",
    "frame_phase_shift",
    "pullback_form_defect",
]
