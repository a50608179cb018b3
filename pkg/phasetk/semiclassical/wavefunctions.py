"""Semiclassical wavefunctions on the universal cover and Heisenberg–Weyl translations.

A cover wavefunction is Ψ(ž) = exp(iφ(ž)/ħ)·√ρ(ž). Translating the manifold
classically updates φ by the translation phase law; translating a sampled
x-representation wavefunction applies
T̂(z_a)ψ(x) = exp((i/ħ)(p_a x − ½ p_a x_a))·ψ(x − x_a).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import fft

from phasetk.core.config import settings
from phasetk.core.exceptions import DimensionMismatch, DomainViolation
from phasetk.manifolds.base import LagrangianManifold
from phasetk.manifolds.homotopy import HomotopyPoint, LoopClass
from phasetk.manifolds.phase import phase as manifold_phase
from phasetk.semiclassical.maslov import maslov_index
from phasetk.symplectic.linear import PhasePoint, symplectic_form
from phasetk.transport.translations import translation_increment

PhaseSource = Callable[[HomotopyPoint], float]
PointSource = Callable[[HomotopyPoint], PhasePoint]
Density = Callable[[np.ndarray], float]

GRID_RTOL = 1e-9
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False)
class CoverWavefunction:
    manifold: LagrangianManifold
    hbar: float
    phase_source: Optional[PhaseSource] = None
    point_source: Optional[PointSource] = None
    rho: Optional[Density] = None

    def __post_init__(self) -> None:
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    def phase(self, hp: HomotopyPoint) -> float:
        if self.phase_source is None:
            return manifold_phase(self.manifold, hp)
        return float(self.phase_source(hp))

    def point(self, hp: HomotopyPoint) -> PhasePoint:
        """Phase-space position currently carried by ž."""

        if self.point_source is None:
            return hp.point()
        return self.point_source(hp)

    def amplitude(self, hp: HomotopyPoint) -> float:
        density = 1.0 if self.rho is None else float(self.rho(hp.lift))
        if density < 0 or not math.isfinite(density):
            raise ValueError("density must be finite and non-negative")
        return math.sqrt(density)

    def value(self, hp: HomotopyPoint) -> complex:
        return cmath.exp(1j * self.phase(hp) / self.hbar) * self.amplitude(hp)

    __call__ = value


def classical_weyl_action(wf: CoverWavefunction, z_a: PhasePoint) -> CoverWavefunction:
    """T(z_a)Ψ: the phase gains ½p_a·x_a + p_a·x, the carried point moves by z_a."""

    def phase_source(hp: HomotopyPoint) -> float:
        return wf.phase(hp) + translation_increment(z_a, wf.point(hp).x)

    def point_source(hp: HomotopyPoint) -> PhasePoint:
        return wf.point(hp) + z_a

    return CoverWavefunction(
        manifold=wf.manifold, hbar=wf.hbar, phase_source=phase_source, point_source=point_source, rho=wf.rho
    )


def classical_ordering_defect(wf: CoverWavefunction, z_a: PhasePoint, z_b: PhasePoint, hp: HomotopyPoint) -> float:
    """[phase of T(z_a)T(z_b)Ψ − phase of T(z_b)T(z_a)Ψ]/ħ at ž; equals σ(z_a, z_b)/ħ."""

    ab = classical_weyl_action(classical_weyl_action(wf, z_b), z_a)
    ba = classical_weyl_action(classical_weyl_action(wf, z_a), z_b)
    return (ab.phase(hp) - ba.phase(hp)) / wf.hbar


def monodromy_factor(wf: CoverWavefunction, loop: LoopClass, hp: Optional[HomotopyPoint] = None) -> complex:
    """Ψ(γ̌ž)/Ψ(ž) including the Maslov correction exp(−iπm/2)."""

    hp = HomotopyPoint.base(wf.manifold) if hp is None else hp
    looped = hp.looped(loop)
    shift = wf.phase(looped) - wf.phase(hp)
    index = maslov_index(wf.manifold, loop)
    return cmath.exp(1j * shift / wf.hbar) * cmath.exp(-0.5j * math.pi * index)


def cover_wavefunction_single_valued(
    wf: CoverWavefunction,
    loops: Optional[Sequence[LoopClass]] = None,
    tol: Optional[float] = None,
    hp: Optional[HomotopyPoint] = None,
) -> bool:
    """True iff Ψ(γ̌ž) = Ψ(ž) for every loop (default: the generators).

    The phase shift is read from ``wf`` itself, so translated or otherwise
    rephased wavefunctions are judged by their own monodromy; the residue
    shift/(2πħ) − m/4 must lie within ``tol`` (default TOL_EBK) of an integer.
    """

    tol = settings.TOL_EBK if tol is None else tol
    loops = LoopClass.generators(wf.manifold) if loops is None else list(loops)
    hp = HomotopyPoint.base(wf.manifold) if hp is None else hp
    for loop in loops:
        shift = wf.phase(hp.looped(loop)) - wf.phase(hp)
        residue = shift / (2.0 * math.pi * wf.hbar) - maslov_index(wf.manifold, loop) / 4.0
        if abs(residue - round(residue)) > tol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    """ψ(x) sampled on a strictly increasing 1-D grid."""

    grid: np.ndarray
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self) -> None:
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=complex)
        if grid.ndim != 1 or grid.size < 2:
            raise DimensionMismatch("grid must be one-dimensional with at least two nodes")
        if values.shape != grid.shape:
            raise DimensionMismatch("values must match the grid", details={"grid": grid.shape, "values": values.shape})
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("wavefunction samples must be finite")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def is_uniform(self) -> bool:
        return bool(np.allclose(np.diff(self.grid), self.step, rtol=GRID_RTOL, atol=0.0))

    def norm(self) -> float:
        """Discrete L² norm with the rectangle rule on the grid."""

        weights = np.gradient(self.grid) if not self.is_uniform else self.step
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2 * weights)))

    def with_values(self, values: np.ndarray) -> "SampledWavefunction":
        return SampledWavefunction(self.grid, values, self.hbar)

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        table = np.column_stack([self.grid, self.values.real, self.values.imag])
        np.savetxt(path, table, delimiter=",", fmt=FLOAT_FORMAT, header="x,re,im", comments="")
        return path

    @classmethod
    def from_csv(cls, path: Path, hbar: float = 1.0) -> "SampledWavefunction":
        table = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        return cls(table[:, 0], table[:, 1] + 1j * table[:, 2], hbar)


def gaussian_packet(
    grid: np.ndarray, x0: float = 0.0, p0: float = 0.0, width: float = 1.0, hbar: float = 1.0
) -> SampledWavefunction:
    """Coherent state (πw²)^(−1/4) exp(−(x−x0)²/2w² + i p0 x/ħ), unit norm on ℝ."""

    x = np.asarray(grid, dtype=float)
    envelope = (math.pi * width**2) ** -0.25 * np.exp(-((x - x0) ** 2) / (2.0 * width**2))
    return SampledWavefunction(x, envelope * np.exp(1j * p0 * x / hbar), hbar)


def _shift_samples(wf: SampledWavefunction, x_a: float, interpolate: bool) -> np.ndarray:
    """ψ(x − x_a) on the grid: index shift with zero fill, or spectral shift."""

    if x_a == 0.0:
        return np.array(wf.values)
    if not wf.is_uniform:
        raise DomainViolation("translations need a uniform grid")
    ratio = x_a / wf.step
    nearest = round(ratio)
    if abs(ratio - nearest) <= 1e-9 * max(1.0, abs(ratio)):
        shifted = np.zeros_like(wf.values)
        k = int(nearest)
        if k >= wf.values.size or -k >= wf.values.size:
            return shifted
        if k >= 0:
            shifted[k:] = wf.values[: wf.values.size - k]
        else:
            shifted[:k] = wf.values[-k:]
        return shifted
    if not interpolate:
        raise DomainViolation(
            "shift is not a multiple of the grid step",
            details={"x_a": x_a, "step": wf.step, "ratio": ratio},
        )
    wavenumbers = 2.0 * math.pi * fft.fftfreq(wf.values.size, d=wf.step)
    return fft.ifft(fft.fft(wf.values) * np.exp(-1j * wavenumbers * x_a))


def weyl_translate(wf: SampledWavefunction, z_a: PhasePoint, interpolate: bool = False) -> SampledWavefunction:
    """T̂(z_a)ψ(x) = exp((i/ħ)(p_a x − ½ p_a x_a))·ψ(x − x_a) on a 1-D grid."""

    if z_a.n != 1:
        raise DimensionMismatch("sampled wavefunctions are one-dimensional", details={"n": z_a.n})
    x_a, p_a = float(z_a.x[0]), float(z_a.p[0])
    shifted = _shift_samples(wf, x_a, interpolate)
    factor = np.exp(1j * (p_a * wf.grid - 0.5 * p_a * x_a) / wf.hbar)
    return wf.with_values(factor * shifted)


def weyl_composition_defect(
    wf: SampledWavefunction,
    z_a: PhasePoint,
    z_b: PhasePoint,
    interpolate: bool = False,
    floor: float = 1e-6,
) -> tuple[float, float]:
    """(mean phase, max deviation) of the pointwise ratio T̂(z_a+z_b)ψ / T̂(z_a)T̂(z_b)ψ.

    Only samples whose magnitude exceeds ``floor`` times the peak enter; the
    mean phase should equal −σ(z_a, z_b)/2ħ.
    """

    joint = weyl_translate(wf, z_a + z_b, interpolate).values
    sequential = weyl_translate(weyl_translate(wf, z_b, interpolate), z_a, interpolate).values
    magnitude = np.abs(sequential)
    mask = magnitude > floor * magnitude.max()
    if not np.any(mask):
        raise DomainViolation("translated wavefunction vanishes on the grid")
    products = joint[mask] * np.conj(sequential[mask])
    mean_phase = float(np.angle(np.sum(products)))
    deviation = float(np.max(np.abs(np.angle(products * np.exp(-1j * mean_phase)))))
    return mean_phase, deviation


def expected_composition_phase(z_a: PhasePoint, z_b: PhasePoint, hbar: float) -> float:
    return -0.5 * symplectic_form(z_a, z_b) / hbar


__all__ = [
    "CoverWavefunction",
    "SampledWavefunction",
    "classical_weyl_action",
    "classical_ordering_defect",
    "monodromy_factor",
    "cover_wavefunction_single_valued",
    "gaussian_packet",
    "weyl_translate",
    "weyl_composition_defect",
    "expected_composition_phase",
]
