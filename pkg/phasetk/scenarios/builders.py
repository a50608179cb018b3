"""Turn validated scenario models into library objects."""

from __future__ import annotations

from typing import Optional

import numpy as np

from phasetk.core.exceptions import ScenarioValidationError
from phasetk.dynamics.curves import CurveSpec
from phasetk.dynamics.hamiltonian import Hamiltonian
from phasetk.dynamics.hamiltonians import (
    anharmonic,
    displacement,
    free_particle,
    harmonic_oscillator,
    quadratic,
    translation,
)
from phasetk.manifolds.base import (
    CircleManifold,
    LagrangianManifold,
    PlaneManifold,
    QuadraticGraphManifold,
    TorusManifold,
)
from phasetk.manifolds.homotopy import HomotopyPoint, LoopClass
from phasetk.models.scenario import CurveModel, GridModel, HamiltonianModel, ManifoldModel, PointModel
from phasetk.scenarios.expressions import compile_curve, compile_embedding, compile_hamiltonian, compile_potential
from phasetk.symplectic.linear import LagrangianPlane, PhasePoint


def phase_point(values: list[float], field: str) -> PhasePoint:
    if len(values) % 2 or not values:
        raise ScenarioValidationError("phase points need an even number of components", details={"field": field})
    return PhasePoint.from_vector(values)


def _domain(spec: ManifoldModel) -> Optional[tuple[list[float], list[float]]]:
    if spec.domain is None:
        return None
    if len(spec.domain) != 2:
        raise ScenarioValidationError("domain must be [lower, upper]", details={"field": "manifold.domain"})
    return spec.domain[0], spec.domain[1]


def build_curve(spec: CurveModel, field: str = "curve") -> CurveSpec:
    if spec.type == "circle":
        center = phase_point(spec.center, f"{field}.center") if spec.center is not None else None
        return CurveSpec.circle(spec.radius, center=center, omega=spec.omega)
    if spec.type == "segment":
        start = phase_point(spec.start, f"{field}.start")
        end = phase_point(spec.end, f"{field}.end")
        return CurveSpec.segment(start, end, spec.duration)
    return compile_curve(spec.components, spec.n, field=f"{field}.components")


def build_hamiltonian(spec: HamiltonianModel) -> Hamiltonian:
    if spec.type == "free":
        return free_particle(spec.n, spec.mass)
    if spec.type == "harmonic":
        return harmonic_oscillator(spec.n, spec.omega, spec.mass)
    if spec.type == "anharmonic":
        return anharmonic(spec.n, spec.quartic)
    if spec.type == "translation":
        return translation(phase_point(spec.z_a, "hamiltonian.z_a"))
    if spec.type == "displacement":
        return displacement(build_curve(spec.curve, "hamiltonian.curve"))
    if spec.type == "quadratic":
        return quadratic(spec.q)
    return compile_hamiltonian(spec.expression, spec.n)


def build_manifold(spec: ManifoldModel) -> LagrangianManifold:
    base = spec.base
    if spec.type == "circle":
        return CircleManifold(spec.radius, base=0.0 if base is None else base[0])
    if spec.type == "torus":
        return TorusManifold(spec.radii, base=base)
    if spec.type == "quadratic_graph":
        return QuadraticGraphManifold(spec.matrix)
    if spec.type == "exact":
        return compile_potential(spec.potential, spec.n, domain=_domain(spec), base=base)
    if spec.type == "plane":
        return PlaneManifold(LagrangianPlane(np.array(spec.a, dtype=float), np.array(spec.b, dtype=float)))
    return compile_embedding(spec.embedding, spec.n, spec.periodic, domain=_domain(spec), base=base)


def build_point(manifold: LagrangianManifold, spec: PointModel) -> HomotopyPoint:
    return HomotopyPoint.on(manifold, spec.theta, spec.windings)


def build_loops(manifold: LagrangianManifold, loops: Optional[list[list[int]]]) -> list[LoopClass]:
    if loops is None:
        return LoopClass.generators(manifold)
    return [LoopClass(tuple(windings)) for windings in loops]


def build_grid(specs: list[GridModel]) -> list[np.ndarray]:
    return [np.linspace(spec.min, spec.max, spec.nodes) for spec in specs]


__all__ = [
    "phase_point",
    "build_curve",
    "build_hamiltonian",
    "build_manifold",
    "build_point",
    "build_loops",
    "build_grid",
]
