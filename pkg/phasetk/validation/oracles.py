"""Closed-form phase laws paired with independent quadrature/flow evaluations.

Every oracle takes the case parameters and a seeded generator and returns a
list of (computed, expected) pairs, one per randomized trial.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from phasetk.dynamics.curves import CurveSpec
from phasetk.dynamics.flow import invariance_defect
from phasetk.dynamics.hamiltonians import anharmonic, displacement, harmonic_oscillator, quadratic, translation
from phasetk.manifolds.base import CircleManifold, LagrangianManifold, TorusManifold
from phasetk.manifolds.homotopy import HomotopyPoint
from phasetk.semiclassical.wavefunctions import expected_composition_phase, gaussian_packet, weyl_composition_defect
from phasetk.symplectic.linear import (
    PhasePoint,
    SymplecticMap,
    free_generating_function,
    frame_phase_shift,
    symplectic_form,
)
from phasetk.transport.phase import (
    base_point_defect,
    frame_lagrangian_phase,
    lagrangian_phase,
    quadratic_transport_phase,
    transport_phase,
)
from phasetk.transport.translations import displacement_phase, translation_commutation_defects, translation_phase

Pair = Tuple[float, float]
Oracle = Callable[[Dict[str, Any], np.random.Generator], List[Pair]]


def _torus(params: Dict[str, Any], rng: np.random.Generator) -> LagrangianManifold:
    n = int(params.get("n", 1))
    radii = rng.uniform(0.5, 1.5, size=n)
    return TorusManifold(radii)


def _cover_point(manifold: LagrangianManifold, rng: np.random.Generator) -> HomotopyPoint:
    theta = rng.uniform(0.0, 2.0 * math.pi, size=manifold.n)
    windings = rng.integers(-1, 2, size=manifold.n_periodic)
    return HomotopyPoint.on(manifold, theta, windings.tolist())


def _random_point(n: int, rng: np.random.Generator, scale: float = 1.0) -> PhasePoint:
    return PhasePoint.from_vector(rng.uniform(-scale, scale, size=2 * n))


def _trials(params: Dict[str, Any]) -> int:
    return int(params.get("trials", 10))


def quadratic_flow(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    pairs = []
    for _ in range(_trials(params)):
        manifold = _torus(params, rng)
        n = manifold.n
        root = rng.normal(scale=0.5, size=(2 * n, 2 * n))
        Q = root @ root.T + np.eye(2 * n)
        t = float(params.get("t", 1.0))
        hp = _cover_point(manifold, rng)
        closed = quadratic_transport_phase(SymplecticMap.from_quadratic_hamiltonian(Q, t), manifold, hp)
        flowed = transport_phase(
            quadratic(Q), manifold, hp, t, steps=params.get("steps", 200), method=params.get("method", "gauss4")
        ).value
        pairs.append((flowed, closed))
    return pairs


def translation_law(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    pairs = []
    for _ in range(_trials(params)):
        manifold = _torus(params, rng)
        z_a = _random_point(manifold.n, rng, float(params.get("scale", 1.0)))
        hp = _cover_point(manifold, rng)
        flowed = transport_phase(
            translation(z_a), manifold, hp, 1.0, steps=params.get("steps", 16), method=params.get("method", "gauss4")
        ).value
        pairs.append((translation_phase(z_a, manifold, hp), flowed))
    return pairs


def _commutation(params: Dict[str, Any], rng: np.random.Generator, component: int) -> List[Pair]:
    pairs = []
    manifold = _torus(params, rng)
    for _ in range(_trials(params)):
        z_a = _random_point(manifold.n, rng, float(params.get("scale", 2.0)))
        z_b = _random_point(manifold.n, rng, float(params.get("scale", 2.0)))
        hp = _cover_point(manifold, rng)
        defects = translation_commutation_defects(z_a, z_b, manifold, hp)
        sigma = symplectic_form(z_a, z_b)
        expected = -0.5 * sigma if component == 0 else sigma
        pairs.append((defects[component], expected))
    return pairs


def translation_composition(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    return _commutation(params, rng, 0)


def translation_commutator(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    return _commutation(params, rng, 1)


def displacement_law(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    pairs = []
    for _ in range(_trials(params)):
        manifold = CircleManifold(rng.uniform(0.5, 1.5))
        center = _random_point(1, rng, 0.5)
        curve = CurveSpec.circle(rng.uniform(0.3, 1.2), center=center, omega=rng.uniform(0.5, 2.0))
        t = float(params.get("t", 1.3))
        hp = _cover_point(manifold, rng)
        closed = displacement_phase(curve, manifold, hp, t)
        flowed = transport_phase(
            displacement(curve), manifold, hp, t, steps=params.get("steps", 200), method=params.get("method", "gauss4")
        ).value
        pairs.append((flowed, closed))
    return pairs


def generating_function(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    pairs = []
    n = int(params.get("n", 2))
    while len(pairs) < _trials(params):
        S = SymplecticMap.random(n, rng)
        if not S.is_free(1e-3):
            continue
        z = _random_point(n, rng)
        image = S.apply(z)
        pairs.append((free_generating_function(S, image.x, z.x), frame_phase_shift(S, z)))
    return pairs


def frame_invariance(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    pairs = []
    for _ in range(_trials(params)):
        manifold = _torus(params, rng)
        R = SymplecticMap.random(manifold.n, rng)
        hp = _cover_point(manifold, rng)
        pairs.append((frame_lagrangian_phase(R, manifold, hp), lagrangian_phase(manifold, hp)))
    return pairs


def base_point(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    hamiltonians = [harmonic_oscillator(), anharmonic()]
    pairs = []
    for index in range(_trials(params)):
        manifold = CircleManifold(rng.uniform(0.5, 1.5))
        hp = _cover_point(manifold, rng)
        H = hamiltonians[index % len(hamiltonians)]
        defect = base_point_defect(
            H,
            manifold,
            hp,
            float(params.get("t", 1.0)),
            samples=int(params.get("samples", 1025)),
            steps=params.get("steps", 128),
            method=params.get("method", "gauss4"),
        )
        pairs.append((defect, 0.0))
    return pairs


def relative_invariance(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    hamiltonians = [harmonic_oscillator(), anharmonic()]
    pairs = []
    for index in range(_trials(params)):
        H = hamiltonians[index % len(hamiltonians)]
        start, end = _random_point(1, rng), _random_point(1, rng)
        s = np.linspace(0.0, 1.0, int(params.get("samples", 257)))[:, None]
        wiggle = 0.2 * np.sin(math.pi * s) * np.array([[1.0, -1.0]])
        curve = start.as_vector() + s * (end.as_vector() - start.as_vector()) + wiggle
        defect = invariance_defect(
            H, curve, float(params.get("t", 1.0)), steps=params.get("steps", 1024), method=params.get("method")
        )
        pairs.append((defect, 0.0))
    return pairs


def weyl_composition(params: Dict[str, Any], rng: np.random.Generator) -> List[Pair]:
    size = int(params.get("points", 1024))
    half_width = float(params.get("half_width", 20.0))
    grid = np.linspace(-half_width, half_width, size, endpoint=False)
    step = grid[1] - grid[0]
    hbar = float(params.get("hbar", 1.0))
    wf = gaussian_packet(grid, width=1.0, hbar=hbar)
    pairs = []
    for _ in range(_trials(params)):
        z_a = PhasePoint([step * rng.integers(-40, 41)], [rng.uniform(-2.0, 2.0)])
        z_b = PhasePoint([step * rng.integers(-40, 41)], [rng.uniform(-2.0, 2.0)])
        mean_phase, _ = weyl_composition_defect(wf, z_a, z_b)
        expected = expected_composition_phase(z_a, z_b, hbar)
        wrapped = math.remainder(mean_phase - expected, 2.0 * math.pi)
        pairs.append((expected + wrapped, expected))
    return pairs


ORACLES: Dict[str, Oracle] = {
    "stv": quadratic_flow,
    "eg1": translation_law,
    "eg2": translation_composition,
    "eg3": translation_commutator,
    "phg": displacement_law,
    "ph6": generating_function,
    "fif": base_point,
    "fund": relative_invariance,
    "laz": frame_invariance,
    "weyl": weyl_composition,
}

# law checked by each tag, printed next to it by the self-test
LAWS: Dict[str, str] = {
    "stv": "quadratic-flow",
    "eg1": "translation",
    "eg2": "translation-composition",
    "eg3": "translation-commutator",
    "phg": "displacement",
    "ph6": "generating-function",
    "fif": "base-point",
    "fund": "relative-invariance",
    "laz": "frame-invariance",
    "weyl": "weyl-composition",
}


__all__ = ["LAWS", "ORACLES", "Oracle", "Pair"]
