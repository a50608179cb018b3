"""Hamiltonians, symplectic integrators and phased flows."""

from phasetk.dynamics.curves import CurveSpec
from phasetk.dynamics.flow import (
    PhasedTrajectory,
    TrajectoryBundle,
    action_increment,
    flow,
    flow_batch,
    flow_jacobian,
    flow_map,
    invariance_defect,
)
from phasetk.dynamics.hamiltonian import Hamiltonian
from phasetk.dynamics.hamiltonians import (
    BUILTIN_HAMILTONIANS,
    anharmonic,
    displacement,
    free_particle,
    harmonic_oscillator,
    quadratic,
    translation,
)
from phasetk.dynamics.integrators import (
    ImplicitRungeKutta,
    Integrator,
    StormerVerlet,
    gauss_legendre4,
    get_integrator,
    implicit_midpoint,
)

__all__ = [
    "CurveSpec",
    "PhasedTrajectory",
    "TrajectoryBundle",
    "action_increment",
    "flow",
    "flow_batch",
    "flow_jacobian",
    "flow_map",
    "invariance_defect",
    "Hamiltonian",
    "BUILTIN_HAMILTONIANS",
    "anharmonic",
    "displacement",
    "free_particle",
    "harmonic_oscillator",
    "quadratic",
    "translation",
    "ImplicitRungeKutta",
    "Integrator",
    "StormerVerlet",
    "gauss_legendre4",
    "get_integrator",
    "implicit_midpoint",
]
