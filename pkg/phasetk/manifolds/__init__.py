"""Lagrangian manifolds, their universal covers, phases and caustics."""

from phasetk.manifolds.base import (
    TWO_PI,
    CircleManifold,
    ExactManifold,
    LagrangianManifold,
    ParamManifold,
    PlaneManifold,
    QuadraticGraphManifold,
    TorusManifold,
)
from phasetk.manifolds.caustics import CausticSet, caustic_points, projection_determinant
from phasetk.manifolds.homotopy import HomotopyPoint, LoopClass, lift_path
from phasetk.manifolds.phase import (
    LocalGeneratingFunction,
    local_generating_function,
    loop_period,
    parameter_path_integral,
    path_action_integral,
    phase,
)

__all__ = [
    "TWO_PI",
    "CircleManifold",
    "ExactManifold",
    "LagrangianManifold",
    "ParamManifold",
    "PlaneManifold",
    "QuadraticGraphManifold",
    "TorusManifold",
    "CausticSet",
    "caustic_points",
    "projection_determinant",
    "HomotopyPoint",
    "LoopClass",
    "lift_path",
    "LocalGeneratingFunction",
    "local_generating_function",
    "loop_period",
    "parameter_path_integral",
    "path_action_integral",
    "phase",
]
