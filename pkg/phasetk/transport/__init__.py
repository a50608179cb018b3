"""Phase transport under flows, frame changes, translations and displacements."""

from phasetk.dynamics.curves import CurveSpec
from phasetk.transport.phase import (
    TransportedPhase,
    base_point_defect,
    frame_lagrangian_phase,
    frame_phase,
    invariant_manifold_defect,
    lagrangian_phase,
    quadratic_transport_phase,
    transport_phase,
    transport_phase_many,
)
from phasetk.transport.translations import (
    covariance_defect,
    displacement_phase,
    polygonal_displacement_phase,
    sequential_translation_phase,
    translation_commutation_defects,
    translation_increment,
    translation_phase,
)

__all__ = [
    "CurveSpec",
    "TransportedPhase",
    "base_point_defect",
    "frame_lagrangian_phase",
    "frame_phase",
    "invariant_manifold_defect",
    "lagrangian_phase",
    "quadratic_transport_phase",
    "transport_phase",
    "transport_phase_many",
    "covariance_defect",
    "displacement_phase",
    "polygonal_displacement_phase",
    "sequential_translation_phase",
    "translation_commutation_defects",
    "translation_increment",
    "translation_phase",
]
