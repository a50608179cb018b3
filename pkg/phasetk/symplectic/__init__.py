"""Linear symplectic algebra."""

from phasetk.symplectic.linear import (
    LagrangianPlane,
    PhasePoint,
    SymplecticMap,
    free_generating_function,
    free_generating_gradients,
    frame_phase_shift,
    is_lagrangian_plane,
    is_symplectic,
    pullback_form_defect,
    standard_symplectic_matrix,
    symplectic_defect,
    symplectic_form,
)

__all__ = [
    "LagrangianPlane",
    "PhasePoint",
    "SymplecticMap",
    "free_generating_function",
    "free_generating_gradients",
    "frame_phase_shift",
    "is_lagrangian_plane",
    "is_symplectic",
    "pullback_form_defect",
    "standard_symplectic_matrix",
    "symplectic_defect",
    "symplectic_form",
]
