"""EBK quantization, Maslov indices and semiclassical wavefunctions."""

from phasetk.semiclassical.ebk import EBKReport, ebk_check, ebk_residue
from phasetk.semiclassical.maslov import maslov_index
from phasetk.semiclassical.wavefunctions import (
    CoverWavefunction,
    SampledWavefunction,
    classical_ordering_defect,
    classical_weyl_action,
    cover_wavefunction_single_valued,
    expected_composition_phase,
    gaussian_packet,
    monodromy_factor,
    weyl_composition_defect,
    weyl_translate,
)

__all__ = [
    "EBKReport",
    "ebk_check",
    "ebk_residue",
    "maslov_index",
    "CoverWavefunction",
    "SampledWavefunction",
    "classical_ordering_defect",
    "classical_weyl_action",
    "cover_wavefunction_single_valued",
    "expected_composition_phase",
    "gaussian_packet",
    "monodromy_factor",
    "weyl_composition_defect",
    "weyl_translate",
]
