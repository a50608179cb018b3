import math

import numpy as np
import pytest

from phasetk.core.exceptions import DimensionMismatch, DomainViolation, TopologyError
from phasetk.manifolds import CircleManifold, HomotopyPoint, LoopClass, QuadraticGraphManifold, TorusManifold, phase
from phasetk.semiclassical import (
    CoverWavefunction,
    SampledWavefunction,
    classical_ordering_defect,
    classical_weyl_action,
    cover_wavefunction_single_valued,
    ebk_check,
    ebk_residue,
    expected_composition_phase,
    gaussian_packet,
    maslov_index,
    monodromy_factor,
    weyl_composition_defect,
    weyl_translate,
)
from phasetk.symplectic.linear import PhasePoint, symplectic_form


@pytest.fixture
def grid():
    return np.linspace(-20.0, 20.0, 1024, endpoint=False)


@pytest.mark.parametrize("winding,expected", [(1, 2), (-1, -2), (2, 4), (0, 0)])
def test_circle_maslov_index(circle, winding, expected):
    assert maslov_index(circle, LoopClass((winding,))) == expected


def test_maslov_index_is_additive_on_the_torus(torus):
    assert maslov_index(torus, LoopClass((1, 0))) == 2
    assert maslov_index(torus, LoopClass((0, 1))) == 2
    assert maslov_index(torus, LoopClass((1, 1))) == 4
    assert maslov_index(torus, LoopClass((1, -1))) == 0


@pytest.mark.parametrize("samples", [32, 256, 2048])
def test_maslov_index_does_not_depend_on_the_scan_resolution(torus, samples):
    loops = [LoopClass((1, 0)), LoopClass((0, 1)), LoopClass((1, 1)), LoopClass((2, -1)), LoopClass((-1, -1))]
    assert [maslov_index(torus, loop, samples=samples) for loop in loops] == [2, 2, 4, 2, -4]


def test_maslov_index_does_not_depend_on_the_start(circle):
    for start in (0.1, 1.0, 2.5, 4.0):
        assert maslov_index(circle, LoopClass((1,)), start=[start]) == 2


def test_maslov_index_on_exact_manifold():
    manifold = QuadraticGraphManifold([[1.0]])
    assert maslov_index(manifold, LoopClass(())) == 0
    with pytest.raises(TopologyError):
        maslov_index(manifold, LoopClass((1,)))


def test_ebk_residue():
    assert ebk_residue(-3 * math.pi, 2, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert ebk_residue(-math.pi, 2, 0.5) == pytest.approx(0.5)
    assert ebk_residue(2.2 * math.pi, 0, 1.0) == pytest.approx(0.1)


def test_unit_circle_is_quantized_at_unit_hbar(circle):
    (report,) = ebk_check(circle, 1.0)
    assert report.windings == (1,)
    assert report.action == pytest.approx(-math.pi, abs=1e-9)
    assert report.maslov == 2
    assert report.quantized
    assert report.to_dict()["windings"] == [1]


def test_ebk_levels():
    for level in range(4):
        (report,) = ebk_check(CircleManifold(math.sqrt(2 * level + 1)), 1.0)
        assert report.quantized, level
    (report,) = ebk_check(CircleManifold(math.sqrt(1.05)), 1.0)
    assert not report.quantized
    assert report.residue == pytest.approx(0.025, abs=1e-8)


def test_ebk_check_on_torus_reports_every_generator():
    reports = ebk_check(TorusManifold([1.0, math.sqrt(3.0)]), 1.0)
    assert [r.windings for r in reports] == [(1, 0), (0, 1)]
    assert all(r.quantized for r in reports)


def test_ebk_check_rejects_non_positive_hbar(circle):
    with pytest.raises(ValueError):
        ebk_check(circle, 0.0)


def test_monodromy_factor(circle):
    quantized = CoverWavefunction(circle, hbar=1.0)
    assert monodromy_factor(quantized, LoopClass((1,))) == pytest.approx(1.0, abs=1e-9)
    assert cover_wavefunction_single_valued(quantized)

    detuned = CoverWavefunction(CircleManifold(math.sqrt(2.0)), hbar=1.0)
    assert monodromy_factor(detuned, LoopClass((1,))) == pytest.approx(-1.0, abs=1e-9)
    assert not cover_wavefunction_single_valued(detuned)


def test_single_valuedness_reads_the_wavefunction_phase(circle):
    quantized = CoverWavefunction(circle, hbar=1.0)
    translated = classical_weyl_action(quantized, PhasePoint([0.4], [-1.1]))
    assert cover_wavefunction_single_valued(translated)
    assert cover_wavefunction_single_valued(translated, hp=HomotopyPoint.on(circle, [2.0]))

    # half a cycle of extra phase per turn breaks single-valuedness on a quantized circle
    twisted = CoverWavefunction(circle, hbar=1.0, phase_source=lambda hp: phase(circle, hp) + 0.5 * hp.lift[0])
    assert not cover_wavefunction_single_valued(twisted)
    assert monodromy_factor(twisted, LoopClass((1,))) == pytest.approx(-1.0, abs=1e-9)


def test_cover_wavefunction_value(circle):
    wf = CoverWavefunction(circle, hbar=0.5, rho=lambda theta: 4.0)
    hp = HomotopyPoint.on(circle, [math.pi / 2])
    assert wf(hp) == pytest.approx(2.0 * complex(math.cos(-math.pi / 2), math.sin(-math.pi / 2)), abs=1e-9)
    with pytest.raises(ValueError):
        CoverWavefunction(circle, hbar=-1.0)


def test_classical_translation_moves_point_and_phase(circle):
    wf = CoverWavefunction(circle, hbar=1.0)
    hp = HomotopyPoint.on(circle, [0.0])
    z_a = PhasePoint([1.0], [1.0])
    moved = classical_weyl_action(wf, z_a)
    assert moved.point(hp).isclose(PhasePoint([2.0], [1.0]))
    # x = 1 at θ = 0: ½·1·1 + 1·1
    assert moved.phase(hp) == pytest.approx(1.5)


def test_classical_ordering_defect_is_sigma_over_hbar(torus, rng):
    wf = CoverWavefunction(torus, hbar=0.3)
    hp = HomotopyPoint.on(torus, [0.4, 2.0])
    for _ in range(10):
        z_a = PhasePoint.from_vector(rng.normal(size=4))
        z_b = PhasePoint.from_vector(rng.normal(size=4))
        expected = symplectic_form(z_a, z_b) / 0.3
        assert classical_ordering_defect(wf, z_a, z_b, hp) == pytest.approx(expected, abs=1e-10)


def test_gaussian_packet_is_normalised(grid):
    assert gaussian_packet(grid, x0=1.0, p0=-2.0, width=1.3).norm() == pytest.approx(1.0, abs=1e-12)


def test_weyl_translation_on_grid_steps(grid):
    wf = gaussian_packet(grid)
    step = grid[1] - grid[0]
    moved = weyl_translate(wf, PhasePoint([3 * step], [0.0]))
    np.testing.assert_allclose(moved.values[3:], wf.values[:-3], atol=1e-15)
    assert moved.norm() == pytest.approx(1.0, abs=1e-12)

    boosted = weyl_translate(wf, PhasePoint([0.0], [1.5]))
    np.testing.assert_allclose(boosted.values, wf.values * np.exp(1.5j * grid), atol=1e-14)


def test_weyl_translation_off_grid_needs_interpolation(grid):
    wf = gaussian_packet(grid)
    z_a = PhasePoint([0.37], [0.0])
    with pytest.raises(DomainViolation):
        weyl_translate(wf, z_a)
    moved = weyl_translate(wf, z_a, interpolate=True)
    np.testing.assert_allclose(moved.values, gaussian_packet(grid, x0=0.37).values, atol=1e-10)


def test_weyl_translation_rejects_non_uniform_grid():
    grid = np.array([0.0, 0.1, 0.3, 0.6])
    wf = SampledWavefunction(grid, np.ones(4))
    with pytest.raises(DomainViolation):
        weyl_translate(wf, PhasePoint([0.1], [0.0]))


def test_weyl_composition_phase(grid):
    wf = gaussian_packet(grid, width=1.0)
    step = grid[1] - grid[0]
    z_a = PhasePoint([5 * step], [0.8])
    z_b = PhasePoint([-12 * step], [-1.1])
    mean_phase, deviation = weyl_composition_defect(wf, z_a, z_b)
    assert mean_phase == pytest.approx(expected_composition_phase(z_a, z_b, 1.0), abs=1e-12)
    assert deviation < 1e-9


def test_sampled_wavefunction_validation():
    with pytest.raises(ValueError):
        SampledWavefunction([0.0, 0.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        SampledWavefunction([0.0, 1.0], [1.0])
    with pytest.raises(DimensionMismatch):
        weyl_translate(SampledWavefunction([0.0, 1.0], [1.0, 1.0]), PhasePoint([0.0, 0.0], [0.0, 0.0]))


def test_sampled_wavefunction_csv(tmp_path, grid):
    wf = gaussian_packet(grid, p0=0.5)
    path = wf.to_csv(tmp_path / "psi.csv")
    assert path.read_text().splitlines()[0] == "x,re,im"
    restored = SampledWavefunction.from_csv(path)
    np.testing.assert_array_equal(restored.grid, wf.grid)
    np.testing.assert_array_equal(restored.values, wf.values)
