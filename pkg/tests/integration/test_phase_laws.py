"""Cross-module checks of the phase laws at the accuracy the toolkit promises."""

import math

import numpy as np
import pytest

from phasetk.dynamics import anharmonic, flow_batch, harmonic_oscillator, invariance_defect
from phasetk.manifolds import CircleManifold, HomotopyPoint, LoopClass, TorusManifold, loop_period, phase
from phasetk.semiclassical import ebk_check, expected_composition_phase, gaussian_packet, weyl_composition_defect
from phasetk.symplectic.linear import PhasePoint, SymplecticMap, symplectic_form
from phasetk.transport import (
    frame_lagrangian_phase,
    invariant_manifold_defect,
    lagrangian_phase,
    translation_commutation_defects,
)
from phasetk.validation import ORACLES, OracleCase, OracleHarness

pytestmark = pytest.mark.integration


@pytest.mark.slow
@pytest.mark.parametrize("tag", ["stv", "eg1", "phg"])
def test_fifty_randomized_oracle_cases(tag):
    cases = [
        OracleCase(f"{tag}-{seed}", tag, 1e-6, seed=1000 + seed, params={"trials": 1, "n": 1 + seed % 2})
        for seed in range(50)
    ]
    report = OracleHarness(cases).run_all()
    assert report["case_count"] == 50
    assert report["tags"][tag]["passed"], report["tags"][tag]["max_error"]


def test_translation_commutation_over_random_pairs(rng):
    torus = TorusManifold([1.0, 0.6, 1.4])
    for _ in range(100):
        z_a = PhasePoint.from_vector(rng.uniform(-3, 3, size=6))
        z_b = PhasePoint.from_vector(rng.uniform(-3, 3, size=6))
        hp = HomotopyPoint.on(torus, rng.uniform(0, 2 * math.pi, size=3), rng.integers(-2, 3, size=3).tolist())
        joint_defect, commutator = translation_commutation_defects(z_a, z_b, torus, hp)
        sigma = symplectic_form(z_a, z_b)
        assert abs(joint_defect + 0.5 * sigma) <= 1e-12 * max(1.0, abs(sigma))
        assert abs(commutator - sigma) <= 1e-12 * max(1.0, abs(sigma))


def test_lagrangian_phase_over_random_frames(rng):
    torus = TorusManifold([0.8, 1.2])
    for _ in range(100):
        R = SymplecticMap.random(2, rng)
        hp = HomotopyPoint.on(torus, rng.uniform(0, 2 * math.pi, size=2), rng.integers(-1, 2, size=2).tolist())
        assert frame_lagrangian_phase(R, torus, hp) == pytest.approx(lagrangian_phase(torus, hp), abs=1e-9)


@pytest.mark.parametrize("H", [harmonic_oscillator(), anharmonic()], ids=["harmonic", "anharmonic"])
def test_relative_invariant_at_production_resolution(H):
    s = np.linspace(0.0, 1.0, 257)[:, None]
    curve = np.hstack([np.cos(2 * s), s - 0.3 * np.sin(3 * s)])
    assert abs(invariance_defect(H, curve, 1.0, steps=1024, method="gauss4")) <= 1e-7


def test_closed_form_circle_phases():
    circle = CircleManifold(1.0)
    assert loop_period(circle, LoopClass((1,))) == pytest.approx(-math.pi, abs=1e-9)
    assert phase(circle, HomotopyPoint.on(circle, [math.pi / 2])) == pytest.approx(-math.pi / 4, abs=1e-9)


@pytest.mark.parametrize("t", [0.1, 1.0, math.pi])
def test_invariant_torus_under_harmonic_flow(t):
    torus = TorusManifold([1.0, 0.7])
    hp = HomotopyPoint.on(torus, [0.4, 2.1], [1, 0])
    defect = invariant_manifold_defect(harmonic_oscillator(2), torus, hp, t, steps=512, method="gauss4")
    assert abs(defect) <= 1e-7


def test_ebk_ladder():
    for level in range(6):
        radius = math.sqrt(2 * level + 1)
        (report,) = ebk_check(CircleManifold(radius), 1.0)
        assert report.quantized and report.maslov == 2, level
        for detune in (0.95, 1.05):
            (off,) = ebk_check(CircleManifold(radius * math.sqrt(detune)), 1.0)
            assert not off.quantized, (level, detune)


def test_weyl_composition_on_random_grid_shifts(rng):
    grid = np.linspace(-20.0, 20.0, 1024, endpoint=False)
    step = grid[1] - grid[0]
    wf = gaussian_packet(grid, width=1.0)
    for _ in range(20):
        z_a = PhasePoint([step * rng.integers(-40, 41)], [rng.uniform(-2, 2)])
        z_b = PhasePoint([step * rng.integers(-40, 41)], [rng.uniform(-2, 2)])
        mean_phase, deviation = weyl_composition_defect(wf, z_a, z_b)
        expected = expected_composition_phase(z_a, z_b, 1.0)
        assert abs(math.remainder(mean_phase - expected, 2 * math.pi)) <= 1e-12
        assert deviation <= 1e-9


def test_every_bundled_oracle_is_registered():
    harness = OracleHarness()
    harness.load_default_cases()
    assert sorted(harness.tags) == sorted(ORACLES)


@pytest.mark.slow
@pytest.mark.parametrize("method", ["verlet", "midpoint"])
@pytest.mark.parametrize("steps", [4000, 8000, 16000])
def test_energy_error_stays_bounded_over_long_runs(method, steps):
    H = anharmonic()
    Z0 = np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.2]])
    t = 200.0
    dt = t / steps
    bundle = flow_batch(H, Z0, 0.0, t, steps=steps, method=method)
    error = np.abs(H.value(bundle.points, 0.0) - H.value(Z0, 0.0))
    assert error.max() <= 2.0 * dt**2
    # no secular growth: the last tenth of the run stays within the envelope of the first tenth
    tenth = steps // 10
    assert error[-tenth:].max() <= 2.0 * error[:tenth].max()
