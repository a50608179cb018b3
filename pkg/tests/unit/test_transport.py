import math

import numpy as np
import pytest

from phasetk.core.exceptions import DomainViolation
from phasetk.dynamics import CurveSpec, anharmonic, displacement, harmonic_oscillator, quadratic, translation
from phasetk.manifolds import CircleManifold, HomotopyPoint, QuadraticGraphManifold, phase
from phasetk.symplectic.linear import PhasePoint, SymplecticMap, symplectic_form
from phasetk.transport import (
    base_point_defect,
    covariance_defect,
    displacement_phase,
    frame_lagrangian_phase,
    invariant_manifold_defect,
    lagrangian_phase,
    polygonal_displacement_phase,
    quadratic_transport_phase,
    sequential_translation_phase,
    translation_commutation_defects,
    translation_increment,
    translation_phase,
    transport_phase,
    transport_phase_many,
)


def test_translation_increment_values():
    z_a = PhasePoint([1.0], [1.0])
    assert translation_increment(z_a, [0.0]) == pytest.approx(0.5)
    assert translation_increment(z_a, [2.0]) == pytest.approx(2.5)


def test_unit_translations_commutation_defects(circle):
    hp = HomotopyPoint.on(circle, [0.9])
    joint_defect, commutator = translation_commutation_defects(
        PhasePoint([1.0], [0.0]), PhasePoint([0.0], [1.0]), circle, hp
    )
    assert joint_defect == pytest.approx(0.5, abs=1e-12)
    assert commutator == pytest.approx(-1.0, abs=1e-12)


def test_commutation_defects_follow_sigma(torus, rng):
    for _ in range(20):
        z_a = PhasePoint.from_vector(rng.uniform(-2, 2, size=4))
        z_b = PhasePoint.from_vector(rng.uniform(-2, 2, size=4))
        hp = HomotopyPoint.on(torus, rng.uniform(0, 2 * math.pi, size=2), [1, 0])
        joint_defect, commutator = translation_commutation_defects(z_a, z_b, torus, hp)
        sigma = symplectic_form(z_a, z_b)
        assert joint_defect == pytest.approx(-0.5 * sigma, abs=1e-12)
        assert commutator == pytest.approx(sigma, abs=1e-12)


def test_sequential_translations_start_from_base_phase():
    shifts = [PhasePoint([1.0], [2.0]), PhasePoint([-0.5], [0.5])]
    # first: ½·2·1 + 2·0 = 1, then position 1: ½·0.5·(−0.5) + 0.5·1 = 0.375
    assert sequential_translation_phase(0.25, [0.0], shifts) == pytest.approx(1.625)


def test_translation_phase_matches_flow(circle):
    z_a = PhasePoint([0.6], [-0.8])
    hp = HomotopyPoint.on(circle, [2.2], [-1])
    flowed = transport_phase(translation(z_a), circle, hp, 1.0, steps=16, method="gauss4")
    assert flowed.value == pytest.approx(translation_phase(z_a, circle, hp), abs=1e-9)
    assert flowed.endpoint.isclose(hp.point() + z_a, atol=1e-12)


def test_translation_covariance(torus, rng):
    for _ in range(10):
        S = SymplecticMap.random(2, rng)
        z_a = PhasePoint.from_vector(rng.uniform(-1, 1, size=4))
        hp = HomotopyPoint.on(torus, rng.uniform(0, 2 * math.pi, size=2))
        assert covariance_defect(S, z_a, torus, hp) == pytest.approx(0.0, abs=1e-10)


def test_quadratic_transport_matches_flow(circle):
    Q = np.array([[1.5, 0.3], [0.3, 0.8]])
    hp = HomotopyPoint.on(circle, [1.0], [1])
    t = 0.9
    closed = quadratic_transport_phase(SymplecticMap.from_quadratic_hamiltonian(Q, t), circle, hp)
    flowed = transport_phase(quadratic(Q), circle, hp, t, steps=200, method="gauss4")
    assert flowed.value == pytest.approx(closed, abs=1e-8)


def test_harmonic_increment_on_the_circle(circle, harmonic):
    # start at θ₀: increment = −sin(2θ₀)/2 after a quarter period
    for theta in (0.0, 0.4, 2.5):
        hp = HomotopyPoint.on(circle, [theta])
        transported = transport_phase(harmonic, circle, hp, math.pi / 2, steps=256, method="gauss4")
        assert transported.increment == pytest.approx(-math.sin(2 * theta) / 2, abs=1e-8)


def test_transport_many_matches_single(circle, quartic):
    points = [HomotopyPoint.on(circle, [theta]) for theta in (0.2, 1.7, 4.0)]
    phases, finals = transport_phase_many(quartic, circle, points, 0.7, steps=64, method="gauss4")
    for hp, value, final in zip(points, phases, finals):
        single = transport_phase(quartic, circle, hp, 0.7, steps=64, method="gauss4")
        assert value == pytest.approx(single.value, abs=1e-12)
        np.testing.assert_allclose(final, single.endpoint.as_vector(), atol=1e-12)


def test_displacement_phase_matches_flow(circle):
    curve = CurveSpec.circle(0.8, center=PhasePoint([0.1], [-0.2]), omega=1.4)
    hp = HomotopyPoint.on(circle, [3.0])
    closed = displacement_phase(curve, circle, hp, 1.3)
    flowed = transport_phase(displacement(curve), circle, hp, 1.3, steps=200, method="gauss4")
    assert flowed.value == pytest.approx(closed, abs=1e-8)
    assert displacement_phase(curve, circle, hp, 0.0) == pytest.approx(phase(circle, hp))


def test_polygonal_displacement_converges(circle):
    curve = CurveSpec.circle(1.0, omega=1.0)
    hp = HomotopyPoint.on(circle, [0.5])
    exact = displacement_phase(curve, circle, hp, 2.0)
    coarse = abs(polygonal_displacement_phase(curve, circle, hp, 2.0, 16) - exact)
    fine = abs(polygonal_displacement_phase(curve, circle, hp, 2.0, 64) - exact)
    assert fine < coarse / 8
    with pytest.raises(ValueError):
        polygonal_displacement_phase(curve, circle, hp, 2.0, 0)


def test_straight_displacement_is_a_translation(circle):
    start, end = PhasePoint([0.0], [0.0]), PhasePoint([0.7], [-0.4])
    curve = CurveSpec.segment(start, end)
    hp = HomotopyPoint.on(circle, [1.1])
    assert displacement_phase(curve, circle, hp, 1.0) == pytest.approx(translation_phase(end, circle, hp), abs=1e-10)


def test_lagrangian_phase_is_frame_independent(torus, rng):
    for _ in range(10):
        R = SymplecticMap.random(2, rng)
        hp = HomotopyPoint.on(torus, rng.uniform(0, 2 * math.pi, size=2), [0, -1])
        assert frame_lagrangian_phase(R, torus, hp) == pytest.approx(lagrangian_phase(torus, hp), abs=1e-10)


@pytest.mark.parametrize("H", [harmonic_oscillator(), anharmonic()], ids=["harmonic", "anharmonic"])
def test_base_point_defect_vanishes(circle, H):
    hp = HomotopyPoint.on(circle, [2.0], [1])
    defect = base_point_defect(H, circle, hp, 1.0, samples=1025, steps=128, method="gauss4")
    assert abs(defect) < 1e-6


def test_base_point_defect_on_exact_manifold():
    manifold = QuadraticGraphManifold([[0.5]])
    hp = HomotopyPoint.on(manifold, [1.5])
    assert abs(base_point_defect(anharmonic(), manifold, hp, 0.5, samples=513, steps=128, method="gauss4")) < 1e-6


@pytest.mark.parametrize("t", [0.1, 1.0, math.pi])
def test_invariant_circle_keeps_its_phase(circle, harmonic, t):
    hp = HomotopyPoint.on(circle, [0.7])
    assert abs(invariant_manifold_defect(harmonic, circle, hp, t, steps=512, method="gauss4")) < 1e-7


def test_flow_leaving_the_manifold_is_a_domain_violation(circle, free):
    hp = HomotopyPoint.on(circle, [0.7])
    with pytest.raises(DomainViolation) as excinfo:
        invariant_manifold_defect(free, circle, hp, 1.0, steps=64)
    assert excinfo.value.details["residual"] > 1e-3
