import json

import numpy as np
import pytest

from phasetk.core.exceptions import DimensionMismatch
from phasetk.dynamics import anharmonic, free_particle
from phasetk.hamilton_jacobi import (
    breakdown_time,
    hj_solve,
    max_residual,
    solution_metadata,
    write_solution_csv,
    write_solution_metadata,
)
from phasetk.manifolds import ExactManifold, HomotopyPoint, QuadraticGraphManifold
from phasetk.transport import transport_phase


@pytest.fixture
def expanding():
    """Free particle from Φ₀ = x²/2, solved by Φ = x² / (2(1 + t))."""

    grid = np.linspace(-2.0, 2.0, 201)
    return grid, hj_solve(free_particle(), QuadraticGraphManifold([[1.0]]), grid, 1.0, steps=50)


def test_free_particle_matches_closed_form(expanding):
    grid, solution = expanding
    exact = grid**2 / (2.0 * (1.0 + solution.times[-1]))
    assert solution.valid[-1].all()
    np.testing.assert_allclose(solution.phi[-1], exact, atol=1e-6)
    np.testing.assert_allclose(solution.momentum[-1, :, 0], grid / 2.0, atol=1e-6)
    assert solution.breakdown_time == np.inf


def test_focusing_datum_breaks_down_at_the_focus():
    grid = np.linspace(-2.0, 2.0, 101)
    steps = 150
    solution = hj_solve(free_particle(), QuadraticGraphManifold([[-1.0]]), grid, 1.5, steps=steps)
    dt = 1.5 / steps
    assert abs(solution.breakdown_time - 1.0) <= 2 * dt
    assert not solution.valid[-1].any()

    half = solution.time_index(0.5)
    covered = np.abs(grid) <= 1.0 - 1e-9
    np.testing.assert_allclose(solution.phi[half][covered], -(grid[covered] ** 2) / (2 * 0.5), atol=1e-8)
    assert np.all(np.isnan(solution.phi[half][np.abs(grid) > 1.0 + 1e-9]))


@pytest.mark.parametrize("steps", [150, 151])
def test_isotropic_focus_breaks_down_between_steps(steps):
    # x_t = (1 - t) x′ in both axes, so det = (1 - t)² never changes sign
    axes = [np.linspace(-1.0, 1.0, 11)] * 2
    solution = hj_solve(free_particle(2), QuadraticGraphManifold(-np.eye(2)), axes, 1.5, steps=steps)
    assert solution.breakdown_time == pytest.approx(1.0, abs=1e-8)
    assert not solution.valid[solution.times > 1.0].any()

    half = solution.time_index(0.5)
    t = solution.times[half]
    x, y = np.meshgrid(*axes, indexing="ij")
    covered = (np.abs(x) <= (1.0 - t) + 1e-9) & (np.abs(y) <= (1.0 - t) + 1e-9)
    assert solution.valid[half][covered].all()
    exact = -(x**2 + y**2) / (2.0 * (1.0 - t))
    np.testing.assert_allclose(solution.phi[half][covered], exact[covered], atol=1e-8)


def test_breakdown_time_is_infinite_without_caustic():
    grid = np.linspace(-1.0, 1.0, 21)
    assert breakdown_time(free_particle(), QuadraticGraphManifold([[0.5]]), grid, 1.0, steps=10) == np.inf


def test_residual_is_second_order_in_time():
    grid = np.linspace(-2.0, 2.0, 41)
    H = free_particle()
    datum = QuadraticGraphManifold([[1.0]])
    coarse = max_residual(hj_solve(H, datum, grid, 1.0, steps=20), H)
    fine = max_residual(hj_solve(H, datum, grid, 1.0, steps=40), H)
    assert 3.0 < coarse / fine < 5.0


def test_characteristic_phase_equals_transported_phase():
    H = anharmonic()
    datum = QuadraticGraphManifold([[0.6]])
    grid = np.linspace(-1.0, 1.0, 11)
    solution = hj_solve(H, datum, grid, 0.8, steps=100, method="gauss4")
    for j in (0, 3, 7, 10):
        hp = HomotopyPoint.on(datum, [grid[j]])
        transported = transport_phase(H, datum, hp, 0.8, steps=100, method="gauss4")
        assert solution.characteristic_phase[-1, j] == pytest.approx(transported.value, abs=1e-10)


def test_gradient_of_solution_matches_momentum():
    datum = ExactManifold(1, lambda x: 0.1 * float(x[0]) ** 4, grad=lambda x: 0.4 * x**3)
    grid = np.linspace(-1.0, 1.0, 801)
    solution = hj_solve(free_particle(), datum, grid, 0.5, steps=50, method="gauss4")
    index = solution.time_index(0.5)
    interior = slice(2, -2)
    gradient = solution.gradient(index)[interior, 0]
    momentum = solution.momentum[index][interior, 0]
    assert np.all(np.isfinite(momentum))
    np.testing.assert_allclose(gradient, momentum, atol=1e-5)


def test_two_dimensional_quadratic_datum():
    M = np.diag([1.0, 0.5])
    axes = [np.linspace(-1.0, 1.0, 9), np.linspace(-1.0, 1.0, 9)]
    solution = hj_solve(free_particle(2), QuadraticGraphManifold(M), axes, 0.5, steps=10)
    x, y = np.meshgrid(*axes, indexing="ij")
    exact = x**2 / (2 * 1.5) + 0.5 * y**2 / (2 * 1.25)
    assert solution.valid[-1].all()
    np.testing.assert_allclose(solution.phi[-1], exact, atol=1e-8)


def test_solver_rejects_bad_input():
    with pytest.raises(ValueError):
        hj_solve(free_particle(), QuadraticGraphManifold([[1.0]]), np.array([0.0, 1.0]), 1.0)
    with pytest.raises(ValueError):
        hj_solve(free_particle(), QuadraticGraphManifold([[1.0]]), np.linspace(0, 1, 5), 0.0)
    with pytest.raises(DimensionMismatch):
        hj_solve(free_particle(2), QuadraticGraphManifold([[1.0]]), np.linspace(0, 1, 5), 1.0)


def test_solution_csv_export(expanding, tmp_path):
    _, solution = expanding
    path = write_solution_csv(solution, tmp_path / "hj" / "phi.csv")
    header = path.read_text().splitlines()[0]
    assert header == "t,x1,Phi,valid"
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    assert table.shape == (solution.times.size * 201, 4)
    assert np.all(table[:, 3] == 1.0)


def test_solution_metadata(expanding, tmp_path):
    _, solution = expanding
    metadata = solution_metadata(solution)
    assert metadata["breakdown"]["time"] is None
    assert metadata["grid"][0] == {"min": -2.0, "max": 2.0, "nodes": 201}
    path = write_solution_metadata(solution, tmp_path / "meta.json", extra={"hamiltonian": "free"})
    payload = json.loads(path.read_text())
    assert payload["hamiltonian"] == "free"
    assert payload["valid_fraction"] == 1.0
