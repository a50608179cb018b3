import numpy as np
import pytest

from phasetk.dynamics.hamiltonians import anharmonic, free_particle, harmonic_oscillator
from phasetk.manifolds.base import CircleManifold, TorusManifold


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def circle():
    return CircleManifold(1.0)


@pytest.fixture
def torus():
    return TorusManifold([1.0, 0.7])


@pytest.fixture
def harmonic():
    return harmonic_oscillator()


@pytest.fixture
def free():
    return free_particle()


@pytest.fixture
def quartic():
    return anharmonic()
