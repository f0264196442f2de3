import numpy as np
import pytest

from pseudoanalytic.grid_calculus import GridDomain, ScalarField
from pseudoanalytic.symmetric_solutions import cylindrical_shell, spherical_shell
from pseudoanalytic.vekua2d import PlaneDomain


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_box():
    def make(n: int = 17) -> GridDomain:
        return GridDomain.cube((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), n)

    return make


@pytest.fixture
def cyl_box():
    return cylindrical_shell


@pytest.fixture
def sph_box():
    return spherical_shell


@pytest.fixture
def unit_square():
    def make(n: int = 33, origin=(0.0, 0.0)) -> PlaneDomain:
        return PlaneDomain.square(origin, (1.0, 1.0), n)

    return make


@pytest.fixture
def smooth_scalar():
    def make(domain: GridDomain) -> ScalarField:
        return ScalarField.from_function(domain, lambda x, y, z: np.sin(x) * np.cos(y) * np.exp(0.5 * z))

    return make


@pytest.fixture
def h2_bound():
    """K h^2 with the K used by the shipped scenarios."""

    def bound(domain, k: float = 25.0) -> float:
        h = max(domain.spacing)
        return k * h * h

    return bound
