import numpy as np
import pytest

from contactkit import zoo


@pytest.fixture(scope="session")
def sphere():
    return zoo.standard_sphere(1)


@pytest.fixture(scope="session")
def sphere5():
    return zoo.standard_sphere(2)


@pytest.fixture(scope="session")
def torus():
    return zoo.torus3(1)


@pytest.fixture(scope="session")
def torus2():
    return zoo.torus3(2)


@pytest.fixture(scope="session")
def golden():
    return zoo.weighted_sphere([1.0, (1.0 + np.sqrt(5.0)) / 2.0])


@pytest.fixture(scope="session")
def cotangent():
    return zoo.unit_cotangent_sphere()


def sample(m, count, seed=0):
    """Random points on m with a fixed seed."""
    return m.random_points(count, np.random.default_rng(seed))
