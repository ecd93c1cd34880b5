import numpy as np
import pytest

from hulllab.geometry import Polygon, unit_area_triangle, unit_square


@pytest.fixture
def square() -> Polygon:
    return unit_square()


@pytest.fixture
def triangle() -> Polygon:
    return unit_area_triangle()


@pytest.fixture
def pentagon() -> Polygon:
    return Polygon(
        [(0.0, 0.0), (1.1, -0.2), (1.6, 0.7), (0.8, 1.3), (-0.2, 0.9)]
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
