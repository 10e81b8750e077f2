import numpy as np
import pytest

from geometry.polygon import regular_polygon, validate_polygon

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]
QUAD = [[0, 0], [2, 0], [1, 1], [0, 1]]
POISSON_QUAD = [[0, 0], [1, 0], [1, 0.5], [0, 1]]
PENTAGON = [[0, 0], [1, 0], [1, 0.5], [0.5, 1], [0, 0.5]]
TRIANGLE = [[0, 0], [1, 0], [0, 1]]


@pytest.fixture
def square():
    return validate_polygon(SQUARE)


@pytest.fixture
def quad():
    return validate_polygon(QUAD)


@pytest.fixture
def poisson_quad():
    return validate_polygon(POISSON_QUAD)


@pytest.fixture
def pentagon():
    return validate_polygon(PENTAGON)


@pytest.fixture
def triangle():
    return validate_polygon(TRIANGLE)


@pytest.fixture
def octagon():
    return regular_polygon(8, 1.0)


@pytest.fixture(params=["triangle", "square", "quad", "poisson_quad", "pentagon", "octagon"])
def any_polygon(request):
    return request.getfixturevalue(request.param)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))


def interior_points(poly, count, rng, margin=1e-3):
    """Random points at least `margin` diameters inside the polygon."""
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)
    out = np.empty((0, 2))
    while len(out) < count:
        cand = lo + (hi - lo) * rng.random((4 * count, 2))
        keep = poly.min_distance(cand[:, 0], cand[:, 1]) > margin * poly.diameter
        out = np.concatenate([out, cand[keep]])
    return out[:count]
