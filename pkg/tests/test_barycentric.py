import numpy as np
import pytest

from barycentric.coords_factory import CoordinatesFactory
from barycentric.coords_interface import NotInterior, OutsidePolygon
from geometry.sampling import boundary_samples
from conftest import interior_points

GENERAL = ["wachspress", "wachspress_global"]
QUAD_ONLY = ["wachspress_quad", "mean_value"]


def coords_for(name, poly):
    return CoordinatesFactory.get_coordinates(name, poly)


def mean_value_reference(poly, points):
    """Tangent half-angle form of mean value coordinates."""
    out = []
    for x in points:
        d = poly.vertices - x
        r = np.linalg.norm(d, axis=1)
        nxt = np.roll(d, -1, axis=0)
        cross = d[:, 0] * nxt[:, 1] - d[:, 1] * nxt[:, 0]
        dot = np.sum(d * nxt, axis=1)
        tan_half = np.tan(np.arctan2(cross, dot) / 2.0)
        w = (np.roll(tan_half, 1) + tan_half) / r
        out.append(w / w.sum())
    return np.array(out)


@pytest.mark.parametrize("name", GENERAL)
def test_basic_properties(any_polygon, name, rng):
    pts = interior_points(any_polygon, 1000, rng)
    lam = coords_for(name, any_polygon).at_points(any_polygon, pts)
    assert lam.shape == (1000, any_polygon.n)
    np.testing.assert_allclose(lam.sum(axis=1), 1.0, atol=1e-12)
    assert (lam >= -1e-12).all()
    np.testing.assert_allclose(lam @ any_polygon.vertices, pts, atol=1e-12)


@pytest.mark.parametrize("name", GENERAL + QUAD_ONLY)
def test_quad_properties(quad, name, rng):
    pts = interior_points(quad, 1000, rng)
    lam = coords_for(name, quad).at_points(quad, pts)
    np.testing.assert_allclose(lam.sum(axis=1), 1.0, atol=1e-12)
    assert (lam >= -1e-12).all()
    np.testing.assert_allclose(lam @ quad.vertices, pts, atol=1e-12)


def test_kronecker_delta(any_polygon):
    lam = coords_for("wachspress_global", any_polygon).at_points(any_polygon, any_polygon.vertices)
    np.testing.assert_allclose(lam, np.eye(any_polygon.n), atol=1e-12)


@pytest.mark.parametrize("name", GENERAL)
def test_affine_on_edges(any_polygon, name):
    pts, edges, t = boundary_samples(any_polygon, 50)
    lam = coords_for(name, any_polygon).at_points(any_polygon, pts)
    n = any_polygon.n
    expected = np.zeros_like(lam)
    rows = np.arange(len(pts))
    expected[rows, edges] = 1.0 - t
    expected[rows, (edges + 1) % n] += t
    np.testing.assert_allclose(lam, expected, atol=1e-12)


def test_formulas_agree(quad, pentagon, rng):
    for poly in (quad, pentagon):
        pts = interior_points(poly, 500, rng)
        interior = coords_for("wachspress", poly).at_points(poly, pts)
        product = coords_for("wachspress_global", poly).at_points(poly, pts)
        np.testing.assert_allclose(interior, product, atol=1e-10)
    pts = interior_points(quad, 500, rng)
    system = coords_for("wachspress_quad", quad).at_points(quad, pts)
    np.testing.assert_allclose(system, coords_for("wachspress_global", quad).at_points(quad, pts), atol=1e-10)


@pytest.mark.parametrize("name", GENERAL + ["wachspress_quad"])
def test_quad_spot_value(quad, name):
    lam = coords_for(name, quad).at_points(quad, np.array([[0.5, 0.5]]))
    np.testing.assert_allclose(lam[0], [1 / 3, 1 / 6, 1 / 6, 1 / 3], atol=1e-14)


def test_square_is_bilinear(square):
    lam = coords_for("wachspress_quad", square).at_points(square, np.array([[0.5, 0.5], [0.5, 0.25]]))
    np.testing.assert_allclose(lam, [[0.25] * 4, [0.375, 0.375, 0.125, 0.125]], atol=1e-14)


def test_octagon_center(octagon):
    lam = coords_for("wachspress_global", octagon).at_points(octagon, np.zeros((1, 2)))
    np.testing.assert_allclose(lam[0], 0.125, atol=1e-14)


def test_mean_value_matches_half_angle_form(square, quad, rng):
    for poly in (square, quad):
        pts = interior_points(poly, 300, rng)
        got = coords_for("mean_value", poly).at_points(poly, pts)
        np.testing.assert_allclose(got, mean_value_reference(poly, pts), atol=1e-10)


def test_mean_value_is_mirror_symmetric_on_square(square):
    lam = coords_for("mean_value", square).at_points(square, np.array([[0.5, 0.25]]))[0]
    assert lam[0] == pytest.approx(lam[1], abs=1e-14)
    assert lam[2] == pytest.approx(lam[3], abs=1e-14)
    np.testing.assert_allclose(lam, mean_value_reference(square, np.array([[0.5, 0.25]]))[0], atol=1e-12)


@pytest.mark.parametrize("name", GENERAL + QUAD_ONLY)
def test_jet_derivatives(quad, name, rng):
    coords = coords_for(name, quad)
    pts = interior_points(quad, 20, rng, margin=0.05)
    jets = coords.jets_at_points(quad, pts)
    h = 1e-5
    dx = (coords.at_points(quad, pts + [h, 0]) - coords.at_points(quad, pts - [h, 0])) / (2 * h)
    dy = (coords.at_points(quad, pts + [0, h]) - coords.at_points(quad, pts - [0, h])) / (2 * h)
    lap = (
        coords.at_points(quad, pts + [h, 0])
        + coords.at_points(quad, pts - [h, 0])
        + coords.at_points(quad, pts + [0, h])
        + coords.at_points(quad, pts - [0, h])
        - 4 * coords.at_points(quad, pts)
    ) / h**2
    np.testing.assert_allclose(jets.v, coords.at_points(quad, pts), atol=1e-14)
    np.testing.assert_allclose(jets.gx, dx, atol=1e-8)
    np.testing.assert_allclose(jets.gy, dy, atol=1e-8)
    np.testing.assert_allclose(jets.laplacian(), lap, atol=1e-4)


def test_exterior_points_raise(pentagon):
    outside = np.array([[2.0, 2.0]])
    with pytest.raises(OutsidePolygon):
        coords_for("wachspress_global", pentagon).at_points(pentagon, outside)
    with pytest.raises(NotInterior):
        coords_for("wachspress", pentagon).at_points(pentagon, outside)


def test_factory(quad, pentagon):
    assert coords_for("auto", quad).name == "wachspress_quad"
    assert coords_for("auto", pentagon).name == "wachspress_global"
    with pytest.raises(ValueError):
        coords_for("mean_value", pentagon)
    with pytest.raises(ValueError):
        coords_for("harmonic", pentagon)


def test_poisson_quad_closed_form(poisson_quad):
    # on (0,0),(1,0),(1,1/2),(0,1) the coordinates at (x, y) are
    # (-(x-1)(x+2y-2), x(x+2y-2), -2xy, 2y(x-1)) / (x - 2)
    for name in GENERAL + ["wachspress_quad"]:
        lam = coords_for(name, poisson_quad).at_points(poisson_quad, np.array([[0.25, 0.25]]))
        np.testing.assert_allclose(lam[0], [15 / 28, 5 / 28, 2 / 28, 6 / 28], atol=1e-14)


def toward_centroid(poly, r):
    """One point at distance r from every vertex, toward the centroid."""
    d = poly.centroid - poly.vertices
    return poly.vertices + r * d / np.linalg.norm(d, axis=1, keepdims=True)


@pytest.mark.parametrize("name", GENERAL)
def test_laplacian_is_bounded_near_vertices(any_polygon, name):
    coords = coords_for(name, any_polygon)

    def max_laplacian(r):
        return np.max(np.abs(coords.jets_at_points(any_polygon, toward_centroid(any_polygon, r)).laplacian()))

    near, far = max_laplacian(1e-6), max_laplacian(1e-3)
    assert np.isfinite(near)
    assert near < 10 * far + 1e-8


def test_mean_value_jets_at_vertices(square):
    coords = coords_for("mean_value", square)
    pts = np.concatenate([square.vertices, [[0.5, 0.5], [0.5, 0.0]]])
    jets = coords.jets_at_points(square, pts)
    np.testing.assert_array_equal(jets.v[:4], np.eye(4))
    for c in jets.components():
        assert np.isfinite(c).all()
        np.testing.assert_array_equal(c[:4], np.eye(4) if c is jets.v else 0.0)
    np.testing.assert_allclose(jets.v[4], 0.25, atol=1e-14)
    np.testing.assert_allclose(jets.v[5], [0.5, 0.5, 0.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(coords.at_points(square, square.vertices), np.eye(4), atol=1e-14)
