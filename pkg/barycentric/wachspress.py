import numpy as np

from autodiff.jet import Jet2
from barycentric.coords_interface import (
    CoordinatesInterface,
    NotInterior,
    check_closed,
    normalize,
    values_of,
)
from geometry.polygon import Polygon

# below this distance (in diameters) the interior formula hands over to the global form
NEAR_BOUNDARY = 1e-9


def _normal_dets(poly: Polygon) -> np.ndarray:
    """det(n_{i-1}, n_i) for every vertex i."""
    prev = np.roll(poly.normals, 1, axis=0)
    cur = poly.normals
    return prev[:, 0] * cur[:, 1] - prev[:, 1] * cur[:, 0]


def wachspress_global(poly: Polygon, x, y):
    """
    Wachspress coordinates in product form, valid on the closed polygon.

    w_i = det(n_{i-1}, n_i) * prod_{j != i-1, i} h_j / diameter

    Raises:
    - OutsidePolygon: for points outside the closed polygon.
    """
    n = poly.n
    h = poly.distances(x, y)
    check_closed(poly, h)
    scaled = [hj * (1.0 / poly.diameter) for hj in h]
    dets = _normal_dets(poly)
    weights = []
    for i in range(n):
        w = float(dets[i])
        for j in range(n):
            if j != i and j != (i - 1) % n:
                w = scaled[j] * w
        weights.append(w)
    return normalize(weights)


def wachspress_interior(poly: Polygon, x, y):
    """
    Wachspress coordinates by the edge-normal formula
    w_i = det(n_{i-1}, n_i) / (h_{i-1} h_i).

    Points within 1e-9 diameters of the boundary are evaluated with the
    global form instead, so the function is total on the closed polygon.

    Raises:
    - NotInterior: for points outside the polygon.
    """
    n = poly.n
    h = poly.distances(x, y)
    hmin = np.minimum.reduce([values_of(hi) for hi in h])
    if np.any(hmin < -1e-12 * poly.diameter):
        raise NotInterior(f"point outside polygon (distance {float(np.min(hmin)):.3g})")
    near = np.asarray(hmin < NEAR_BOUNDARY * poly.diameter)
    if np.all(near):
        return wachspress_global(poly, x, y)

    if np.any(near):
        h = [_where(near, 1.0, hi) for hi in h]
    dets = _normal_dets(poly)
    weights = [float(dets[i]) / (h[i - 1] * h[i]) for i in range(n)]
    lam = normalize(weights)
    if np.any(near):
        lam = _where(near[..., None], wachspress_global(poly, x, y), lam)
    return lam


def _where(mask, a, b):
    if isinstance(a, Jet2) or isinstance(b, Jet2):
        return Jet2.where(mask, a, b)
    return np.where(mask, a, b)


class WachspressInterior(CoordinatesInterface):
    name = "wachspress"

    def evaluate(self, poly: Polygon, x, y):
        return wachspress_interior(poly, x, y)


class WachspressGlobal(CoordinatesInterface):
    name = "wachspress_global"

    def evaluate(self, poly: Polygon, x, y):
        return wachspress_global(poly, x, y)
