"""
Coordinates on a quadrilateral from the 4x4 moment system

    [ 1     1     1     1   ] [l1]   [1]
    [ x1    x2    x3    x4  ] [l2] = [x]
    [ y1    y2    y3    y4  ] [l3]   [y]
    [ r1   -r2    r3   -r4  ] [l4]   [0]

Wachspress coordinates use r_i = A_{i-1}(x) A_i(x); mean value coordinates
use r_i = |x - x_i|. The system is solved by cofactor expansion so it runs
unchanged over plain values and jets.
"""

import numpy as np

from autodiff import backend
from autodiff.jet import Jet2
from barycentric.coords_interface import (
    CoordinatesInterface,
    SingularSystem,
    check_closed,
    stack_coordinates,
    values_of,
)
from geometry.polygon import Polygon

_SIGNS = (1.0, -1.0, 1.0, -1.0)
# points closer than this many diameters to a vertex take its unit vector
NEAR_VERTEX = 1e-12


def _det3(m: list[list]):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def solve_moment_system(quad: Polygon, x, y, rho: list):
    """
    Solve the moment system for given r_1..r_4.

    Raises:
    - SingularSystem: if the determinant vanishes.
    """
    if quad.n != 4:
        raise ValueError(f"moment system needs a quadrilateral, got {quad.n} vertices")
    vx = [float(v) for v in quad.vertices[:, 0]]
    vy = [float(v) for v in quad.vertices[:, 1]]
    top = [[1.0] * 4, vx, vy]
    last = [s * r for s, r in zip(_SIGNS, rho)]

    def minor(rows: list[list], col: int):
        return _det3([[row[c] for c in range(4) if c != col] for row in rows])

    # expansion along the last row; the cofactor sign of (3, j) is (-1)^(3+j)
    det = sum(-_SIGNS[j] * last[j] * minor(top, j) for j in range(4))
    if not backend.all_finite(values_of(det)) or np.any(values_of(det) == 0.0):
        raise SingularSystem("moment system is singular")

    rhs = [1.0, x, y]
    lam = []
    for k in range(4):
        rows = [row[:k] + [rhs[r]] + row[k + 1:] for r, row in enumerate(top)]
        num = sum(-_SIGNS[j] * last[j] * minor(rows, j) for j in range(4) if j != k)
        lam.append(num / det)
    return stack_coordinates(lam)


def wachspress_quad_system(quad: Polygon, x, y):
    """Wachspress coordinates on a quadrilateral via the moment system."""
    check_closed(quad, quad.distances(x, y))
    areas = quad.triangle_areas(x, y)
    rho = [areas[i - 1] * areas[i] for i in range(4)]
    return solve_moment_system(quad, x, y, rho)


def meanvalue_quad(quad: Polygon, x, y):
    """
    Mean value coordinates on a quadrilateral via the moment system.

    At a vertex the coordinates are the matching unit vector. Their
    derivatives do not exist there, so jets carry zero derivatives at
    those points.
    """
    check_closed(quad, quad.distances(x, y))
    c = quad.centroid
    d2 = []
    for vx, vy in quad.vertices:
        d2.append((x - float(vx)) * (x - float(vx)) + (y - float(vy)) * (y - float(vy)))
    at_vertex = [values_of(d) <= (NEAR_VERTEX * quad.diameter) ** 2 for d in d2]
    near = np.logical_or.reduce(at_vertex)
    if np.any(near):
        # centroid distances keep the system regular; these rows are replaced below
        d2 = [_where(near, float(np.sum((c - v) ** 2)), d) for d, v in zip(d2, quad.vertices)]
    rho = [d.sqrt() if isinstance(d, Jet2) else backend.sqrt(d) for d in d2]
    lam = solve_moment_system(quad, x, y, rho)
    if np.any(near):
        lam = _where(near[..., None], np.stack(at_vertex, axis=-1).astype(float), lam)
    return lam


def _where(mask, a, b):
    if isinstance(a, Jet2) or isinstance(b, Jet2):
        return Jet2.where(mask, a, b)
    return backend.where(mask, a, b)


class WachspressQuad(CoordinatesInterface):
    name = "wachspress_quad"

    def supports(self, poly: Polygon) -> bool:
        return poly.n == 4

    def evaluate(self, poly: Polygon, x, y):
        return wachspress_quad_system(poly, x, y)


class MeanValueQuad(CoordinatesInterface):
    name = "mean_value"

    def supports(self, poly: Polygon) -> bool:
        return poly.n == 4

    def evaluate(self, poly: Polygon, x, y):
        return meanvalue_quad(poly, x, y)
