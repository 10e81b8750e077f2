import numpy as np

from transfinite.boundary import BoundarySpec

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class DomainMismatch(ValueError):
    pass


def coons_square(spec: BoundarySpec, x, y):
    """
    Bilinear Coons patch on the unit square: the Boolean sum of the two
    linear blends minus the bilinear corner interpolant.

    Edges are bottom, right, top, left, each running counterclockwise.

    Raises:
    - DomainMismatch: if the spec is not posed on the unit square (0,0),(1,0),(1,1),(0,1).
    """
    if spec.n != 4 or not np.allclose(spec.poly.vertices, UNIT_SQUARE, atol=1e-14):
        raise DomainMismatch("Coons interpolation needs the unit square with vertices from (0,0)")

    bottom = spec.alpha(0, x)
    right = spec.alpha(1, y)
    top = spec.alpha(2, 1.0 - x)
    left = spec.alpha(3, 1.0 - y)
    c00, c10, c11, c01 = (float(spec.alpha(i, 0.0)) for i in range(4))

    ruled = (1.0 - x) * left + x * right + (1.0 - y) * bottom + y * top
    corners = (1.0 - x) * (1.0 - y) * c00 + x * (1.0 - y) * c10 + x * y * c11 + (1.0 - x) * y * c01
    return ruled - corners
