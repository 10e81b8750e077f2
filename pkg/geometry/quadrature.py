"""
Symmetric quadrature rules on triangles.

Rules are stored by symmetry orbit in barycentric coordinates:
  S3        the centroid,
  S21(a)    the 3 permutations of (a, a, 1-2a),
  S111(a,b) the 6 permutations of (a, b, 1-a-b).
Weights are normalized to sum to one, so a rule integrates f over a triangle
as area * sum(w * f(points)). A rule of order q is exact for polynomials of
total degree <= q.
"""

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

_SQRT15 = math.sqrt(15.0)

# order -> list of (orbit, parameters, weight)
_RULES = {
    1: [("S3", (), 1.0)],
    2: [("S21", (1.0 / 6.0,), 1.0 / 3.0)],
    3: [
        ("S3", (), -27.0 / 48.0),
        ("S21", (0.2,), 25.0 / 48.0),
    ],
    4: [
        ("S21", (0.445948490915965,), 0.223381589678011),
        ("S21", (0.091576213509771,), 0.109951743655322),
    ],
    5: [
        ("S3", (), 0.225),
        ("S21", ((6.0 - _SQRT15) / 21.0,), (155.0 - _SQRT15) / 1200.0),
        ("S21", ((6.0 + _SQRT15) / 21.0,), (155.0 + _SQRT15) / 1200.0),
    ],
    6: [
        ("S21", (0.063089014491502,), 0.050844906370207),
        ("S21", (0.249286745170910,), 0.116786275726379),
        ("S111", (0.053145049844816, 0.310352451033785), 0.082851075618374),
    ],
    7: [
        ("S3", (), -0.149570044467682),
        ("S21", (0.260345966079040,), 0.175615257433208),
        ("S21", (0.065130102902216,), 0.053347235608838),
        ("S111", (0.048690315425316, 0.312865496004874), 0.077113760890257),
    ],
}

MAX_ORDER = max(_RULES)


class UnsupportedOrder(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TriangleRule:
    """
    Attributes:
    - order (int): polynomial degree integrated exactly.
    - points (np.ndarray): (k, 3) barycentric coordinates.
    - weights (np.ndarray): (k,) weights summing to 1.
    """

    order: int
    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    def map_to(self, triangle: np.ndarray) -> np.ndarray:
        """Physical points (k, 2) of the rule on a (3, 2) triangle."""
        return self.points @ np.asarray(triangle, dtype=float)

    def integrate(self, f, triangle: np.ndarray) -> float:
        tri = np.asarray(triangle, dtype=float)
        pts = self.map_to(tri)
        e1, e2 = tri[1] - tri[0], tri[2] - tri[0]
        area = abs(0.5 * (e1[0] * e2[1] - e1[1] * e2[0]))
        return float(area * np.dot(self.weights, f(pts[:, 0], pts[:, 1])))


def _orbit(kind: str, params: tuple) -> list[tuple[float, float, float]]:
    if kind == "S3":
        return [(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)]
    if kind == "S21":
        (a,) = params
        b = 1.0 - 2.0 * a
        return [(b, a, a), (a, b, a), (a, a, b)]
    a, b = params
    return sorted(set(itertools.permutations((a, b, 1.0 - a - b))))


@functools.lru_cache(maxsize=None)
def triangle_quadrature(order: int) -> TriangleRule:
    """
    Look up the symmetric rule of the given order.

    Raises:
    - UnsupportedOrder: order outside 1..7.
    """
    if order not in _RULES:
        raise UnsupportedOrder(f"triangle quadrature order must be in 1..{MAX_ORDER}, got {order}")
    points, weights = [], []
    for kind, params, w in _RULES[order]:
        orbit = _orbit(kind, params)
        points.extend(orbit)
        weights.extend([w] * len(orbit))
    weights = np.array(weights)
    rule = TriangleRule(order, np.array(points), weights / weights.sum())
    rule.points.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


def refine_triangles(triangles: np.ndarray, level: int) -> np.ndarray:
    """Split every triangle into 4 by its edge midpoints, `level` times."""
    tris = np.asarray(triangles, dtype=float)
    for _ in range(level):
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
        tris = np.concatenate(
            [
                np.stack([a, ab, ca], axis=1),
                np.stack([ab, b, bc], axis=1),
                np.stack([ca, bc, c], axis=1),
                np.stack([ab, bc, ca], axis=1),
            ]
        )
    return tris


def cubature(triangles: np.ndarray, rule: TriangleRule) -> tuple[np.ndarray, np.ndarray]:
    """
    Points and area-scaled weights of a rule applied on every triangle.

    Returns:
    - tuple[np.ndarray, np.ndarray]: points (T*k, 2), weights (T*k,) summing to the total area.
    """
    tris = np.asarray(triangles, dtype=float)
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    points = np.einsum("kj,tjd->tkd", rule.points, tris).reshape(-1, 2)
    weights = (areas[:, None] * rule.weights[None, :]).ravel()
    return points, weights
