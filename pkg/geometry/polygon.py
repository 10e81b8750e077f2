from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

DEFAULT_BOUNDARY_TOL = 1e-12


class PolygonError(ValueError):
    pass


class NotConvex(PolygonError):
    pass


class ClockwiseOrder(PolygonError):
    pass


class DegenerateEdge(PolygonError):
    pass


@dataclass(frozen=True)
class PointLocation:
    """
    Where a point sits relative to a polygon.

    `edge` and `t` are set only for boundary points: the point equals
    (1 - t) * x_edge + t * x_{edge+1}. Edge indices are 0-based.
    """

    kind: Literal["interior", "boundary", "exterior"]
    edge: int | None = None
    t: float | None = None

    @property
    def is_interior(self) -> bool:
        return self.kind == "interior"

    @property
    def is_boundary(self) -> bool:
        return self.kind == "boundary"

    @property
    def is_exterior(self) -> bool:
        return self.kind == "exterior"


@dataclass(frozen=True, eq=False)
class Polygon:
    """
    Strictly convex polygon with counterclockwise vertices.

    Edge i runs from vertex i to vertex i+1 (cyclic). Build instances with
    `validate_polygon`; the arrays are read-only.

    Attributes:
    - vertices (np.ndarray): (n, 2) vertex coordinates.
    - normals (np.ndarray): (n, 2) outward unit normal of each edge.
    - lengths (np.ndarray): (n,) edge lengths.
    - diameter (float): largest vertex-to-vertex distance.
    - area (float): polygon area.
    """

    vertices: np.ndarray
    normals: np.ndarray
    lengths: np.ndarray
    diameter: float
    area: float

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex(self, i: int) -> np.ndarray:
        return self.vertices[i % self.n]

    def edge(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self.vertex(i), self.vertex(i + 1)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def edge_point(self, i: int, t):
        """Point at parameter t along edge i, from x_i (t=0) to x_{i+1} (t=1)."""
        a, b = self.edge(i)
        return (1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]

    def distances(self, x, y) -> list:
        """
        Signed perpendicular distances h_i to every edge line, positive inside.

        x and y may be floats, arrays or jets; the result is a list of n values
        of the same kind.
        """
        out = []
        for i in range(self.n):
            xi, yi = (float(c) for c in self.vertices[i])
            nx, ny = (float(c) for c in self.normals[i])
            out.append((xi - x) * nx + (yi - y) * ny)
        return out

    def triangle_areas(self, x, y) -> list:
        """A_i(x) = area of triangle (x_i, x_{i+1}, x)."""
        return [0.5 * float(l) * h for l, h in zip(self.lengths, self.distances(x, y))]

    def corner_areas(self) -> np.ndarray:
        """B_i = area of triangle (x_{i-1}, x_i, x_{i+1})."""
        prev = np.roll(self.vertices, 1, axis=0)
        nxt = np.roll(self.vertices, -1, axis=0)
        return 0.5 * _cross(self.vertices - prev, nxt - self.vertices)

    def locate(self, point, tol: float = DEFAULT_BOUNDARY_TOL) -> PointLocation:
        """
        Classify a point as interior, boundary or exterior.

        Parameters:
        - point: (x, y) coordinates.
        - tol (float): boundary tolerance in units of the diameter.

        Returns:
        - PointLocation: boundary points carry their edge and edge parameter.
        """
        x, y = float(point[0]), float(point[1])
        h = np.array(self.distances(x, y))
        band = tol * self.diameter
        if h.min() < -band:
            return PointLocation("exterior")
        if h.min() <= band:
            i = int(np.argmin(h))
            a, b = self.edge(i)
            d = b - a
            t = float(np.clip(np.dot(np.array([x, y]) - a, d) / np.dot(d, d), 0.0, 1.0))
            return PointLocation("boundary", i, t)
        return PointLocation("interior")

    def contains(self, x, y, tol: float = DEFAULT_BOUNDARY_TOL) -> np.ndarray:
        """Vectorized closed-polygon membership test."""
        h = np.stack(self.distances(np.asarray(x, float), np.asarray(y, float)), axis=-1)
        return h.min(axis=-1) >= -tol * self.diameter

    def min_distance(self, x, y) -> np.ndarray:
        h = np.stack(self.distances(np.asarray(x, float), np.asarray(y, float)), axis=-1)
        return h.min(axis=-1)

    def as_list(self) -> list[list[float]]:
        return self.vertices.tolist()


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def triangle_area(a, b, c) -> float:
    """Signed area, positive for counterclockwise (a, b, c)."""
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    return 0.5 * float(_cross(b - a, c - a))


def validate_polygon(vertices) -> Polygon:
    """
    Validate a vertex loop and build a Polygon with its derived quantities.

    Parameters:
    - vertices: sequence of (x, y) points, counterclockwise.

    Returns:
    - Polygon: vertex order preserved.

    Raises:
    - PolygonError: fewer than 3 vertices or malformed coordinates.
    - DegenerateEdge: two consecutive vertices coincide.
    - ClockwiseOrder: signed area is not positive (input is never reordered).
    - NotConvex: some turn is not strictly to the left.
    """
    v = np.array(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise PolygonError(f"vertices must be a list of [x, y] pairs, got shape {v.shape}")
    if len(v) < 3:
        raise PolygonError(f"a polygon needs at least 3 vertices, got {len(v)}")
    if not np.isfinite(v).all():
        raise PolygonError("vertex coordinates must be finite")

    diameter = float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(edges, axis=1)
    short = np.flatnonzero(lengths <= 1e-12 * diameter)
    if short.size or diameter == 0.0:
        i = int(short[0]) if short.size else 0
        raise DegenerateEdge(f"edge {i} has zero length")

    area = 0.5 * float(np.sum(_cross(v, np.roll(v, -1, axis=0))))
    if area <= 0.0:
        raise ClockwiseOrder(f"vertices must be counterclockwise (signed area {area:.6g})")

    turns = _cross(edges, np.roll(edges, -1, axis=0))
    bad = np.flatnonzero(turns <= 1e-14 * diameter * diameter)
    if bad.size:
        raise NotConvex(f"polygon is not strictly convex at vertex {(int(bad[0]) + 1) % len(v)}")

    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]
    for arr in (v, normals, lengths):
        arr.setflags(write=False)
    return Polygon(vertices=v, normals=normals, lengths=lengths, diameter=diameter, area=area)


def fan_triangulate(poly: Polygon) -> np.ndarray:
    """
    Split the polygon into n counterclockwise triangles around its vertex centroid.

    Returns:
    - np.ndarray: (n, 3, 2) triangles (apex, x_i, x_{i+1}).
    """
    c = poly.centroid
    return np.stack(
        [np.stack([c, poly.vertex(i), poly.vertex(i + 1)]) for i in range(poly.n)]
    )


def regular_polygon(n: int, radius: float = 1.0) -> Polygon:
    angles = 2.0 * np.pi * np.arange(n) / n
    return validate_polygon(np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1))
