from dataclasses import dataclass

import numpy as np
from loguru import logger

from geometry.polygon import Polygon, fan_triangulate


class StrategyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GridQuad:
    """nx x ny lattice on [delta, 1-delta]^2 mapped through the bilinear quad map."""

    nx: int
    ny: int
    delta: float = 0.0


@dataclass(frozen=True)
class Refine:
    """Unique vertices of `level` uniform subdivisions of every fan triangle.

    grading < 1 clusters the rings toward the boundary geometrically.
    """

    level: int
    grading: float = 1.0


@dataclass(frozen=True)
class RandomInterior:
    count: int


@dataclass(frozen=True)
class BoundarySamples:
    per_edge: int


Strategy = GridQuad | Refine | RandomInterior | BoundarySamples


def make_strategy(config: dict) -> Strategy:
    """Build a sampling strategy from its config section."""
    kind = config.get("strategy")
    if kind == "grid_quad":
        return GridQuad(int(config["nx"]), int(config["ny"]), float(config.get("delta", 0.0)))
    elif kind == "refine":
        return Refine(int(config["level"]), float(config.get("grading", 1.0)))
    elif kind == "random":
        return RandomInterior(int(config["count"]))
    elif kind == "boundary":
        return BoundarySamples(int(config["per_edge"]))
    else:
        raise ValueError(f"Unknown sampling strategy: {kind}")


def sample_points(poly: Polygon, strategy: Strategy, seed: int = 0) -> np.ndarray:
    """
    Generate collocation or evaluation points.

    Parameters:
    - poly (Polygon): the domain.
    - strategy (Strategy): one of GridQuad, Refine, RandomInterior, BoundarySamples.
    - seed (int): seed for the random strategy; the others are deterministic.

    Returns:
    - np.ndarray: (P, 2) points in the closed polygon, in a stable order.

    Raises:
    - StrategyMismatch: GridQuad on a polygon that is not a quadrilateral.
    """
    if isinstance(strategy, GridQuad):
        points = grid_quad(poly, strategy.nx, strategy.ny, strategy.delta)
    elif isinstance(strategy, Refine):
        points = refine(poly, strategy.level, strategy.grading)
    elif isinstance(strategy, RandomInterior):
        points = random_interior(poly, strategy.count, seed)
    elif isinstance(strategy, BoundarySamples):
        points = boundary_samples(poly, strategy.per_edge)[0]
    else:
        raise ValueError(f"Unknown sampling strategy: {strategy!r}")
    logger.debug(f"sampled {len(points)} points with {strategy}")
    return points


def bilinear_map(quad: Polygon, s, t) -> np.ndarray:
    v = quad.vertices
    shape = [(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t]
    return sum(w[..., None] * v[k] for k, w in enumerate(np.broadcast_arrays(*shape)))


def grid_quad(quad: Polygon, nx: int, ny: int, delta: float = 0.0) -> np.ndarray:
    if quad.n != 4:
        raise StrategyMismatch(f"grid_quad needs a quadrilateral, got {quad.n} vertices")
    if not 0.0 <= delta < 0.5:
        raise ValueError(f"delta must lie in [0, 0.5), got {delta}")
    if nx < 1 or ny < 1:
        raise ValueError("grid_quad needs nx, ny >= 1")
    s = np.linspace(delta, 1.0 - delta, nx)
    t = np.linspace(delta, 1.0 - delta, ny)
    S, T = np.meshgrid(s, t)
    return bilinear_map(quad, S.ravel(), T.ravel())


def graded_rings(m: int, grading: float) -> np.ndarray:
    """Ring radii r_0 = 0 < ... < r_m = 1 with successive steps in ratio `grading`."""
    if grading <= 0.0:
        raise ValueError(f"grading must be positive, got {grading}")
    k = np.arange(m + 1, dtype=float)
    if abs(grading - 1.0) < 1e-12:
        return k / m
    return (1.0 - grading**k) / (1.0 - grading**m)


def refine(poly: Polygon, level: int, grading: float = 1.0) -> np.ndarray:
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    m = 2**level
    rings = graded_rings(m, grading)
    c = poly.centroid
    points = []
    for tri in fan_triangulate(poly):
        a, b = tri[1], tri[2]
        for k in range(m + 1):
            for j in range(k + 1):
                frac = j / k if k else 0.0
                edge_pt = (1.0 - frac) * a + frac * b
                points.append(c + rings[k] * (edge_pt - c))
    return unique_points(np.array(points), poly.diameter)


def unique_points(points: np.ndarray, scale: float) -> np.ndarray:
    """Drop duplicates (to 1e-10 of `scale`) and keep first-seen order."""
    keys = np.round(points / (1e-10 * scale)).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return points[np.sort(first)]


def random_interior(poly: Polygon, count: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    lo = poly.vertices.min(axis=0)
    hi = poly.vertices.max(axis=0)
    out = np.empty((0, 2))
    while len(out) < count:
        cand = lo + (hi - lo) * rng.random((2 * count, 2))
        keep = poly.min_distance(cand[:, 0], cand[:, 1]) > 1e-9 * poly.diameter
        out = np.concatenate([out, cand[keep]])
    return out[:count]


def boundary_samples(poly: Polygon, per_edge: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Equally spaced points on every edge, vertex x_i included, x_{i+1} excluded.

    Returns:
    - tuple: points (n*per_edge, 2), edge index per point, edge parameter per point.
    """
    t = np.arange(per_edge) / per_edge
    pts, edges, params = [], [], []
    for i in range(poly.n):
        a, b = poly.edge(i)
        pts.append((1.0 - t)[:, None] * a + t[:, None] * b)
        edges.append(np.full(per_edge, i))
        params.append(t)
    return np.concatenate(pts), np.concatenate(edges), np.concatenate(params)
