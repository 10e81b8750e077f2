import abc

import numpy as np

from autodiff import backend
from autodiff.jet import Jet2
from geometry.polygon import Polygon


class NotInterior(ValueError):
    pass


class OutsidePolygon(ValueError):
    pass


class SingularSystem(ArithmeticError):
    pass


class CoordinatesInterface(metaclass=abc.ABCMeta):
    """
    Generalized barycentric coordinates on a convex polygon.

    Implementations evaluate over any scalar algebra: x and y may be floats,
    numpy arrays, torch tensors or Jet2 values of matching shape. The result
    stacks the n coordinates along a new last axis.
    """

    name: str = ""

    @abc.abstractmethod
    def evaluate(self, poly: Polygon, x, y):
        """
        Coordinates lambda_1..lambda_n at (x, y).

        Parameters:
        - poly (Polygon): the domain.
        - x, y: point coordinates in any supported algebra.

        Returns:
        - the coordinates, shape (..., n), in the algebra of the input.
        """
        raise NotImplementedError

    def supports(self, poly: Polygon) -> bool:
        return True

    def at_points(self, poly: Polygon, points: np.ndarray) -> np.ndarray:
        """Plain values at an array of points (P, 2) -> (P, n)."""
        points = np.asarray(points, dtype=float)
        return np.asarray(self.evaluate(poly, points[:, 0], points[:, 1]))

    def jets_at_points(self, poly: Polygon, points: np.ndarray) -> Jet2:
        """Coordinates with their spatial derivatives at (P, 2) points -> Jet2 (P, n)."""
        points = np.asarray(points, dtype=float)
        x, y = Jet2.seed(points[:, 0], points[:, 1])
        return self.evaluate(poly, x, y).materialize()


def values_of(h) -> np.ndarray:
    """Plain numpy values of a float, array, tensor or jet."""
    return backend.to_numpy(h.v if isinstance(h, Jet2) else h)


def stack_coordinates(items: list):
    if any(isinstance(i, Jet2) for i in items):
        return Jet2.stack(items, axis=-1)
    shape = max((backend.shape_of(i) for i in items), key=len)
    return backend.stack([backend.broadcast_to(i, shape, like=i) for i in items])


def normalize(weights: list):
    """Stack weights along the last axis and divide by their sum."""
    w = stack_coordinates(weights)
    total = w.sum(axis=-1, keepdims=True) if isinstance(w, Jet2) else backend.reduce_sum(w, -1, True)
    return w / total


def check_closed(poly: Polygon, h: list, tol: float = 1e-12) -> np.ndarray:
    """Minimum edge distance per point; raises OutsidePolygon for exterior points."""
    hmin = np.minimum.reduce([values_of(hi) for hi in h])
    if np.any(hmin < -tol * poly.diameter):
        raise OutsidePolygon(f"point outside polygon (distance {float(np.min(hmin)):.3g})")
    return hmin
