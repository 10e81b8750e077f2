from __future__ import annotations

import numpy as np
from loguru import logger

from autodiff.jet import Jet2
from barycentric.coords_interface import CoordinatesInterface, OutsidePolygon
from geometry.polygon import Polygon
from network.model_interface import ModelInterface
from transfinite.boundary import BoundarySpec
from transfinite.coons import UNIT_SQUARE, DomainMismatch
from transfinite.lifting import lift_g

from .trial_interface import TrialInterface, select, to_torch_jet

BOUNDARY_TOL = 1e-12


class OnBoundary(ValueError):
    pass


def adf_phi(x, y, strict: bool = False):
    """
    Approximate distance function of the unit square, R-equivalence of order 1:

        phi = (1/x + 1/(1-x) + 1/y + 1/(1-y))^(-1)

    Points on the boundary get phi = 0 with zero derivatives, unless
    `strict` is set, in which case they raise OnBoundary.

    Raises:
    - OnBoundary: boundary points with strict=True.
    - OutsidePolygon: points outside the square.
    """
    xv = np.asarray(x.v if isinstance(x, Jet2) else x, dtype=float)
    yv = np.asarray(y.v if isinstance(y, Jet2) else y, dtype=float)
    dmin = np.minimum.reduce([xv, 1.0 - xv, yv, 1.0 - yv])
    if np.any(dmin < -BOUNDARY_TOL):
        raise OutsidePolygon("point outside the unit square")
    on_edge = dmin <= BOUNDARY_TOL
    if strict and np.any(on_edge):
        raise OnBoundary("the reciprocal distance form is undefined on the boundary")
    if np.any(on_edge):
        x = _replace(on_edge, x)
        y = _replace(on_edge, y)
    phi = 1.0 / (1.0 / x + 1.0 / (1.0 - x) + 1.0 / y + 1.0 / (1.0 - y))
    if np.any(on_edge):
        phi = Jet2.where(on_edge, 0.0, phi) if isinstance(phi, Jet2) else np.where(on_edge, 0.0, phi)
    return phi


def _replace(mask, v):
    if isinstance(v, Jet2):
        return Jet2.where(mask, 0.5, v)
    return np.where(mask, 0.5, v)


class AdfSquareTrial(TrialInterface):
    """
    u = g + phi * N(l) on the unit square.

    Uses the same transfinite g as the transfinite trial; phi vanishes on the
    boundary but its Laplacian is unbounded at the corners.
    """

    def __init__(
        self,
        poly: Polygon,
        spec: BoundarySpec,
        model: ModelInterface,
        points: np.ndarray,
        coordinates: CoordinatesInterface,
        extra_inputs: np.ndarray | None = None,
    ):
        if poly.n != 4 or not np.allclose(poly.vertices, UNIT_SQUARE, atol=1e-14):
            raise DomainMismatch("the distance-function trial is defined on the unit square only")
        if extra_inputs is not None:
            raise ValueError("the distance-function trial takes no extra inputs")
        if model.n_inputs != poly.n:
            raise ValueError(f"model takes {model.n_inputs} inputs, trial provides {poly.n}")
        self.poly = poly
        self.spec = spec
        self.model = model
        self.coordinates = coordinates
        self.points = np.asarray(points, dtype=float)

        lam = coordinates.jets_at_points(poly, self.points)
        g = lift_g(poly, spec, lam)
        if not isinstance(g, Jet2):
            g = lam[..., 0] * 0.0 + g
        x, y = Jet2.seed(self.points[:, 0], self.points[:, 1])
        phi = adf_phi(x, y)

        self.lam = to_torch_jet(lam)
        self.g = to_torch_jet(g)
        self.phi = to_torch_jet(phi)
        logger.debug(f"distance-function trial cached for {len(self.points)} points")

    def evaluate(self, params, idx=None) -> Jet2:
        n_out = self.model(select(self.lam, idx), params)
        return select(self.g, idx) + select(self.phi, idx) * n_out

    def with_points(self, points: np.ndarray, extra_inputs: np.ndarray | None = None) -> AdfSquareTrial:
        return AdfSquareTrial(self.poly, self.spec, self.model, points, self.coordinates, extra_inputs)
