from __future__ import annotations

import numpy as np
import torch
from loguru import logger

from autodiff import backend
from autodiff.jet import Jet2
from barycentric.coords_interface import CoordinatesInterface
from geometry.polygon import Polygon
from network.model_interface import ModelInterface
from transfinite.boundary import BoundarySpec
from transfinite.lifting import combine, edge_projections, lift_g, vertex_projections

from .trial_interface import TrialInterface, select, to_torch_jet


class TransfiniteTrial(TrialInterface):
    """
    u = g + N(l) - L[N](l)

    g interpolates the Dirichlet data and N - L[N] vanishes on the boundary,
    so u matches the data exactly for every parameter vector. Cached per
    point: the coordinate jets, g, and the 2n edge projections. The n vertex
    inputs are unit vectors shared by all points, unless extra inputs (the
    geometric parameter p) are appended, in which case they are per point.

    Attributes:
    - poly (Polygon): the domain.
    - spec (BoundarySpec): Dirichlet data (possibly homogeneous).
    - model (ModelInterface): network or fixed field of the coordinates.
    - points (np.ndarray): (P, 2) evaluation points.
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
        self.poly = poly
        self.spec = spec
        self.model = model
        self.coordinates = coordinates
        self.points = np.asarray(points, dtype=float)
        self.extra_inputs = None if extra_inputs is None else np.asarray(extra_inputs, dtype=float).reshape(len(self.points), -1)

        n = poly.n
        n_extra = 0 if self.extra_inputs is None else self.extra_inputs.shape[1]
        if model.n_inputs != n + n_extra:
            raise ValueError(f"model takes {model.n_inputs} inputs, trial provides {n + n_extra}")

        lam = coordinates.jets_at_points(poly, self.points)
        g = lift_g(poly, spec, lam)
        if not isinstance(g, Jet2):
            g = lam[..., 0] * 0.0 + g
        proj = edge_projections(lam)

        vertex = vertex_projections(n)
        lam_in = lam
        if self.extra_inputs is not None:
            p = self.extra_inputs
            lam_in = Jet2.concat([lam, Jet2(p)], axis=-1)
            p_edges = np.broadcast_to(p[:, None, :], (len(p), 2 * n, n_extra))
            proj = Jet2.concat([proj, Jet2(p_edges)], axis=-1)
            vertex = np.concatenate(
                [np.broadcast_to(vertex, (len(p), n, n)), np.broadcast_to(p[:, None, :], (len(p), n, n_extra))],
                axis=-1,
            )

        self.lam = to_torch_jet(lam)
        self.lam_inputs = to_torch_jet(lam_in)
        self.g = to_torch_jet(g)
        self.edge_inputs = to_torch_jet(proj)
        self.vertex_inputs = backend.to_torch(vertex)
        logger.debug(f"transfinite trial cached for {len(self.points)} points on a {n}-gon")

    def evaluate(self, params, idx=None) -> Jet2:
        lam = select(self.lam, idx)
        vertex = self.vertex_inputs
        if self.extra_inputs is not None and idx is not None:
            vertex = vertex[torch.as_tensor(idx, dtype=torch.long)]
        n_out = self.model(select(self.lam_inputs, idx), params)
        f_edge = self.model(select(self.edge_inputs, idx), params)
        f_vertex = self.model(vertex, params)
        lifted = combine(lam, f_edge, f_vertex)
        return select(self.g, idx) + n_out - lifted

    def with_points(self, points: np.ndarray, extra_inputs: np.ndarray | None = None) -> TransfiniteTrial:
        return TransfiniteTrial(self.poly, self.spec, self.model, points, self.coordinates, extra_inputs)
