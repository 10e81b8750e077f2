import abc

import numpy as np
import torch

from autodiff import backend
from autodiff.jet import Jet2
from network.model_interface import ModelInterface


class TrialInterface(metaclass=abc.ABCMeta):
    """
    A trial function over a fixed point set.

    Everything that does not depend on the network parameters is computed
    once at construction; `evaluate` only runs the network.
    """

    model: ModelInterface
    points: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.points)

    @abc.abstractmethod
    def evaluate(self, params, idx=None) -> Jet2:
        """
        Trial values with first and second spatial derivatives.

        Parameters:
        - params: flat network parameters (torch for training, numpy allowed).
        - idx: optional integer index array selecting a batch of points.

        Returns:
        - Jet2: shape (batch,), torch components.
        """
        raise NotImplementedError

    @abc.abstractmethod
    def with_points(self, points: np.ndarray, extra_inputs: np.ndarray | None = None) -> "TrialInterface":
        """Same construction on another point set, sharing the model."""
        raise NotImplementedError

    def evaluate_numpy(self, params=None, idx=None) -> Jet2:
        params = self.model.get_params() if params is None else params
        with torch.no_grad():
            u = self.evaluate(backend.to_torch(params), idx)
        return u.map(backend.to_numpy)


def select(jet: Jet2, idx):
    if idx is None:
        return jet
    return jet[torch.as_tensor(idx, dtype=torch.long)]


def to_torch_jet(jet: Jet2) -> Jet2:
    return jet.materialize().map(backend.to_torch)
