import numpy as np
import torch

from autodiff import backend
from autodiff.jet import Jet2
from trial.trial_interface import TrialInterface

from .loss_interface import ObjectiveInterface


def ritz_loss(u: Jet2, weights, f) -> torch.Tensor:
    """
    Potential energy  1/2 int |grad u|^2 - int f u  by cubature.

    weights are the area-scaled cubature weights of the points u was
    evaluated at.
    """
    return (weights * (0.5 * u.grad_norm2() - f * u.v)).sum()


class RitzObjective(ObjectiveInterface):
    """
    Energy objective on cubature points. The whole cubature is used at every
    step, so mini-batching does not apply.
    """

    kind = "ritz"
    supports_batching = False

    def __init__(self, trial: TrialInterface, weights: np.ndarray, source_values: np.ndarray):
        self.trial = trial
        self.weights = backend.to_torch(weights)
        self.source = backend.to_torch(np.broadcast_to(source_values, (trial.n_points,)))

    def loss(self, params, idx=None):
        u = self.trial.evaluate(self.network_params(params))
        return ritz_loss(u, self.weights, self.source)
