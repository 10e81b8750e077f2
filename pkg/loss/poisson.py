import numpy as np
import torch

from autodiff import backend
from autodiff.jet import Jet2
from trial.trial_interface import TrialInterface

from .loss_interface import ObjectiveInterface, batch, mean_square


def poisson_loss(u: Jet2, f) -> torch.Tensor:
    """Mean of (lap u + f)^2 over the batch."""
    return mean_square(u.laplacian() + f)


def nonlinear_poisson_loss(u: Jet2, f) -> torch.Tensor:
    """Mean of (lap u - exp(u) + f)^2 over the batch."""
    return mean_square(u.laplacian() - backend.exp(u.v) + f)


class PoissonObjective(ObjectiveInterface):
    kind = "poisson"

    def __init__(self, trial: TrialInterface, source_values: np.ndarray):
        self.trial = trial
        self.source = backend.to_torch(np.broadcast_to(source_values, (trial.n_points,)))

    def loss(self, params, idx=None):
        u = self.trial.evaluate(self.network_params(params), idx)
        return poisson_loss(u, batch(self.source, idx))


class NonlinearPoissonObjective(PoissonObjective):
    kind = "nonlinear_poisson"

    def loss(self, params, idx=None):
        u = self.trial.evaluate(self.network_params(params), idx)
        return nonlinear_poisson_loss(u, batch(self.source, idx))
