import torch

from autodiff import backend
from autodiff.jet import Jet2
from trial.trial_interface import TrialInterface

from .loss_interface import ObjectiveInterface, mean_square

GRAD_EPS = 1e-12


def eikonal_loss(u: Jet2) -> torch.Tensor:
    """Mean of (|grad u| - 1)^2, with the norm shifted by 1e-12 under the root."""
    return mean_square(backend.sqrt(u.grad_norm2() + GRAD_EPS) - 1.0)


class EikonalObjective(ObjectiveInterface):
    kind = "eikonal"

    def __init__(self, trial: TrialInterface):
        self.trial = trial

    def loss(self, params, idx=None):
        return eikonal_loss(self.trial.evaluate(self.network_params(params), idx))
