import abc

import numpy as np
import torch

from autodiff import tape
from trial.trial_interface import TrialInterface


class ObjectiveInterface(metaclass=abc.ABCMeta):
    """
    A scalar training objective over a trial function.

    The parameter vector is the network's flat parameters, followed by any
    extra trainable quantities of the objective.
    """

    kind: str = ""
    trial: TrialInterface
    supports_batching: bool = True

    @property
    def n_points(self) -> int:
        return self.trial.n_points

    @property
    def n_params(self) -> int:
        return self.trial.model.n_params

    def initial_params(self) -> np.ndarray:
        return self.trial.model.get_params()

    def network_params(self, params):
        return params[: self.trial.model.n_params]

    def store(self, params: np.ndarray) -> None:
        """Write trained parameters back into the model."""
        self.trial.model.set_params(np.asarray(params)[: self.trial.model.n_params])

    @abc.abstractmethod
    def loss(self, params: torch.Tensor, idx=None) -> torch.Tensor:
        """
        Objective value on a batch.

        Parameters:
        - params (torch.Tensor): full parameter vector.
        - idx: optional point indices; None uses every point.

        Returns:
        - torch.Tensor: scalar.
        """
        raise NotImplementedError

    def value_and_grad(self, theta: np.ndarray, idx=None) -> tuple[float, np.ndarray]:
        return tape.value_and_grad(lambda p: self.loss(p, idx), theta)

    def value(self, theta: np.ndarray, idx=None) -> float:
        with torch.no_grad():
            return float(self.loss(torch.as_tensor(np.asarray(theta, dtype=float)), idx))


def mean_square(r) -> torch.Tensor:
    return (r * r).mean()


def batch(values, idx):
    if idx is None:
        return values
    return values[torch.as_tensor(idx, dtype=torch.long)]
