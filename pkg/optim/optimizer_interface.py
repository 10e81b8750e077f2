import abc
from typing import Callable

import numpy as np

# theta -> (loss, gradient)
LossAndGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]


class OptimizerInterface(metaclass=abc.ABCMeta):
    name: str = ""
    lr: float = 0.0
    # whether the loss returned by step belongs to the new parameters
    loss_at_new_params: bool = False

    @abc.abstractmethod
    def step(self, theta: np.ndarray, fun: LossAndGrad) -> tuple[np.ndarray, float]:
        """
        One optimizer update.

        Parameters:
        - theta (np.ndarray): current parameters.
        - fun (LossAndGrad): objective on the current batch.

        Returns:
        - tuple[np.ndarray, float]: new parameters and the loss reported for
          this step.
        """
        raise NotImplementedError

    def end_epoch(self) -> None:
        """Called once per epoch after all of its steps."""
        pass

    def reset(self) -> None:
        pass
