import abc

import numpy as np


class ModelInterface(metaclass=abc.ABCMeta):
    """A scalar field of the trial inputs (coordinates, optionally followed by p)."""

    n_inputs: int

    @property
    @abc.abstractmethod
    def n_params(self) -> int:
        raise NotImplementedError

    @abc.abstractmethod
    def forward(self, inputs, params=None):
        """
        Evaluate the model.

        Parameters:
        - inputs: (..., n_inputs) plain values or a Jet2.
        - params: flat parameter vector (numpy or torch); None uses the stored parameters.

        Returns:
        - (...) outputs, in the algebra of the inputs.
        """
        raise NotImplementedError

    def get_params(self) -> np.ndarray:
        return np.zeros(0)

    def set_params(self, params) -> None:
        if len(params) != 0:
            raise ValueError(f"{type(self).__name__} has no parameters")

    def __call__(self, inputs, params=None):
        return self.forward(inputs, params)
