from dataclasses import dataclass

import numpy as np
import torch

from autodiff import backend
from autodiff.jet import Jet2
from trial.trial_interface import TrialInterface

from .loss_interface import ObjectiveInterface, batch, mean_square

DEFAULT_DATA_WEIGHT = 1e5
COEFFICIENT_NAMES = ("a0", "a1", "a2", "a3", "a4", "a5")


class EmptyData(ValueError):
    pass


@dataclass(frozen=True)
class SourceModel:
    """f_a(x, y) = a0 + a1 x + a2 y + a3 x^2 + a4 y^2 + a5 xy"""

    coefficients: tuple[float, ...] = (0.0,) * 6

    def __post_init__(self):
        if len(self.coefficients) != 6:
            raise ValueError(f"source model takes 6 coefficients, got {len(self.coefficients)}")

    @staticmethod
    def basis(points: np.ndarray) -> np.ndarray:
        x, y = points[:, 0], points[:, 1]
        return np.stack([np.ones_like(x), x, y, x * x, y * y, x * y], axis=1)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.basis(points) @ np.asarray(self.coefficients, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(COEFFICIENT_NAMES, map(float, self.coefficients)))


def inverse_loss(u_pde: Jet2, f_a, u_data, data_values, weight: float) -> torch.Tensor:
    """Poisson residual with the learned source plus weighted data misfit."""
    return mean_square(u_pde.laplacian() + f_a) + weight * mean_square(u_data - data_values)


class InverseObjective(ObjectiveInterface):
    """
    Recovers the source coefficients together with the solution. The
    parameter vector is [network parameters, a0..a5]; mini-batches select
    PDE points while the data misfit always uses every measurement.
    """

    kind = "inverse_poisson"

    def __init__(
        self,
        trial: TrialInterface,
        data_points: np.ndarray,
        data_values: np.ndarray,
        weight: float = DEFAULT_DATA_WEIGHT,
        source: SourceModel | None = None,
    ):
        data_points = np.asarray(data_points, dtype=float).reshape(-1, 2)
        if len(data_points) == 0:
            raise EmptyData("inverse problem needs at least one data point")
        if weight < 0:
            raise ValueError(f"data weight must be nonnegative, got {weight}")
        self.trial = trial
        self.data_trial = trial.with_points(data_points)
        self.data_values = backend.to_torch(np.asarray(data_values, dtype=float).reshape(-1))
        if len(self.data_values) != len(data_points):
            raise ValueError("data points and values differ in length")
        self.weight = float(weight)
        self.source = source or SourceModel()
        self.basis = backend.to_torch(SourceModel.basis(trial.points))

    @property
    def n_params(self) -> int:
        return self.trial.model.n_params + 6

    def initial_params(self) -> np.ndarray:
        return np.concatenate([self.trial.model.get_params(), np.asarray(self.source.coefficients, dtype=float)])

    def coefficients(self, params) -> np.ndarray:
        return np.asarray(params, dtype=float)[self.trial.model.n_params :]

    def store(self, params: np.ndarray) -> None:
        super().store(params)
        self.source = SourceModel(tuple(self.coefficients(params)))

    def loss(self, params, idx=None):
        theta = self.network_params(params)
        a = params[self.trial.model.n_params :]
        f_a = batch(self.basis, idx) @ a
        u_pde = self.trial.evaluate(theta, idx)
        u_data = self.data_trial.evaluate(theta).v
        return inverse_loss(u_pde, f_a, u_data, self.data_values, self.weight)
