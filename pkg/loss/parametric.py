import numpy as np
import torch

from autodiff import backend
from autodiff.jet import Jet2
from trial.trial_interface import TrialInterface

from .loss_interface import ObjectiveInterface, batch


def stretch(xi, p):
    """A(xi, p) = 2 - (1 - p) xi."""
    return 2.0 - (1.0 - p) * xi


def jacobian(xi, p):
    return stretch(xi, p) / 2.0


def to_physical(xi, eta, p):
    """Reference square to the quadrilateral with vertices (0,0),(1,0),(1,(1+p)/2),(0,1)."""
    return xi, eta * stretch(xi, p) / 2.0


def parametric_laplacian(u: Jet2, xi, eta, p):
    """
    Cartesian Laplacian from derivatives in the reference variables.

    lap u = u_ss + 2c t/A u_st + (4 + c^2 t^2)/A^2 u_tt + 2c^2 t/A^2 u_t
    with s = xi, t = eta, c = 1 - p and A = 2 - c s. The jet's x and y
    slots hold the s and t derivatives.
    """
    c = 1.0 - p
    a = stretch(xi, p)
    a2 = a * a
    return (
        u.hxx
        + 2.0 * c * eta / a * u.hxy
        + (4.0 + c * c * eta * eta) / a2 * u.hyy
        + 2.0 * c * c * eta / a2 * u.gy
    )


def parametric_loss(u: Jet2, xi, eta, p, f) -> torch.Tensor:
    """Mean of (lap u + f)^2 |J| on reference points."""
    r = parametric_laplacian(u, xi, eta, p) + f
    return (r * r * jacobian(xi, p)).mean()


class ParametricObjective(ObjectiveInterface):
    """
    Poisson over the quadrilateral family indexed by p, trained on the
    reference unit square. The trial's extra input column is p.
    """

    kind = "parametric_poisson"

    def __init__(self, trial: TrialInterface, source_values: np.ndarray):
        if getattr(trial, "extra_inputs", None) is None:
            raise ValueError("parametric objective needs p as an extra trial input")
        self.trial = trial
        self.xi = backend.to_torch(trial.points[:, 0])
        self.eta = backend.to_torch(trial.points[:, 1])
        self.p = backend.to_torch(trial.extra_inputs[:, 0])
        self.source = backend.to_torch(np.broadcast_to(source_values, (trial.n_points,)))

    def loss(self, params, idx=None):
        u = self.trial.evaluate(self.network_params(params), idx)
        return parametric_loss(
            u, batch(self.xi, idx), batch(self.eta, idx), batch(self.p, idx), batch(self.source, idx)
        )
