from dataclasses import dataclass, field

import numpy as np

from autodiff.tape import NonFiniteGradient

from .optimizer_interface import LossAndGrad, OptimizerInterface


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


def adam_step(
    state: AdamState,
    theta: np.ndarray,
    grad: np.ndarray,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> np.ndarray:
    """Bias-corrected Adam update. Moments in `state` are updated in place."""
    if state.m.shape != theta.shape or grad.shape != theta.shape:
        raise ValueError(f"adam state has shape {state.m.shape}, parameters {theta.shape}")
    bad = np.flatnonzero(~np.isfinite(grad))
    if bad.size:
        raise NonFiniteGradient(int(bad[0]))

    state.t += 1
    state.m = beta1 * state.m + (1.0 - beta1) * grad
    state.v = beta2 * state.v + (1.0 - beta2) * grad * grad
    m_hat = state.m / (1.0 - beta1**state.t)
    v_hat = state.v / (1.0 - beta2**state.t)
    return theta - lr * m_hat / (np.sqrt(v_hat) + eps)


@dataclass
class Adam(OptimizerInterface):
    """
    Adam with per-epoch exponential learning-rate decay: after each epoch
    lr <- lr * decay.
    """

    lr: float = 1e-3
    decay: float = 1.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    name: str = "adam"
    state: AdamState | None = field(default=None, repr=False)

    def step(self, theta, fun: LossAndGrad):
        loss, grad = fun(theta)
        if self.state is None:
            self.state = AdamState.zeros(theta.size)
        theta = adam_step(self.state, theta, grad, self.lr, self.beta1, self.beta2, self.eps)
        return theta, loss

    def end_epoch(self):
        self.lr *= self.decay

    def reset(self):
        self.state = None
