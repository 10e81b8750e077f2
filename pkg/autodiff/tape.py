"""Reverse-mode gradients of scalar losses with respect to a flat parameter vector.

The forward pass is recorded by torch autograd in float64; losses built from
torch-valued jets therefore differentiate through the spatial derivatives.
"""

import math
from typing import Callable

import numpy as np
import torch


class NonFiniteLoss(ArithmeticError):
    def __init__(self, value: float):
        self.value = value
        super().__init__(f"loss is not finite: {value}")


class NonFiniteGradient(ArithmeticError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"gradient is not finite at parameter index {index}")


def value_and_grad(
    loss_fn: Callable[[torch.Tensor], torch.Tensor], theta: np.ndarray
) -> tuple[float, np.ndarray]:
    """
    Evaluate a scalar loss and its gradient.

    Parameters:
    - loss_fn (callable): maps a float64 torch parameter vector to a scalar tensor.
    - theta (np.ndarray): parameter vector.

    Returns:
    - tuple[float, np.ndarray]: loss value and full-length gradient.

    Raises:
    - NonFiniteLoss: if the loss is NaN or infinite.
    - NonFiniteGradient: if any gradient entry is NaN or infinite.
    """
    params = torch.tensor(np.asarray(theta, dtype=float), dtype=torch.float64, requires_grad=True)
    loss = loss_fn(params)
    if not torch.is_tensor(loss):
        loss = torch.as_tensor(loss, dtype=torch.float64)
    value = float(loss.detach())
    if not math.isfinite(value):
        raise NonFiniteLoss(value)

    if loss.requires_grad:
        (grad,) = torch.autograd.grad(loss, params, allow_unused=True)
    else:
        grad = None
    if grad is None:
        return value, np.zeros_like(theta, dtype=float)

    grad = grad.detach().numpy().copy()
    bad = np.flatnonzero(~np.isfinite(grad))
    if bad.size:
        raise NonFiniteGradient(int(bad[0]))
    return value, grad


def grad(loss_fn: Callable[[torch.Tensor], torch.Tensor], theta: np.ndarray) -> np.ndarray:
    return value_and_grad(loss_fn, theta)[1]
