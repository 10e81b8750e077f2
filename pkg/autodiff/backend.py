"""Array backend dispatch.

Jet components and coordinate data are Python floats, numpy arrays or torch
tensors. Every elementary function used by the jet algebra, the expression
evaluator and the coordinate formulas goes through here so one code path
serves precomputation (numpy) and training (torch, float64, autograd).
"""

import math

import numpy as np
import torch


def is_torch(x) -> bool:
    return torch.is_tensor(x)


def is_array(x) -> bool:
    return isinstance(x, np.ndarray) or torch.is_tensor(x)


def sin(x):
    return torch.sin(x) if torch.is_tensor(x) else np.sin(x)


def cos(x):
    return torch.cos(x) if torch.is_tensor(x) else np.cos(x)


def exp(x):
    return torch.exp(x) if torch.is_tensor(x) else np.exp(x)


def log(x):
    return torch.log(x) if torch.is_tensor(x) else np.log(x)


def tanh(x):
    return torch.tanh(x) if torch.is_tensor(x) else np.tanh(x)


def sqrt(x):
    return torch.sqrt(x) if torch.is_tensor(x) else np.sqrt(x)


def power(x, c):
    if torch.is_tensor(x):
        return torch.pow(x, c)
    return np.power(x, c)


def matmul_t(x, w):
    """x @ w.T for a weight matrix w of shape (out, in)."""
    if torch.is_tensor(x) or torch.is_tensor(w):
        x = torch.as_tensor(x, dtype=torch.float64)
        w = torch.as_tensor(w, dtype=torch.float64)
        return x @ w.T
    return np.asarray(x) @ np.asarray(w).T


def shape_of(x) -> tuple:
    if is_array(x):
        return tuple(x.shape)
    return ()


def broadcast_to(x, shape: tuple, like=None):
    """Materialize x with the given shape, keeping the backend of `like`."""
    if torch.is_tensor(like) or torch.is_tensor(x):
        x = torch.as_tensor(x, dtype=torch.float64)
        return x.expand(shape) if x.shape != torch.Size(shape) else x
    return np.broadcast_to(np.asarray(x, dtype=float), shape)


def stack(items: list, axis: int = -1):
    if any(torch.is_tensor(i) for i in items):
        return torch.stack([torch.as_tensor(i, dtype=torch.float64) for i in items], dim=axis)
    return np.stack(items, axis=axis)


def concat(items: list, axis: int = -1):
    if any(torch.is_tensor(i) for i in items):
        return torch.cat([torch.as_tensor(i, dtype=torch.float64) for i in items], dim=axis)
    return np.concatenate(items, axis=axis)


def reduce_sum(x, axis: int = -1, keepdims: bool = False):
    if torch.is_tensor(x):
        return torch.sum(x, dim=axis, keepdim=keepdims)
    return np.sum(x, axis=axis, keepdims=keepdims)


def where(mask, a, b):
    if torch.is_tensor(mask) or torch.is_tensor(a) or torch.is_tensor(b):
        mask = torch.as_tensor(mask)
        a = torch.as_tensor(a, dtype=torch.float64)
        b = torch.as_tensor(b, dtype=torch.float64)
        return torch.where(mask, a, b)
    return np.where(mask, a, b)


def any_true(mask) -> bool:
    if torch.is_tensor(mask):
        return bool(mask.any())
    return bool(np.any(mask))


def all_finite(x) -> bool:
    if torch.is_tensor(x):
        return bool(torch.isfinite(x).all())
    if isinstance(x, np.ndarray):
        return bool(np.isfinite(x).all())
    return math.isfinite(x)


def to_torch(x):
    if torch.is_tensor(x):
        return x
    return torch.from_numpy(np.array(x, dtype=np.float64))


def to_numpy(x):
    if torch.is_tensor(x):
        return x.detach().cpu().numpy()
    return np.asarray(x, dtype=float)
