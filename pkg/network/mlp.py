from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from loguru import logger

from autodiff import backend
from autodiff.jet import Jet2, NonFiniteResult

from .model_interface import ModelInterface

ACTIVATIONS = ("tanh", "sine")
DEFAULT_OMEGA0 = 30.0


class InvalidWidths(ValueError):
    pass


def param_count(widths: list[int]) -> int:
    return sum(widths[k] * (widths[k - 1] + 1) for k in range(1, len(widths)))


def make_rng(seed: int) -> np.random.Generator:
    """The documented generator used for every seeded draw: PCG64."""
    return np.random.Generator(np.random.PCG64(seed))


class Mlp(ModelInterface):
    """
    Fully connected network with a linear output layer.

    Hidden layers apply tanh(W z + b) or sin(omega0 (W z + b)). Parameters
    live in one flat vector: for each layer in order, W (row-major, shape
    out x in) followed by b.

    Attributes:
    - widths (list[int]): [n_in, N_1, ..., N_L, 1].
    - activation (str): "tanh" or "sine".
    - omega0 (float): frequency of the sine activation.
    - params (np.ndarray): the stored flat parameter vector.
    """

    def __init__(self, widths: list[int], activation: str = "tanh", omega0: float = DEFAULT_OMEGA0, params=None):
        widths = [int(w) for w in widths]
        if len(widths) < 2 or any(w < 1 for w in widths) or widths[-1] != 1:
            raise InvalidWidths(f"widths must be [n_in, ..., 1] with positive entries, got {widths}")
        if activation not in ACTIVATIONS:
            raise ValueError(f"Unknown activation: {activation}")
        self.widths = widths
        self.activation = activation
        self.omega0 = float(omega0)
        self.n_inputs = widths[0]
        self.params = np.zeros(self.n_params) if params is None else np.array(params, dtype=float)
        if len(self.params) != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {len(self.params)}")

    @classmethod
    def init(cls, widths: list[int], activation: str = "tanh", seed: int = 0, omega0: float = DEFAULT_OMEGA0) -> Mlp:
        """
        Seeded initialization.

        tanh: Glorot-uniform weights. sine: first layer U(-1/n_in, 1/n_in),
        later layers U(-sqrt(6/fan_in)/omega0, sqrt(6/fan_in)/omega0).
        Biases start at zero.
        """
        mlp = cls(widths, activation, omega0)
        rng = make_rng(seed)
        chunks = []
        for k in range(1, len(mlp.widths)):
            fan_in, fan_out = mlp.widths[k - 1], mlp.widths[k]
            if activation == "tanh":
                limit = math.sqrt(6.0 / (fan_in + fan_out))
            elif k == 1:
                limit = 1.0 / fan_in
            else:
                limit = math.sqrt(6.0 / fan_in) / mlp.omega0
            chunks.append(rng.uniform(-limit, limit, size=fan_out * fan_in))
            chunks.append(np.zeros(fan_out))
        mlp.params = np.concatenate(chunks)
        logger.debug(f"initialized {activation} network {mlp.widths} ({mlp.n_params} parameters, seed {seed})")
        return mlp

    @property
    def n_params(self) -> int:
        return param_count(self.widths)

    def get_params(self) -> np.ndarray:
        return self.params.copy()

    def set_params(self, params) -> None:
        params = np.array(backend.to_numpy(params), dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {params.shape}")
        self.params = params

    def layers(self, params=None) -> list[tuple]:
        """Split a flat vector into (W, b) views per layer."""
        params = self.params if params is None else params
        out, offset = [], 0
        for k in range(1, len(self.widths)):
            n_in, n_out = self.widths[k - 1], self.widths[k]
            w = params[offset : offset + n_out * n_in].reshape(n_out, n_in)
            offset += n_out * n_in
            b = params[offset : offset + n_out]
            offset += n_out
            out.append((w, b))
        return out

    def _activate(self, z):
        if self.activation == "tanh":
            return z.tanh() if isinstance(z, Jet2) else backend.tanh(z)
        z = z * self.omega0
        return z.sin() if isinstance(z, Jet2) else backend.sin(z)

    def forward(self, inputs, params=None):
        layers = self.layers(params)
        z = inputs
        for k, (w, b) in enumerate(layers):
            if isinstance(z, Jet2):
                z = z.linear(w, b)
            else:
                z = backend.matmul_t(z, w) + b
            if k < len(layers) - 1:
                z = self._activate(z)
        out = z[..., 0]
        value = out.v if isinstance(out, Jet2) else out
        if not backend.all_finite(value):
            raise NonFiniteResult("network forward")
        return out

    # Checkpoints

    def to_dict(self) -> dict:
        return {
            "widths": self.widths,
            "activation": self.activation,
            "omega0": self.omega0,
            "params": [float(p) for p in self.params],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Mlp:
        return cls(data["widths"], data.get("activation", "tanh"), data.get("omega0", DEFAULT_OMEGA0), data["params"])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def from_checkpoint(cls, path: str | Path) -> Mlp:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
