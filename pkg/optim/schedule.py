import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from loguru import logger

from artifacts import write_csv
from autodiff.jet import NonFiniteResult
from autodiff.tape import NonFiniteGradient, NonFiniteLoss
from loss.loss_interface import ObjectiveInterface
from network.mlp import make_rng

from .lbfgs import LineSearchFailed
from .optimizer_factory import OptimizerFactory
from .optimizer_interface import LossAndGrad

LOG_FLOOR = 1e-30
TRAINING_ERRORS = (NonFiniteLoss, NonFiniteGradient, NonFiniteResult)


class InvalidPhase(ValueError):
    pass


@dataclass(frozen=True)
class Phase:
    """
    One optimizer stage of a training schedule.

    Attributes:
    - optimizer (str): "adam" or "lbfgs".
    - epochs (int): epochs (Adam) or iterations (L-BFGS), at least 1.
    - lr (float): Adam learning rate.
    - decay (float): per-epoch learning-rate factor in (0, 1].
    - log_loss (bool): optimize log(L + 1e-30) instead of L.
    - batch_size (int): mini-batch size, 0 for full batch.
    - options (dict): further optimizer keyword arguments.
    """

    optimizer: str
    epochs: int
    lr: float = 1e-3
    decay: float = 1.0
    log_loss: bool = False
    batch_size: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.optimizer not in OptimizerFactory.NAMES:
            raise InvalidPhase(f"unknown optimizer {self.optimizer!r}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise InvalidPhase(f"epochs must be a positive integer, got {self.epochs}")
        if not 0.0 < self.decay <= 1.0:
            raise InvalidPhase(f"decay must lie in (0, 1], got {self.decay}")
        if self.lr <= 0.0:
            raise InvalidPhase(f"learning rate must be positive, got {self.lr}")
        if self.batch_size < 0:
            raise InvalidPhase(f"batch size must be nonnegative, got {self.batch_size}")
        if self.optimizer == "lbfgs" and self.batch_size:
            raise InvalidPhase("L-BFGS runs on the full batch")

    @classmethod
    def from_dict(cls, d: dict) -> "Phase":
        d = dict(d)
        try:
            return cls(
                optimizer=d.pop("optimizer"),
                epochs=d.pop("epochs"),
                lr=float(d.pop("lr", 1e-3)),
                decay=float(d.pop("decay", 1.0)),
                log_loss=bool(d.pop("log_loss", False)),
                batch_size=int(d.pop("batch_size", 0)),
                options=d,
            )
        except KeyError as e:
            raise InvalidPhase(f"phase is missing {e.args[0]!r}") from e

    def make_optimizer(self):
        if self.optimizer == "adam":
            return OptimizerFactory.get_optimizer("adam", lr=self.lr, decay=self.decay, **self.options)
        return OptimizerFactory.get_optimizer(self.optimizer, **self.options)


def log_loss(fun: LossAndGrad) -> LossAndGrad:
    """log(L + 1e-30) and its gradient, which is parallel to that of L."""

    def wrapped(theta):
        value, grad = fun(theta)
        shifted = value + LOG_FLOOR
        return math.log(shifted), grad / shifted

    return wrapped


def from_log(value: float) -> float:
    return math.exp(value) - LOG_FLOOR


def minibatches(n_points: int, batch_size: int, rng: np.random.Generator) -> list[np.ndarray]:
    """A seeded shuffle of range(n_points) cut into consecutive batches; the last may be short."""
    if batch_size <= 0 or batch_size >= n_points:
        return [None]
    order = rng.permutation(n_points)
    return [order[i : i + batch_size] for i in range(0, n_points, batch_size)]


@dataclass
class RunRecord:
    epochs: list[int] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    lrs: list[float] = field(default_factory=list)
    phases: list[int] = field(default_factory=list)
    wall_times: list[float] = field(default_factory=list)
    stalled: list[int] = field(default_factory=list)
    params: np.ndarray | None = None
    error: Exception | None = None

    def __len__(self):
        return len(self.losses)

    def append(self, epoch: int, loss: float, lr: float, phase: int, wall_time: float):
        self.epochs.append(epoch)
        self.losses.append(loss)
        self.lrs.append(lr)
        self.phases.append(phase)
        self.wall_times.append(wall_time)

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else math.nan

    @property
    def ok(self) -> bool:
        return self.error is None

    def raise_for_error(self):
        if self.error is not None:
            raise self.error

    def write_csv(self, path: str) -> str:
        rows = zip(self.epochs, self.losses, self.lrs, self.phases)
        return write_csv(path, ("epoch", "loss", "lr", "phase"), rows)


def run_schedule(
    phases: Sequence[Phase],
    objective: ObjectiveInterface,
    theta0: np.ndarray,
    seed: int = 0,
    log_every: int = 100,
    on_epoch: Callable[[int, float], None] | None = None,
) -> RunRecord:
    """
    Run the phases in order from theta0.

    Training errors end the run early; the returned record then carries the
    error, and params holds the last parameters whose loss was evaluated
    and finite (theta0 if there are none). A line search that finds no
    Wolfe step ends only its phase, which is noted in `stalled`.

    Parameters:
    - phases (Sequence[Phase]): at least one phase.
    - objective (ObjectiveInterface): the loss to minimize.
    - theta0 (np.ndarray): initial parameters.
    - seed (int): mini-batch shuffle seed.
    - log_every (int): epochs between debug log lines.
    - on_epoch (callable): optional hook called with (epoch, raw loss).

    Returns:
    - RunRecord: one entry per completed epoch.
    """
    if not phases:
        raise InvalidPhase("a schedule needs at least one phase")
    for phase in phases:
        if phase.batch_size and not objective.supports_batching:
            raise InvalidPhase(f"the {objective.kind} objective does not support mini-batches")

    rng = make_rng(seed)
    theta = np.array(theta0, dtype=float)
    record = RunRecord(params=theta.copy())
    last_finite = theta.copy()
    start = time.perf_counter()
    epoch = 0

    try:
        for k, phase in enumerate(phases):
            optimizer = phase.make_optimizer()
            logger.info(f"phase {k}: {phase.optimizer} for {phase.epochs} epochs")
            for _ in range(phase.epochs):
                lr = optimizer.lr
                batch_losses = []
                try:
                    for idx in minibatches(objective.n_points, phase.batch_size, rng):
                        fun = lambda p, idx=idx: objective.value_and_grad(p, idx)
                        if phase.log_loss:
                            fun = log_loss(fun)
                        before = theta.copy()
                        theta, value = optimizer.step(theta, fun)
                        last_finite = theta.copy() if optimizer.loss_at_new_params else before
                        batch_losses.append(from_log(value) if phase.log_loss else value)
                except LineSearchFailed as e:
                    logger.warning(f"phase {k} stalled at epoch {epoch + 1}: {e}")
                    record.stalled.append(k)
                    break
                optimizer.end_epoch()

                loss = float(np.mean(batch_losses))
                epoch += 1
                record.append(epoch, loss, lr, k, time.perf_counter() - start)
                record.params = theta.copy()
                if on_epoch is not None:
                    on_epoch(epoch, loss)
                if epoch % log_every == 0:
                    logger.debug(f"epoch {epoch}: loss {loss:.6e}, lr {lr:.3e}")
            logger.info(f"phase {k} done at epoch {epoch}, loss {record.final_loss:.6e}")
    except TRAINING_ERRORS as e:
        logger.error(f"training stopped at epoch {epoch + 1}: {e}")
        record.error = e
        record.params = last_finite

    return record
