from collections import deque

import numpy as np
from loguru import logger
from scipy.optimize import line_search

from autodiff.jet import NonFiniteResult
from autodiff.tape import NonFiniteGradient, NonFiniteLoss

from .optimizer_interface import LossAndGrad, OptimizerInterface


class LineSearchFailed(RuntimeError):
    pass


class LbfgsHistory:
    """Most recent (s, y) pairs of an L-BFGS run."""

    def __init__(self, m: int = 10):
        self.pairs = deque(maxlen=m)

    def __len__(self):
        return len(self.pairs)

    def append(self, s: np.ndarray, y: np.ndarray) -> bool:
        sy = float(s @ y)
        # curvature pairs with s.y <= 0 would break positive definiteness
        if sy <= 1e-14 * np.linalg.norm(s) * np.linalg.norm(y):
            return False
        self.pairs.append((1.0 / sy, s.copy(), y.copy()))
        return True

    def clear(self):
        self.pairs.clear()

    def inverse_action(self, g: np.ndarray) -> np.ndarray:
        """Two-loop recursion: approximate H^-1 g."""
        q = g.copy()
        alphas = []
        for rho, s, y in reversed(self.pairs):
            alpha = rho * (s @ q)
            q -= alpha * y
            alphas.append(alpha)
        alphas.reverse()

        if self.pairs:
            _, s, y = self.pairs[-1]
            q *= (s @ y) / (y @ y)

        for (rho, s, y), alpha in zip(self.pairs, alphas):
            beta = rho * (y @ q)
            q += (alpha - beta) * s
        return q


class _Memo:
    """Caches fun so the line search's separate f and f' calls share one evaluation."""

    def __init__(self, fun: LossAndGrad):
        self.fun = fun
        self.x = None
        self.value = None

    def __call__(self, x):
        if self.x is None or not np.array_equal(x, self.x):
            self.x = np.array(x, copy=True)
            try:
                self.value = self.fun(self.x)
            except (NonFiniteLoss, NonFiniteGradient, NonFiniteResult):
                # trial step overshot; the search backtracks from an infinite value
                self.value = (np.inf, np.full(self.x.shape, np.nan))
        return self.value

    def f(self, x):
        return self(x)[0]

    def g(self, x):
        return self(x)[1]


def wolfe_satisfied(f0, slope0, f1, slope1, alpha, c1=1e-4, c2=0.9, rtol=1e-10) -> bool:
    """Both strong Wolfe inequalities for a step of length alpha."""
    slack = rtol * max(1.0, abs(f0))
    armijo = f1 <= f0 + c1 * alpha * slope0 + slack
    curvature = abs(slope1) <= c2 * abs(slope0) + rtol * abs(slope0)
    return bool(armijo and curvature)


def _search(memo: _Memo, theta, direction, f0, g0, c1, c2, maxiter):
    slope0 = float(g0 @ direction)
    if not slope0 < 0.0:
        return None
    alpha, _, _, f1, _, slope1 = line_search(
        memo.f, memo.g, theta, direction, gfk=g0, old_fval=f0, c1=c1, c2=c2, maxiter=maxiter
    )
    if alpha is None or slope1 is None or f1 is None:
        return None
    # scipy returns the gradient at the new point here, not the documented slope
    slope1 = float(np.dot(slope1, direction))
    if not wolfe_satisfied(f0, slope0, f1, slope1, alpha, c1, c2):
        logger.warning(f"line search step {alpha:.3e} violates the Wolfe conditions")
        return None
    theta1 = theta + alpha * direction
    f1, g1 = memo(theta1)
    return theta1, f1, g1


def lbfgs_step(
    history: LbfgsHistory,
    theta: np.ndarray,
    fun: LossAndGrad,
    f0: float | None = None,
    g0: np.ndarray | None = None,
    c1: float = 1e-4,
    c2: float = 0.9,
    maxiter: int = 25,
) -> tuple[np.ndarray, float, np.ndarray]:
    """
    One L-BFGS iteration with a strong Wolfe line search.

    On line-search failure the history is cleared and the step retried along
    the steepest-descent direction.

    Returns:
    - tuple: (theta, loss, gradient) at the accepted point.

    Raises:
    - LineSearchFailed: if the steepest-descent retry fails as well.
    """
    if f0 is None or g0 is None:
        f0, g0 = fun(theta)
    if not np.any(g0):
        return theta, f0, g0
    memo = _Memo(fun)
    memo.x, memo.value = np.array(theta, copy=True), (f0, g0)

    result = None
    if len(history):
        result = _search(memo, theta, -history.inverse_action(g0), f0, g0, c1, c2, maxiter)
        if result is None:
            logger.warning("L-BFGS line search failed; restarting from steepest descent")
            history.clear()
    if result is None:
        # unit-length first trial step along the gradient
        scale = 1.0 / max(1.0, float(np.linalg.norm(g0)))
        result = _search(memo, theta, -scale * g0, f0, g0, c1, c2, maxiter)
    if result is None:
        raise LineSearchFailed(f"no step satisfying the strong Wolfe conditions from loss {f0:.6e}")

    theta1, f1, g1 = result
    history.append(theta1 - theta, g1 - g0)
    return theta1, f1, g1


class Lbfgs(OptimizerInterface):
    name = "lbfgs"
    loss_at_new_params = True

    def __init__(self, history: int = 10, c1: float = 1e-4, c2: float = 0.9, max_line_search: int = 25):
        self.history = LbfgsHistory(history)
        self.c1 = c1
        self.c2 = c2
        self.max_line_search = max_line_search
        self._last = None

    def step(self, theta, fun: LossAndGrad):
        f0 = g0 = None
        if self._last is not None and np.array_equal(self._last[0], theta):
            _, f0, g0 = self._last
        theta1, f1, g1 = lbfgs_step(
            self.history, theta, fun, f0, g0, self.c1, self.c2, self.max_line_search
        )
        self._last = (theta1, f1, g1)
        return theta1, f1

    def reset(self):
        self.history.clear()
        self._last = None
