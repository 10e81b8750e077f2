from autodiff.jet import Jet2
from expr.evaluator import evaluate
from expr.parser import parse
from geometry.polygon import Polygon

from .model_interface import ModelInterface


class ExprField(ModelInterface):
    """
    Fixed field given by an expression of (x, y[, p]).

    The Cartesian point is rebuilt from the coordinate inputs as
    x = sum_i l_i x_i, so the field can stand in for a network inside the
    trial construction. With n + 1 inputs the last one is bound to p.
    """

    def __init__(self, poly: Polygon, source: str, parametric: bool = False):
        self.poly = poly
        self.source = source
        self.expr = parse(source)
        self.parametric = parametric
        self.n_inputs = poly.n + (1 if parametric else 0)

    @property
    def n_params(self) -> int:
        return 0

    def forward(self, inputs, params=None):
        n = self.poly.n
        x = y = 0.0
        for i in range(n):
            li = inputs[..., i]
            vx, vy = (float(c) for c in self.poly.vertices[i])
            x = li * vx + x
            y = li * vy + y
        bindings = {"x": x, "y": y}
        if self.parametric:
            bindings["p"] = inputs[..., n]
        value = evaluate(self.expr, bindings)
        if not isinstance(value, Jet2):
            # constant expressions still take the batch shape of the inputs
            value = x * 0.0 + value
        return value
