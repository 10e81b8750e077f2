import math
from typing import Any, Mapping

import numpy as np

from autodiff import backend
from autodiff.jet import Jet2, NonFiniteResult
from expr.nodes import Binary, Call, Const, Expr, Neg, Number, Var, to_source


class UnboundVariable(LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} is not bound")


_CONSTANTS = {"pi": math.pi, "e": math.e}


def evaluate(expr: Expr, bindings: Mapping[str, Any]):
    """
    Evaluate an expression over any supported scalar algebra.

    Bindings may be Python floats, numpy arrays, torch tensors or Jet2
    values; evaluating over jets yields the spatial derivatives of the
    expression. Every intermediate result is checked for NaN/inf.

    Parameters:
    - expr (Expr): parsed expression.
    - bindings (Mapping[str, Any]): values for the variables used by expr.

    Returns:
    - the value, in the algebra of the bindings.

    Raises:
    - UnboundVariable: if a variable of expr is missing from bindings.
    - NonFiniteResult: naming the first subexpression that is not finite.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return _eval(expr, bindings)


def _eval(node: Expr, bindings: Mapping[str, Any]):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Const):
        return _CONSTANTS[node.name]
    if isinstance(node, Var):
        if node.name not in bindings:
            raise UnboundVariable(node.name)
        return bindings[node.name]

    if isinstance(node, (Neg, Call)):
        children = (_eval(node.operand if isinstance(node, Neg) else node.arg, bindings),)
    else:
        children = (_eval(node.left, bindings), _eval(node.right, bindings))
    try:
        value = _apply(node, *children)
    except (ZeroDivisionError, OverflowError, NonFiniteResult) as e:
        raise NonFiniteResult(to_source(node), str(e)) from e
    if not _finite(value):
        raise NonFiniteResult(to_source(node))
    return value


def _apply(node: Expr, left, right=None):
    if isinstance(node, Neg):
        return -left
    if isinstance(node, Call):
        if isinstance(left, Jet2):
            return getattr(left, node.func)()
        return getattr(backend, node.func)(left)

    if node.op == "^" and isinstance(node.right, Number) and node.right.value.is_integer():
        n = int(node.right.value)
        if isinstance(left, Jet2):
            return left.ipow(n)
        if n < 0 and backend.any_true(left == 0):
            raise ZeroDivisionError("zero to a negative power")
        return left**n

    if isinstance(right, Jet2) and not isinstance(left, Jet2):
        left = Jet2.constant(left)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        if not isinstance(right, Jet2) and backend.any_true(right == 0):
            raise ZeroDivisionError("division by zero")
        return left / right
    if isinstance(left, Jet2):
        return left**right
    return backend.power(left, right)


def _finite(value) -> bool:
    if isinstance(value, Jet2):
        return value.is_finite()
    return backend.all_finite(value)
