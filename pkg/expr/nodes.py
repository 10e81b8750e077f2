from __future__ import annotations

from dataclasses import dataclass
from typing import Union

VARIABLES = ("x", "y", "t", "p")
CONSTANTS = ("pi", "e")
FUNCTIONS = ("sin", "cos", "exp")
BINARY_OPS = ("+", "-", "*", "/", "^")


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Number, Var, Const, Neg, Binary, Call]

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY = 3
_ATOM = 5


def precedence(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return _UNARY
    return _ATOM


def format_number(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def to_source(node: Expr) -> str:
    """
    Pretty-print an expression with the minimum parentheses needed to parse
    back to the same tree.
    """
    if isinstance(node, Number):
        return format_number(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, precedence(node.operand) < _UNARY)

    p = _PRECEDENCE[node.op]
    if node.op == "^":
        # base binds as a primary, exponent as a unary expression
        left = _wrap(node.left, precedence(node.left) < _ATOM)
        right = _wrap(node.right, precedence(node.right) < _UNARY)
        return f"{left}^{right}"
    left = _wrap(node.left, precedence(node.left) < p)
    right = _wrap(node.right, precedence(node.right) <= p)
    return f"{left} {node.op} {right}"


def _wrap(node: Expr, parens: bool) -> str:
    text = to_source(node)
    return f"({text})" if parens else text


def free_variables(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, Call):
        return free_variables(node.arg)
    if isinstance(node, Binary):
        return free_variables(node.left) | free_variables(node.right)
    return set()
