import math

import numpy as np
import pytest

from autodiff.jet import Jet2, NonFiniteResult
from expr.evaluator import UnboundVariable, evaluate
from expr.nodes import Binary, Neg, Number, Var, free_variables, to_source
from expr.parser import ExprSyntaxError, UnknownIdentifier, parse


def value(source, **bindings):
    return evaluate(parse(source), bindings)


@pytest.mark.parametrize(
    "source, expected",
    [
        ("1 + 2*3", 7.0),
        ("(1 + 2)*3", 9.0),
        ("2^3^2", 512.0),
        ("-2^2", -4.0),
        ("(-2)^2", 4.0),
        ("2*-3", -6.0),
        ("8/4/2", 1.0),
        ("1 - 2 - 3", -4.0),
        ("2.5e1 + .5", 25.5),
        ("cos(pi) + exp(0)", 0.0),
    ],
)
def test_precedence(source, expected):
    assert value(source) == pytest.approx(expected, abs=1e-15)


def test_unary_minus_binds_looser_than_power():
    assert parse("-x^2") == Neg(Binary("^", Var("x"), Number(2.0)))


@pytest.mark.parametrize(
    "source, position",
    [
        ("1 + * 2", 4),
        ("sin x", 4),
        ("2x", 1),
        ("(1 + 2", 6),
        ("1 $ 2", 2),
        ("", 0),
    ],
)
def test_syntax_error_position(source, position):
    with pytest.raises(ExprSyntaxError) as e:
        parse(source)
    assert e.value.position == position


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as e:
        parse("1 + sinh(x)")
    assert e.value.name == "sinh"
    assert e.value.position == 4


@pytest.mark.parametrize(
    "source",
    ["-x^2", "(x - y)*(x + y)", "sin(pi*x)/(1 + exp(-y))", "2^-x", "x - (y - t)", "-(x + 1)", "p/(t*t)"],
)
def test_pretty_print_reparses(source):
    tree = parse(source)
    assert parse(to_source(tree)) == tree


def test_free_variables():
    assert free_variables(parse("sin(pi*x) + t*e")) == {"x", "t"}


def test_evaluate_arrays():
    x = np.linspace(0.0, 1.0, 5)
    np.testing.assert_allclose(value("sin(pi*x)", x=x), np.sin(np.pi * x), atol=1e-15)


def test_evaluate_jet_gives_derivatives():
    x, y = Jet2.seed(np.array([0.3, 0.7]), np.array([0.2, 0.9]))
    u = value("x^3*y + exp(y)", x=x, y=y)
    np.testing.assert_allclose(u.gx, 3 * x.v**2 * y.v)
    np.testing.assert_allclose(u.hxx, 6 * x.v * y.v)
    np.testing.assert_allclose(u.hxy, 3 * x.v**2)
    np.testing.assert_allclose(u.hyy, np.exp(y.v))


def test_unbound_variable():
    with pytest.raises(UnboundVariable) as e:
        value("x + y", x=1.0)
    assert e.value.name == "y"


def test_division_by_zero_names_subexpression():
    with pytest.raises(NonFiniteResult) as e:
        value("1 + 1/x", x=0.0)
    assert e.value.operation == "1 / x"


def test_overflow_is_not_finite():
    with pytest.raises(NonFiniteResult):
        value("exp(1000*x)", x=np.array([0.0, 1.0]))


def test_constants():
    assert value("pi") == math.pi
    assert value("e") == math.e
