from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ternstab.errors import DomainMismatch, ExpressionError, Overflow
from ternstab.expressions import parse, tokenize
from ternstab.ternary_algebra import Poly


def ev(src, **env):
    return parse(src, tuple(env) or ("x",)).evaluate(env)


def test_precedence_and_associativity():
    assert ev("1 + 2 * 3", x=0) == 7
    assert ev("2 ^ 3 ^ 2", x=0) == 2 ** 9
    assert ev("-2 ^ 2", x=0) == -4
    assert ev("2 ** -1", x=0) == 0.5
    assert ev("8 / 4 / 2", x=0) == 1
    assert ev("(1 + 2) * 3", x=0) == 9
    assert ev("+x - -x", x=2.0) == 4.0


def test_functions_and_constants():
    assert ev("sin(pi / 2)", x=0) == pytest.approx(1.0)
    assert ev("exp(1)", x=0) == pytest.approx(math.e)
    assert ev("abs(-3) + log(e)", x=0) == pytest.approx(4.0)
    assert cmath.isclose(ev("exp(2 * pi * i / 3) ^ 3", x=0), 1, abs_tol=1e-12)
    assert cmath.isclose(ev("log(-1)", x=0), 1j * math.pi)


def test_vectors_and_matrices():
    v = ev("[x, 2 * x]", x=1.5)
    assert v.tolist() == [1.5, 3.0]
    m = ev("[[exp(x), 0], [0, 2]]", x=0.0)
    assert m.shape == (2, 2) and m.tolist() == [[1.0, 0.0], [0.0, 2.0]]
    many = ev("[[exp(x), 0], [0, 2]]", x=np.array([0.0, 1.0, 2.0]))
    assert many.shape == (3, 2, 2)
    assert many[2, 0, 0] == pytest.approx(math.exp(2)) and many[2, 1, 1] == 2


def test_array_and_polynomial_evaluation():
    xs = np.linspace(-1, 1, 5)
    assert np.allclose(ev("x + sin(x)", x=xs), xs + np.sin(xs))
    t = Poly((0, 1))
    assert ev("2 * x ^ 3 - x", x=t) == Poly((0, -1, 0, 2))
    with pytest.raises(DomainMismatch):
        ev("sin(x)", x=t)


def test_log_domain_evaluation():
    node = parse("2 ^ x")
    v = node.evaluate_log({"x": 3.0**40})
    assert v.log_mag == pytest.approx(3.0**40 * math.log(2), rel=1e-14)
    v = parse("exp(x) * 5").evaluate_log({"x": 1e6})
    assert v.log_mag == pytest.approx(1e6 + math.log(5), rel=1e-14)
    with pytest.raises(Overflow):
        parse("2 ^ x").evaluate({"x": 3.0**40})


@pytest.mark.parametrize("src", ["", "1 +", "foo(x)", "y", "[1, [2]]", "(1", "1 2", "x $ 2",
                                 "sin x"])
def test_malformed_expressions(src):
    with pytest.raises(ExpressionError):
        parse(src)


def test_error_messages_point_at_columns():
    with pytest.raises(ExpressionError, match="column 5"):
        parse("1 + bogus")
    with pytest.raises(ExpressionError, match="unexpected character"):
        tokenize("x # 2")


def test_variables_are_declared():
    node = parse("x * y + z", ("x", "y", "z"))
    assert node.variables() == {"x", "y", "z"}
    with pytest.raises(ExpressionError):
        parse("x * y")


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_matches_python_arithmetic(a, b):
    env = {"x": a, "y": b}
    assert ev("x * y - 3 * x + y / 7", **env) == pytest.approx(a * b - 3 * a + b / 7)
    assert ev("abs(x) ^ 0.5", **env) == pytest.approx(abs(a) ** 0.5)
