"""A small fixed expression language for maps and control functions.

Grammar (EBNF)::

    expr   = term { ("+" | "-") term } ;
    term   = unary { ("*" | "/") unary } ;
    unary  = ("-" | "+") unary | power ;
    power  = atom [ ("^" | "**") unary ] ;
    atom   = number | name | func "(" expr ")" | "(" expr ")"
           | "[" expr { "," expr } "]" ;
    func   = "sin" | "cos" | "exp" | "abs" | "log" ;
    name   = variable | "i" | "pi" | "e" ;

Variables are whatever the caller allows (``x`` for maps, ``x, y, z`` for
control functions).  Bracket literals build vectors; nesting them builds
matrices row by row, so ``[[exp(x), 0], [0, 2]]`` is a 2x2 matrix.  ``*`` is
the scalar (elementwise) product.  There are no user-defined functions.

Expressions evaluate on floats, complex numbers, polynomials or whole numpy
arrays of points.  :meth:`Expr.evaluate_log` evaluates a scalar expression
in the log domain, which is how ``2^x`` is followed out to ``x = 3**40``.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DomainMismatch, ExpressionError, Overflow
from .logdomain import LogScalar

FUNCTIONS = ("sin", "cos", "exp", "abs", "log")
CONSTANTS = {"i": 1j, "pi": math.pi, "e": math.e}

_TOKEN = re.compile(r"""
    (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),\[\]])
  | (?P<ws>\s+)
""", re.VERBOSE)


def tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ExpressionError(f"unexpected character {src[pos]!r} at column {pos + 1}")
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(kind), pos))
        pos = m.end()
    tokens.append(("end", "", pos))
    return tokens


# --------------------------------------------------------------------------
# AST

class Expr:
    rank = 0

    def evaluate(self, env: Mapping):
        raise NotImplementedError

    def evaluate_log(self, env: Mapping) -> LogScalar:
        raise NotImplementedError

    def variables(self) -> set[str]:
        return set()


@dataclass(frozen=True)
class Num(Expr):
    value: complex | float

    def evaluate(self, env):
        return self.value

    def evaluate_log(self, env):
        return LogScalar.from_value(self.value)


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def evaluate(self, env):
        v = env[self.name]
        return v.value if isinstance(v, LogScalar) else v

    def evaluate_log(self, env):
        v = env[self.name]
        if isinstance(v, np.ndarray):
            raise ExpressionError("log-domain evaluation is pointwise")
        return LogScalar.from_value(v)

    def variables(self):
        return {self.name}


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    @property
    def rank(self):
        return self.operand.rank

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def evaluate_log(self, env):
        return -self.operand.evaluate_log(env)

    def variables(self):
        return self.operand.variables()


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def rank(self):
        return max(self.left.rank, self.right.rank)

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            try:
                if self.op == "+":
                    out = a + b
                elif self.op == "-":
                    out = a - b
                elif self.op == "*":
                    out = a * b
                elif self.op == "/":
                    out = a / b
                else:
                    out = _power(a, b)
            except OverflowError as exc:
                raise Overflow(str(exc)) from None
            except TypeError as exc:
                raise DomainMismatch(str(exc)) from None
        return _finite(out)

    def evaluate_log(self, env):
        a = self.left.evaluate_log(env)
        if self.op == "^":
            exponent = self.right.evaluate_log(env).value
            return a ** exponent
        b = self.right.evaluate_log(env)
        return {"+": a.__add__, "-": a.__sub__, "*": a.__mul__, "/": a.__truediv__}[self.op](b)

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    @property
    def rank(self):
        return self.arg.rank

    def evaluate(self, env):
        return _apply(self.func, self.arg.evaluate(env))

    def evaluate_log(self, env):
        a = self.arg.evaluate_log(env)
        if self.func == "exp":
            return LogScalar.exp(a.value)
        if self.func == "abs":
            return abs(a)
        if self.func == "log":
            return LogScalar.from_value(a.log())
        return LogScalar.from_value(_apply(self.func, a.value))

    def variables(self):
        return self.arg.variables()


@dataclass(frozen=True)
class Vec(Expr):
    items: tuple

    @property
    def rank(self):
        return 1 + max(item.rank for item in self.items)

    def evaluate(self, env):
        parts = [np.asarray(item.evaluate(env)) for item in self.items]
        inner = self.rank - 1
        try:
            parts = np.broadcast_arrays(*parts)
        except ValueError as exc:
            raise DomainMismatch(f"ragged vector literal: {exc}") from None
        return np.stack(parts, axis=-(inner + 1))

    def evaluate_log(self, env):
        raise ExpressionError("vector literals have no log-domain form")

    def variables(self):
        return set().union(*(item.variables() for item in self.items))


def _finite(out):
    if isinstance(out, np.ndarray):
        if out.dtype.kind in "fc" and not np.all(np.isfinite(out)):
            raise Overflow("non-finite value in expression (overflow or invalid operation)")
    elif isinstance(out, (float, complex)) and not cmath.isfinite(out):
        raise Overflow(f"non-finite value {out!r} in expression")
    return out


def _power(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a_arr = np.asarray(a)
        if a_arr.dtype.kind in "iu":
            a_arr = a_arr.astype(float)
        return np.power(a_arr, b)
    return a ** b


_NP = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs, "log": np.log}
_REAL = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "abs": abs, "log": math.log}
_CPLX = {"sin": cmath.sin, "cos": cmath.cos, "exp": cmath.exp, "abs": abs, "log": cmath.log}


def _apply(func, v):
    if hasattr(v, "coeffs"):
        raise DomainMismatch(f"{func} is not defined on polynomials")
    try:
        if isinstance(v, np.ndarray):
            if func == "log" and v.dtype.kind != "c" and np.any(v < 0):
                v = v.astype(complex)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                return _finite(_NP[func](v))
        if isinstance(v, complex):
            return _finite(_CPLX[func](v))
        if func == "log" and v < 0:
            return _finite(cmath.log(v))
        return _finite(_REAL[func](v))
    except OverflowError as exc:
        raise Overflow(f"{func} overflowed: {exc}") from None
    except ValueError as exc:
        raise DomainMismatch(f"{func}({v!r}): {exc}") from None


# --------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, src: str, variables):
        self.src = src
        self.tokens = tokenize(src)
        self.pos = 0
        self.variables = set(variables)

    def peek(self):
        return self.tokens[self.pos]

    def take(self, value=None):
        tok = self.tokens[self.pos]
        if value is not None and tok[1] != value:
            raise self.error(f"expected {value!r}")
        self.pos += 1
        return tok

    def error(self, message):
        kind, text, col = self.peek()
        found = "end of input" if kind == "end" else repr(text)
        return ExpressionError(f"{message}, found {found} at column {col + 1} in {self.src!r}")

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error("unexpected trailing input")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, _ = self.peek()
        if kind == "num":
            self.take()
            return Num(float(text))
        if kind == "name":
            self.take()
            if text in FUNCTIONS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Call(text, arg)
            if text in self.variables:
                return Var(text)
            if text in CONSTANTS:
                return Num(CONSTANTS[text])
            self.pos -= 1
            raise self.error(f"unknown name {text!r}")
        if text == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if text == "[":
            self.take()
            items = [self.expr()]
            while self.peek()[1] == ",":
                self.take()
                items.append(self.expr())
            self.take("]")
            ranks = {item.rank for item in items}
            if len(ranks) != 1:
                raise self.error("vector literal mixes scalars and vectors")
            return Vec(tuple(items))
        raise self.error("expected a number, name, '(' or '['")


def parse(src: str, variables=("x",)) -> Expr:
    """Parse ``src``; names other than ``variables``, constants and the
    built-in functions are rejected."""
    if not isinstance(src, str) or not src.strip():
        raise ExpressionError("empty expression")
    return _Parser(src, variables).parse()
