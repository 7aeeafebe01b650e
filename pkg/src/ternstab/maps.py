"""Candidate maps ``f: G -> X`` and control functions ``phi: G^3 -> [0, inf)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expressions
from .errors import DomainMismatch, ExpressionError
from .target_spaces import TargetSpace, norm
from .ternary_algebra import TernaryStructure


class MapSpec:
    """A map from a ternary structure into a target space.

    Bodies: a lookup table (finite domains), an expression in ``x``, a
    perturbed homomorphism ``hom + perturbation`` (two expressions), or an
    arbitrary Python callable.  Pointwise values are memoised, so repeated
    evaluation along shared cube towers is cheap.
    """

    def __init__(self, domain: TernaryStructure, codomain: TargetSpace, kind: str, *,
                 table=None, source: str | None = None, hom_source: str | None = None,
                 perturbation_source: str | None = None, func: Callable | None = None,
                 name: str | None = None):
        self.domain = domain
        self.codomain = codomain
        self.kind = kind
        self.source = source
        self.hom_source = hom_source
        self.perturbation_source = perturbation_source
        self.name = name or source or kind
        self._cache: dict = {}
        self._expr = None
        self._table = None
        self._func = func
        if kind == "table":
            if not domain.is_finite:
                raise DomainMismatch("lookup tables need a finite domain")
            arr = np.asarray(table)
            arr = codomain.coerce(arr)
            if arr.shape != (domain.size,) + codomain.value_shape:
                raise DomainMismatch(
                    f"table shape {arr.shape} does not match |G|={domain.size} "
                    f"and {codomain.name}")
            arr = np.array(arr)
            arr.setflags(write=False)
            self._table = arr
        elif kind == "expr":
            self._expr = expressions.parse(source, ("x",))
        elif kind == "perturbed":
            hom = expressions.parse(hom_source, ("x",))
            pert = expressions.parse(perturbation_source, ("x",))
            self._expr = expressions.BinOp("+", hom, pert)
            self.source = f"({hom_source}) + ({perturbation_source})"
            self.name = name or self.source
        elif kind == "callable":
            if func is None:
                raise ValueError("callable maps need func")
        else:
            raise ValueError(f"unknown map kind {kind!r}")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def from_expression(cls, G, S, source: str, name=None) -> "MapSpec":
        return cls(G, S, "expr", source=source, name=name)

    @classmethod
    def from_table(cls, G, S, values, name=None) -> "MapSpec":
        return cls(G, S, "table", table=values, name=name or "table")

    @classmethod
    def perturbed(cls, G, S, hom_source: str, perturbation_source: str, name=None
                  ) -> "MapSpec":
        return cls(G, S, "perturbed", hom_source=hom_source,
                   perturbation_source=perturbation_source, name=name)

    @classmethod
    def from_callable(cls, G, S, func: Callable, name="callable") -> "MapSpec":
        return cls(G, S, "callable", func=func, name=name)

    # -- evaluation -----------------------------------------------------------
    @property
    def table(self):
        return self._table

    @property
    def vectorized(self) -> bool:
        if self.kind == "table":
            return True
        return self._expr is not None and self.domain.vectorized

    def _raw(self, x):
        if self.kind == "table":
            return self._table[x]
        if self._expr is not None:
            return self._expr.evaluate({"x": x})
        return self._func(x)

    def __call__(self, x):
        key = _key(x)
        if key is not None:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        self.domain.check(x)
        value = self.codomain.coerce(self._raw(x))
        if key is not None:
            if len(self._cache) > 1_000_000:
                self._cache.clear()
            self._cache[key] = value
        return value

    def values_many(self, xs):
        """Values at an array of points, shape ``xs.shape + value_shape``."""
        xs = np.asarray(xs)
        if self.kind == "table":
            return self._table[xs]
        if self._expr is not None and self.domain.vectorized:
            out = self._expr.evaluate({"x": xs})
            out = np.asarray(self.codomain.coerce(out))
            shape = xs.shape + self.codomain.value_shape
            return np.broadcast_to(out, shape) if out.shape != shape else out
        flat = [self(x) for x in xs.reshape(-1).tolist()]
        return np.asarray(flat).reshape(xs.shape + self.codomain.value_shape)

    def log_norm(self, x) -> float:
        """``log ||f(x)||`` that survives values far beyond the float range."""
        scalar = self.codomain.kind in ("real", "complex")
        if scalar and self._expr is not None:
            v = self._expr.evaluate_log({"x": x})
            return v.log_mag
        n = norm(self.codomain, self(x))
        return math.log(n) if n > 0 else -math.inf

    def describe(self) -> dict:
        out = {"kind": self.kind, "codomain": self.codomain.name}
        if self.source:
            out["source"] = self.source
        if self.kind == "table":
            out["table"] = [self.codomain.serialize(v) for v in self._table]
        return out

    def __repr__(self):
        return f"MapSpec({self.name!r}: {self.domain.name} -> {self.codomain.name})"


def _key(x):
    if isinstance(x, (int, np.integer)):
        return ("i", int(x))
    if isinstance(x, float):
        return ("f", x)
    try:
        hash(x)
    except TypeError:
        return None
    return (type(x).__name__, x)


@dataclass(frozen=True)
class Certificate:
    """Growth bound ``phi(x^(3^n), y^(3^n), z^(3^n)) <= C * lam**n`` for ``n >= N0``."""

    C: float
    lam: float
    N0: int = 0

    def __post_init__(self):
        if self.C < 0:
            raise ValueError("certificate requires C >= 0")
        if not 0 <= self.lam < 3:
            raise ValueError("certificate requires λ<3 (0 <= lambda < 3)")
        if self.N0 < 0:
            raise ValueError("certificate requires N0 >= 0")

    def tail(self, N: int) -> float:
        """Bound on ``(1/3) * sum_{n >= N} 3^-n phi_n`` (valid for ``N >= N0``)."""
        r = self.lam / 3.0
        return (self.C / 3.0) * r**N / (1.0 - r)


class ControlFunction:
    """Nonnegative control on triples (or on pairs, for the ``alpha`` of the
    bounded-or-homomorphism criterion)."""

    def __init__(self, *, epsilon: float | None = None, source: str | None = None,
                 certificate: Certificate | None = None,
                 variables: Sequence[str] = ("x", "y", "z")):
        if (epsilon is None) == (source is None):
            raise ValueError("give exactly one of epsilon or source")
        if epsilon is not None and epsilon < 0:
            raise ValueError("constant control must be nonnegative")
        self.epsilon = None if epsilon is None else float(epsilon)
        self.source = source
        self.certificate = certificate
        self.variables = tuple(variables)
        self._expr = None if source is None else expressions.parse(source, self.variables)

    @classmethod
    def constant(cls, epsilon: float, variables=("x", "y", "z")) -> "ControlFunction":
        return cls(epsilon=epsilon, variables=variables)

    @classmethod
    def expression(cls, source: str, certificate: Certificate | None = None,
                   variables=("x", "y", "z")) -> "ControlFunction":
        return cls(source=source, certificate=certificate, variables=variables)

    @property
    def is_constant(self) -> bool:
        return self.epsilon is not None

    def __call__(self, *args) -> float:
        if self.is_constant:
            return self.epsilon
        env = dict(zip(self.variables, args))
        value = self._expr.evaluate(env)
        if isinstance(value, complex):
            if value.imag != 0:
                raise ExpressionError(f"control {self.source!r} is complex at {args!r}")
            value = value.real
        value = float(value)
        if value < 0:
            raise ExpressionError(f"control {self.source!r} is negative at {args!r}")
        return value

    def values_many(self, *arrays):
        if self.is_constant:
            return np.full(np.broadcast_shapes(*(np.shape(a) for a in arrays)), self.epsilon)
        env = dict(zip(self.variables, arrays))
        out = np.real_if_close(np.asarray(self._expr.evaluate(env)))
        out = np.broadcast_to(out, np.broadcast_shapes(*(np.shape(a) for a in arrays)))
        if out.dtype.kind == "c" or np.any(out < 0):
            raise ExpressionError(f"control {self.source!r} is not a nonnegative real")
        return out.astype(float)

    def describe(self) -> dict:
        out = {"constant": self.epsilon} if self.is_constant else {"expr": self.source}
        if self.certificate:
            c = self.certificate
            out["certificate"] = {"C": c.C, "lambda": c.lam, "N0": c.N0}
        return out

    def __repr__(self):
        body = f"Constant({self.epsilon})" if self.is_constant else repr(self.source)
        return f"ControlFunction({body})"
