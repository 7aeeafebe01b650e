"""Signed log-domain scalars.

A :class:`LogScalar` stores a value as ``sign * exp(log_mag)``.  The sign is
``0`` for exact zero, ``+1``/``-1`` for reals, or any unit complex number
when a complex value is carried through the log domain.  Cube towers on
multiplicative carriers reach ``x ** 3**40`` and beyond, far past the float
range, so everything that iterates towers deep works here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import Overflow


def _unit(z):
    if isinstance(z, complex):
        if z.imag == 0.0:
            z = z.real
        else:
            return z / abs(z)
    if z > 0:
        return 1
    if z < 0:
        return -1
    return 0


@dataclass(frozen=True)
class LogScalar:
    sign: complex | int
    log_mag: float = 0.0

    def __post_init__(self):
        if self.sign == 0:
            object.__setattr__(self, "sign", 0)
            object.__setattr__(self, "log_mag", -math.inf)
        elif isinstance(self.sign, complex) and self.sign.imag == 0.0:
            object.__setattr__(self, "sign", 1 if self.sign.real > 0 else -1)

    @classmethod
    def from_value(cls, value) -> "LogScalar":
        if isinstance(value, LogScalar):
            return value
        if value == 0:
            return cls(0)
        return cls(_unit(value), math.log(abs(value)))

    @classmethod
    def exp(cls, exponent) -> "LogScalar":
        """``e ** exponent`` without ever forming the power."""
        if isinstance(exponent, complex):
            return cls(cmath.exp(1j * exponent.imag), exponent.real)
        return cls(1, float(exponent))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def is_real(self) -> bool:
        return not isinstance(self.sign, complex)

    @property
    def value(self):
        if self.sign == 0:
            return 0.0
        if self.log_mag > 709.78:
            raise Overflow(f"exp({self.log_mag}) exceeds float range")
        return self.sign * math.exp(self.log_mag)

    def __abs__(self) -> "LogScalar":
        return LogScalar(0) if self.sign == 0 else LogScalar(1, self.log_mag)

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log_mag)

    def __mul__(self, other) -> "LogScalar":
        other = LogScalar.from_value(other)
        if self.sign == 0 or other.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * other.sign, self.log_mag + other.log_mag)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogScalar":
        other = LogScalar.from_value(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return self
        return LogScalar(self.sign / other.sign, self.log_mag - other.log_mag)

    def __rtruediv__(self, other) -> "LogScalar":
        return LogScalar.from_value(other) / self

    def __add__(self, other) -> "LogScalar":
        other = LogScalar.from_value(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        top = max(self.log_mag, other.log_mag)
        total = (self.sign * math.exp(self.log_mag - top)
                 + other.sign * math.exp(other.log_mag - top))
        if total == 0:
            return LogScalar(0)
        return LogScalar(_unit(total), top + math.log(abs(total)))

    __radd__ = __add__

    def __sub__(self, other) -> "LogScalar":
        return self + (-LogScalar.from_value(other))

    def __rsub__(self, other) -> "LogScalar":
        return LogScalar.from_value(other) + (-self)

    def __pow__(self, exponent) -> "LogScalar":
        if isinstance(exponent, LogScalar):
            exponent = exponent.value
        if self.sign == 0:
            if exponent == 0:
                return LogScalar(1, 0.0)
            return self
        if self.sign == 1:
            return LogScalar(1, self.log_mag * exponent)
        if float(exponent).is_integer():
            k = int(exponent)
            return LogScalar(self.sign ** k, self.log_mag * k)
        # principal branch for non-integer powers of non-positive values
        phase = cmath.phase(self.sign) * exponent
        return LogScalar(cmath.exp(1j * phase), self.log_mag * exponent)

    def log(self):
        """Natural log as a plain number (complex for negative/complex values)."""
        if self.sign == 0:
            raise ValueError("log of zero")
        if self.sign == 1:
            return self.log_mag
        return complex(self.log_mag, cmath.phase(self.sign))

    def isclose(self, other, rel_tol=1e-9, abs_tol=1e-9) -> bool:
        other = LogScalar.from_value(other)
        if self.sign == 0 or other.sign == 0:
            floor = math.log(abs_tol) if abs_tol > 0 else -math.inf
            return max(self.log_mag, other.log_mag) <= floor
        # compare in log space; relative tolerance maps to an additive band
        return (abs(self.sign - other.sign) <= abs_tol
                and abs(self.log_mag - other.log_mag) <= max(rel_tol, 1e-15))

    def __repr__(self) -> str:
        return f"LogScalar({self.sign!r}, {self.log_mag!r})"
