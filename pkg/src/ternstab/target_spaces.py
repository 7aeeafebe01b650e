"""Normed spaces and normed algebras where maps take their values.

Values are plain numbers or numpy arrays:

=================  ===============================  ==================
space              value                            norm
=================  ===============================  ==================
``vector(d)``      float array, shape ``(..., d)``  Euclidean
``complex``        complex                          modulus
``real``           float                            absolute value
``matrix2``        float array, shape ``(..., 2, 2)``  operator (spectral)
=================  ===============================  ==================

Every operation broadcasts over leading axes, so a whole grid of values can
be normed or multiplied in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainMismatch, NotAnAlgebra

KINDS = ("vector", "complex", "real", "matrix2")
NORM_KIND = {"vector": "euclidean", "complex": "modulus", "real": "absolute",
             "matrix2": "operator"}


@dataclass(frozen=True)
class TargetSpace:
    kind: str
    dim: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown target space kind {self.kind!r}")
        if self.kind == "vector" and self.dim < 1:
            raise ValueError("vector spaces need dim >= 1")
        if self.kind != "vector":
            object.__setattr__(self, "dim", {"matrix2": 4, "complex": 2}.get(self.kind, 1))

    @property
    def norm_kind(self) -> str:
        return NORM_KIND[self.kind]

    @property
    def is_algebra(self) -> bool:
        return self.kind != "vector"

    @property
    def multiplicative_norm(self) -> bool:
        """Known multiplicative by construction (fields only)."""
        return self.kind in ("complex", "real")

    @property
    def value_shape(self) -> tuple:
        return {"vector": (self.dim,), "matrix2": (2, 2)}.get(self.kind, ())

    @property
    def name(self) -> str:
        return f"vector({self.dim})" if self.kind == "vector" else self.kind

    def zero(self):
        if self.kind == "complex":
            return 0j
        if self.kind == "real":
            return 0.0
        return np.zeros(self.value_shape)

    def one(self):
        if self.kind == "complex":
            return 1 + 0j
        if self.kind == "real":
            return 1.0
        if self.kind == "matrix2":
            return np.eye(2)
        raise NotAnAlgebra(f"{self.name} has no unit")

    def coerce(self, v):
        """Convert ``v`` to this space's value type, raising DomainMismatch."""
        if self.kind == "complex":
            arr = np.asarray(v)
            if arr.dtype.kind not in "biufc":
                raise DomainMismatch(f"{v!r} is not complex")
            return complex(v) if arr.ndim == 0 else arr.astype(complex)
        if self.kind == "real":
            arr = np.asarray(v)
            if arr.dtype.kind == "c":
                if np.any(np.imag(arr) != 0):
                    raise DomainMismatch(f"{v!r} is not real")
                arr = arr.real
            if arr.dtype.kind not in "biuf":
                raise DomainMismatch(f"{v!r} is not real")
            return float(arr) if arr.ndim == 0 else arr.astype(float)
        arr = np.asarray(v, dtype=float)
        if arr.shape[arr.ndim - len(self.value_shape):] != self.value_shape:
            raise DomainMismatch(f"value of shape {arr.shape} does not fit {self.name}")
        return arr

    def serialize(self, v) -> list[float]:
        """Flat float list used in reports (complex as [re, im])."""
        if self.kind == "complex":
            v = complex(v)
            return [v.real, v.imag]
        if self.kind == "real":
            return [float(v)]
        return [float(c) for c in np.asarray(v, dtype=float).reshape(-1)]


def by_name(name: str, dim: int = 1) -> TargetSpace:
    aliases = {"banach": "vector", "field-complex": "complex", "C": "complex",
               "R": "real", "M2": "matrix2"}
    return TargetSpace(aliases.get(name, name), dim)


def operator_norm_2x2(m) -> np.ndarray | float:
    """Largest singular value of 2x2 matrices, in closed form.

    With ``p = |(a+d, c-b)|`` and ``q = |(a-d, b+c)|`` the singular values are
    ``(p + q)/2`` and ``|p - q|/2``; here ``p**2 + q**2 = 2*||m||_F**2`` and
    ``|p**2 - q**2| = 4*|det m|``.  Summing two hypots avoids the
    cancellation in ``sqrt(F**4 - 4 det**2)`` when the singular values are
    close.
    """
    m = np.asarray(m, dtype=float)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    out = 0.5 * (np.hypot(a + d, c - b) + np.hypot(a - d, b + c))
    return float(out) if out.ndim == 0 else out


def norm(S: TargetSpace, v):
    """Norm of ``v`` (broadcast over leading axes)."""
    if S.kind in ("complex", "real"):
        out = np.abs(v)
        return float(out) if np.ndim(out) == 0 else out
    arr = np.asarray(v, dtype=float)
    if S.kind == "vector":
        if arr.shape[-1:] != (S.dim,):
            raise DomainMismatch(f"expected trailing dimension {S.dim}, got {arr.shape}")
        out = np.sqrt(np.sum(arr * arr, axis=-1))
        return float(out) if out.ndim == 0 else out
    if arr.shape[-2:] != (2, 2):
        raise DomainMismatch(f"expected 2x2 matrices, got shape {arr.shape}")
    return operator_norm_2x2(arr)


def algebra_mul(S: TargetSpace, a, b):
    if not S.is_algebra:
        raise NotAnAlgebra(f"{S.name} has no algebra product")
    if S.kind == "matrix2":
        return np.matmul(a, b)
    return a * b


def algebra_mul3(S: TargetSpace, a, b, c):
    """``a b c``; bracketing is irrelevant in an associative algebra."""
    return algebra_mul(S, algebra_mul(S, a, b), c)


def lin_comb(S: TargetSpace, terms: Iterable[tuple[float, object]]):
    """``sum(coef * value)`` over ``terms``."""
    acc = None
    for coef, value in terms:
        value = S.coerce(value)
        acc = coef * value if acc is None else acc + coef * value
    if acc is None:
        return S.zero()
    return acc


@dataclass(frozen=True)
class MultiplicativityCheck:
    holds: bool
    witness: tuple | None = None
    gap: float = 0.0
    scope: str = "on samples"

    def __bool__(self):
        return self.holds


def multiplicativity_witness(S: TargetSpace, pairs: Sequence[tuple], tol: float = 1e-9
                             ) -> MultiplicativityCheck:
    """First pair with ``| ||ab|| - ||a|| ||b|| | > tol``."""
    if not S.is_algebra:
        raise NotAnAlgebra(f"{S.name} has no algebra product")
    for a, b in pairs:
        gap = abs(norm(S, algebra_mul(S, a, b)) - norm(S, a) * norm(S, b))
        if gap > tol:
            return MultiplicativityCheck(False, (a, b), float(gap))
    return MultiplicativityCheck(True)


def matrix_units() -> tuple[np.ndarray, np.ndarray]:
    """``E11`` and ``E22``: orthogonal idempotents, ``E11 E22 = 0``."""
    return np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [0.0, 1.0]])
