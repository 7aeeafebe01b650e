"""Ternary groupoids and semigroups.

Elements are plain Python values, tagged by type:

* ``int`` -- index into a finite carrier ``{0, ..., n-1}``
* ``float`` -- real scalar
* :class:`~ternstab.logdomain.LogScalar` -- positive real in the log domain
* ``complex`` -- complex scalar
* :class:`Poly` -- polynomial over the complex numbers
* :class:`Mat2` -- real 2x2 matrix

A :class:`TernaryStructure` is a carrier plus an operation ``[xyz]`` given as
a full ``n**3`` table, as the ternary operation derived from a binary table
(``[xyz] = (x.y).z``) or as one of a handful of analytic families.
"""

from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, DomainMismatch, Overflow, TooLarge
from .logdomain import LogScalar

DEFAULT_BUDGET = 10**7
BUDGET_ENV = "TERNSTAB_BUDGET"

POLY_ATOL = 1e-12
REAL_RTOL = 1e-9
REAL_ATOL = 1e-9


def default_budget() -> int:
    """Exhaustive-scan budget in evaluated identities (env override)."""
    raw = os.environ.get(BUDGET_ENV)
    return int(float(raw)) if raw else DEFAULT_BUDGET


# --------------------------------------------------------------------------
# polynomial and matrix elements

def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(complex(c) for c in coeffs)


@dataclass(frozen=True)
class Poly:
    """Polynomial in one variable, coefficients lowest degree first."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def monomial(cls, degree: int, coeff=1.0) -> "Poly":
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, t):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0j,) * (n - len(self.coeffs))
        b = other.coeffs + (0j,) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        prod = np.convolve(np.array(self.coeffs), np.array(other.coeffs))
        return Poly(tuple(prod))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Poly(tuple(c / scalar for c in self.coeffs))

    def __pow__(self, k):
        if not float(k).is_integer() or k < 0:
            raise DomainMismatch("polynomials only take non-negative integer powers")
        out = Poly((1,))
        for _ in range(int(k)):
            out = out * self
        return out

    def isclose(self, other, atol=POLY_ATOL) -> bool:
        diff = self - _as_poly(other)
        return all(abs(c) <= atol for c in diff.coeffs)

    def has_parity(self, parity: int, atol=POLY_ATOL) -> bool:
        return all(abs(c) <= atol for k, c in enumerate(self.coeffs) if k % 2 != parity)

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            c = c.real if c.imag == 0 else c
            terms.append(f"{c}*t^{k}" if k else f"{c}")
        return "Poly(" + (" + ".join(terms) or "0") + ")"


def _as_poly(value) -> Poly:
    if isinstance(value, Poly):
        return value
    if isinstance(value, (int, float, complex, np.number)):
        return Poly((value,))
    raise DomainMismatch(f"cannot treat {value!r} as a polynomial")


def is_odd_poly(p: Poly) -> bool:
    return p.has_parity(1)


def is_even_poly(p: Poly) -> bool:
    return p.has_parity(0)


@dataclass(frozen=True)
class Mat2:
    """Row-major real 2x2 matrix used as a carrier element."""

    a: float
    b: float
    c: float
    d: float

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def isclose(self, other: "Mat2", rtol=REAL_RTOL, atol=REAL_ATOL) -> bool:
        return all(math.isclose(p, q, rel_tol=rtol, abs_tol=atol)
                   for p, q in zip(self.as_tuple(), other.as_tuple()))

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)


# --------------------------------------------------------------------------
# analytic families

@dataclass(frozen=True)
class _Family:
    name: str
    element_type: type
    ternary: Callable
    binary: Callable | None
    commutative: bool
    member: Callable = lambda x: True


def _add3(x, y, z):
    out = x + y + z
    if isinstance(out, float) and not math.isfinite(out):
        raise Overflow(f"real sum overflowed: {x!r} + {y!r} + {z!r}")
    return out


def _mul3(x, y, z):
    return x * y * z


FAMILIES = {
    "reals-add": _Family("reals-add", float, _add3, lambda x, y: x + y, True),
    "posreals-mul": _Family("posreals-mul", LogScalar, _mul3, lambda x, y: x * y, True,
                            member=lambda x: x.sign == 1),
    "odd-polys": _Family("odd-polys", Poly, _mul3, lambda x, y: x * y, True,
                         member=is_odd_poly),
    "complex-polys": _Family("complex-polys", Poly, _mul3, lambda x, y: x * y, True),
    "matrix2-mul": _Family("matrix2-mul", Mat2, lambda x, y, z: (x @ y) @ z,
                           lambda x, y: x @ y, False),
}

# aliases accepted by by_name()
FAMILY_ALIASES = {
    "reals-under-addition": "reals-add",
    "positive-reals-under-multiplication": "posreals-mul",
    "odd-polynomials": "odd-polys",
    "complex-polynomials": "complex-polys",
}


# --------------------------------------------------------------------------
# structures

@dataclass(frozen=True, eq=False)
class TernaryStructure:
    """A ternary groupoid ``(G, [ ])``.  Immutable after construction."""

    name: str
    kind: str  # "table" | "derived" | "analytic"
    size: int | None = None
    table: np.ndarray | None = field(default=None, repr=False)
    binary: np.ndarray | None = field(default=None, repr=False)
    family: str | None = None
    claimed_associative: bool = False
    claimed_commutative: bool = False

    def __post_init__(self):
        if self.kind == "table":
            t = np.asarray(self.table, dtype=np.int64)
            n = self.size
            if t.shape != (n, n, n):
                t = t.reshape(n, n, n)
            if t.size and (t.min() < 0 or t.max() >= n):
                raise DomainMismatch("table entries must be indices in [0, n)")
            t.setflags(write=False)
            object.__setattr__(self, "table", t)
        elif self.kind == "derived":
            b = np.asarray(self.binary, dtype=np.int64)
            n = b.shape[0]
            if b.shape != (n, n):
                raise DomainMismatch("binary table must be n x n")
            if b.size and (b.min() < 0 or b.max() >= n):
                raise DomainMismatch("binary table entries must be indices in [0, n)")
            t = b[b[:, :, None], np.arange(n)[None, None, :]]
            b.setflags(write=False)
            t.setflags(write=False)
            object.__setattr__(self, "binary", b)
            object.__setattr__(self, "table", t)
            object.__setattr__(self, "size", n)
        elif self.kind == "analytic":
            if self.family not in FAMILIES:
                raise KeyError(f"unknown analytic family {self.family!r}")
        else:
            raise ValueError(f"unknown structure kind {self.kind!r}")

    # -- basic queries ----------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.kind != "analytic"

    @property
    def vectorized(self) -> bool:
        """True when :meth:`apply_many` works on numpy arrays."""
        return self.is_finite or self.family == "reals-add"

    def elements(self) -> list:
        if not self.is_finite:
            raise DomainMismatch(f"{self.name} has no finite element list")
        return list(range(self.size))

    def check(self, x):
        """Raise DomainMismatch unless ``x`` belongs to the carrier."""
        if self.is_finite:
            if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
                raise DomainMismatch(f"{x!r} is not a finite index of {self.name}")
            if not 0 <= x < self.size:
                raise DomainMismatch(f"index {x} outside carrier of size {self.size}")
            return
        fam = FAMILIES[self.family]
        ok = isinstance(x, fam.element_type)
        if fam.element_type is float:
            ok = isinstance(x, (float, int, np.floating, np.integer)) and not isinstance(x, bool)
        if not ok or not fam.member(x):
            raise DomainMismatch(f"{x!r} is not an element of {self.name}")

    def apply(self, x, y, z):
        """``[xyz]``."""
        for e in (x, y, z):
            self.check(e)
        if self.is_finite:
            return int(self.table[x, y, z])
        return FAMILIES[self.family].ternary(x, y, z)

    def apply_many(self, xs, ys, zs):
        """Broadcasting ``[xyz]`` over arrays (finite tables and reals-add)."""
        if self.is_finite:
            return self.table[xs, ys, zs]
        if self.family == "reals-add":
            return np.asarray(xs, dtype=float) + ys + zs
        raise DomainMismatch(f"{self.name} has no vectorized operation")

    @property
    def has_binary(self) -> bool:
        return self.kind == "derived" or (
            self.kind == "analytic" and FAMILIES[self.family].binary is not None)

    def binary_op(self, x, y):
        """Underlying binary product for derived and analytic structures."""
        if self.kind == "derived":
            return int(self.binary[x, y])
        if self.kind == "analytic" and FAMILIES[self.family].binary is not None:
            return FAMILIES[self.family].binary(x, y)
        raise DomainMismatch(f"{self.name} has no underlying binary product")

    def equal(self, a, b, rtol=REAL_RTOL, atol=REAL_ATOL) -> bool:
        """Element equality: exact on finite carriers, tolerant on floats."""
        if self.is_finite:
            return int(a) == int(b)
        if isinstance(a, Poly):
            return a.isclose(b, atol=POLY_ATOL)
        if isinstance(a, LogScalar):
            return a.isclose(b, rel_tol=rtol, abs_tol=atol)
        if isinstance(a, Mat2):
            return a.isclose(b, rtol, atol)
        return abs(a - b) <= atol + rtol * max(abs(a), abs(b))

    @property
    def is_commutative_family(self) -> bool:
        return self.kind == "analytic" and FAMILIES[self.family].commutative

    def flat_entries(self) -> list[int]:
        return [int(v) for v in self.table.reshape(-1)]


def from_table(n: int, entries: Sequence[int], name: str | None = None,
               **flags) -> TernaryStructure:
    """Finite structure from the ``n**3`` entries in lexicographic (x, y, z) order."""
    entries = np.asarray(entries, dtype=np.int64)
    if entries.size != n**3:
        raise DomainMismatch(f"expected {n**3} entries, got {entries.size}")
    return TernaryStructure(name or f"table{n}", "table", n, entries.reshape(n, n, n),
                            **flags)


def derive_from_binary(table, name: str | None = None, **flags) -> TernaryStructure:
    """Ternary operation ``[xyz] = (x.y).z`` from an ``n x n`` binary table."""
    b = np.asarray(table, dtype=np.int64)
    return TernaryStructure(name or f"derived{b.shape[0]}", "derived", binary=b, **flags)


def analytic(family: str) -> TernaryStructure:
    family = FAMILY_ALIASES.get(family, family)
    fam = FAMILIES[family]
    return TernaryStructure(family, "analytic", family=family, claimed_associative=True,
                            claimed_commutative=fam.commutative)


def cyclic_sum(n: int) -> TernaryStructure:
    """``Z_n`` with ``[xyz] = x + y + z mod n``."""
    r = np.arange(n)
    return derive_from_binary((r[:, None] + r[None, :]) % n, f"Z{n}-sum",
                              claimed_associative=True, claimed_commutative=True)


def cyclic_product(n: int) -> TernaryStructure:
    r = np.arange(n)
    return derive_from_binary((r[:, None] * r[None, :]) % n, f"Z{n}-mul",
                              claimed_associative=True, claimed_commutative=True)


def cyclic_heap(n: int) -> TernaryStructure:
    """``[xyz] = x - y + z mod n``: associative, not derived, not commutative."""
    x, y, z = np.indices((n, n, n))
    return TernaryStructure(f"Z{n}-heap", "table", n, (x - y + z) % n,
                            claimed_associative=True)


def left_projection(n: int) -> TernaryStructure:
    x = np.indices((n, n, n))[0]
    return TernaryStructure(f"left-projection-{n}", "table", n, x,
                            claimed_associative=True)


def chain_max(n: int) -> TernaryStructure:
    r = np.arange(n)
    return derive_from_binary(np.maximum(r[:, None], r[None, :]), f"max-{n}",
                              claimed_associative=True, claimed_commutative=True)


_NAMED = {
    "sum": cyclic_sum,
    "mul": cyclic_product,
    "heap": cyclic_heap,
}


def by_name(name: str) -> TernaryStructure:
    """Resolve ``Z7-sum``, ``Z5-mul``, ``Z4-heap``, ``left-projection-3``,
    ``max-4`` or an analytic family name."""
    key = FAMILY_ALIASES.get(name, name)
    if key in FAMILIES:
        return analytic(key)
    m = re.fullmatch(r"Z(\d+)-(sum|mul|heap)", name)
    if m:
        return _NAMED[m.group(2)](int(m.group(1)))
    m = re.fullmatch(r"left-projection-(\d+)", name)
    if m:
        return left_projection(int(m.group(1)))
    m = re.fullmatch(r"max-(\d+)", name)
    if m:
        return chain_max(int(m.group(1)))
    raise KeyError(f"unknown structure {name!r}")


def random_table(n: int, rng: np.random.Generator) -> TernaryStructure:
    return from_table(n, rng.integers(0, n, size=n**3), name=f"random{n}")


def random_associative_binary(order: int, rng: np.random.Generator,
                              max_tries: int = 10_000) -> np.ndarray:
    """Multiplication table of a random semigroup of the given order.

    Realised as the closure of random transformations under composition, so
    associativity holds by construction; the labels are shuffled afterwards.
    """
    for _ in range(max_tries):
        degree = int(rng.integers(2, 5))
        gens = [tuple(int(v) for v in rng.integers(0, degree, size=degree))
                for _ in range(int(rng.integers(1, 3)))]
        elems = list(dict.fromkeys(gens))
        frontier = list(elems)
        while frontier and len(elems) <= order:
            new = []
            for f in frontier:
                for g in gens:
                    h = tuple(g[f[i]] for i in range(degree))  # f then g
                    if h not in elems and h not in new:
                        new.append(h)
            elems.extend(new)
            frontier = new
        if len(elems) != order:
            continue
        index = {e: i for i, e in enumerate(elems)}
        table = np.empty((order, order), dtype=np.int64)
        for i, f in enumerate(elems):
            for j, g in enumerate(elems):
                table[i, j] = index[tuple(g[f[k]] for k in range(degree))]
        perm = rng.permutation(order)
        inv = np.argsort(perm)
        return perm[table[inv][:, inv]]
    raise RuntimeError(f"no semigroup of order {order} found in {max_tries} tries")


# --------------------------------------------------------------------------
# probe sets

@dataclass(frozen=True)
class ProbeSet:
    """Finite, ordered, duplicate-free window onto a carrier."""

    elements: tuple
    provenance: str  # "exhaustive" | "generator-closure(depth=d)" | "grid" | "user"
    complete: bool = True

    def __post_init__(self):
        if not self.elements:
            raise ValueError("a probe set must be nonempty")

    @property
    def exhaustive(self) -> bool:
        return self.provenance == "exhaustive"

    @property
    def scope(self) -> str:
        return "exhaustive" if self.exhaustive else "on probes"

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    @classmethod
    def from_elements(cls, G: TernaryStructure, elements: Iterable, provenance="user",
                      complete=True) -> "ProbeSet":
        kept: list = []
        for e in elements:
            if G.family == "reals-add":
                e = float(e)
            G.check(e)
            if not any(G.equal(e, k) for k in kept):
                kept.append(e)
        return cls(tuple(kept), provenance, complete)

    @classmethod
    def exhaustive_of(cls, G: TernaryStructure) -> "ProbeSet":
        return cls(tuple(G.elements()), "exhaustive")

    @classmethod
    def grid(cls, G: TernaryStructure, lo: float, hi: float, count: int) -> "ProbeSet":
        return cls.from_elements(G, np.linspace(lo, hi, count).tolist(), "grid")


def probe_set(G: TernaryStructure, generators: Sequence, depth: int,
              budget: int | None = None) -> ProbeSet:
    """Closure of ``generators`` under ``[ ]`` for ``depth`` rounds.

    Each round adds ``[abc]`` for every triple drawn from the current set, in
    lexicographic order of the triple.  Raises BudgetExceeded (carrying the
    partial set) once the set would grow past ``budget`` elements.
    """
    if not generators:
        raise ValueError("generators must be nonempty")
    budget = budget or 10_000
    current = list(ProbeSet.from_elements(G, generators).elements)
    for _ in range(depth):
        added = []
        for a, b, c in itertools.product(current, repeat=3):
            v = G.apply(a, b, c)
            if any(G.equal(v, k) for k in current) or any(G.equal(v, k) for k in added):
                continue
            added.append(v)
            if len(current) + len(added) > budget:
                partial = ProbeSet(tuple(current + added), f"generator-closure(depth={depth})",
                                   complete=False)
                raise BudgetExceeded(f"closure exceeded {budget} elements", partial)
        if not added:
            break
        current += added
    return ProbeSet(tuple(current), f"generator-closure(depth={depth})")


# --------------------------------------------------------------------------
# axiom checks

@dataclass(frozen=True)
class AxiomCheck:
    holds: bool
    witness: tuple | None = None
    values: tuple | None = None
    scope: str = "exhaustive"

    def __bool__(self):
        return self.holds


def _budget_guard(count: int, budget: int | None, what: str):
    budget = default_budget() if budget is None else budget
    if count > budget:
        raise TooLarge(f"{what}: {count} evaluations exceed budget {budget}; "
                       "supply a ProbeSet")


def is_associative(G: TernaryStructure, probes: ProbeSet | None = None,
                   budget: int | None = None) -> AxiomCheck:
    """Check ``[[xyz]uv] = [x[yzu]v] = [xy[zuv]]``.

    Exhaustive on finite carriers without probes; otherwise over all
    quintuples of probe elements.  The witness is the lexicographically first
    failing quintuple, with the three bracketings in ``values``.
    """
    if probes is None and G.is_finite:
        n = G.size
        _budget_guard(n**5, budget, "associativity scan")
        T = G.table
        r = np.arange(n)
        Y = r[:, None, None, None]
        U = r[None, None, :, None]
        V = r[None, None, None, :]
        yzu = T[:, :, :, None]  # indexed (y, z, u)
        zuv = T[None, :, :, :]  # indexed (z, u, v)
        for x in range(n):
            Tx = T[x]
            left = T[Tx[:, :, None, None], U, V]
            mid = Tx[yzu, V]
            right = Tx[Y, zuv]
            bad = (left != mid) | (left != right)
            if bad.any():
                flat = int(np.argmax(bad.reshape(-1)))
                y, z, u, v = np.unravel_index(flat, bad.shape)
                idx = (y, z, u, v)
                return AxiomCheck(False, (x, int(y), int(z), int(u), int(v)),
                                  (int(left[idx]), int(mid[idx]), int(right[idx])))
        return AxiomCheck(True)
    if probes is None:
        raise TooLarge(f"{G.name} is infinite; supply a ProbeSet")
    elems = probes.elements
    _budget_guard(len(elems)**5, budget, "associativity scan")
    ap, eq = G.apply, G.equal
    for x, y, z, u, v in itertools.product(elems, repeat=5):
        a = ap(ap(x, y, z), u, v)
        b = ap(x, ap(y, z, u), v)
        c = ap(x, y, ap(z, u, v))
        if not (eq(a, b) and eq(a, c)):
            return AxiomCheck(False, (x, y, z, u, v), (a, b, c), probes.scope)
    return AxiomCheck(True, scope=probes.scope)


PERMUTATIONS = list(itertools.permutations(range(3)))[1:]


def is_commutative(G: TernaryStructure, probes: ProbeSet | None = None,
                   budget: int | None = None) -> AxiomCheck:
    """Check ``[x1 x2 x3] = [x_s(1) x_s(2) x_s(3)]`` for every permutation s.

    The witness is ``(x, y, z, sigma)`` for the lexicographically first
    failing triple and the first permutation (itertools order) that differs.
    """
    if probes is None and G.is_finite:
        n = G.size
        _budget_guard(6 * n**3, budget, "commutativity scan")
        T = G.table
        for x, y, z in itertools.product(range(n), repeat=3):
            args = (x, y, z)
            base = T[x, y, z]
            for sigma in PERMUTATIONS:
                if T[tuple(args[i] for i in sigma)] != base:
                    return AxiomCheck(False, (x, y, z, sigma))
        return AxiomCheck(True)
    if probes is None:
        raise TooLarge(f"{G.name} is infinite; supply a ProbeSet")
    elems = probes.elements
    _budget_guard(6 * len(elems)**3, budget, "commutativity scan")
    for args in itertools.product(elems, repeat=3):
        base = G.apply(*args)
        for sigma in PERMUTATIONS:
            if not G.equal(G.apply(*(args[i] for i in sigma)), base):
                return AxiomCheck(False, (*args, sigma), scope=probes.scope)
    return AxiomCheck(True, scope=probes.scope)


def cube(G: TernaryStructure, x):
    """``x^3 = [xxx]``."""
    return G.apply(x, x, x)


def cube_tower(G: TernaryStructure, x, n: int):
    """``x^(3^n)``: ``n``-fold iterate of ``x -> [xxx]``."""
    if n < 0:
        raise ValueError("tower height must be non-negative")
    for _ in range(n):
        x = G.apply(x, x, x)
    return x


def cube_tower_many(G: TernaryStructure, xs, n: int):
    for _ in range(n):
        xs = G.apply_many(xs, xs, xs)
    return xs


def tower_cycle(G: TernaryStructure, x) -> tuple[int, int]:
    """``(mu, lam)`` with ``x^(3^(k+lam)) = x^(3^k)`` for all ``k >= mu``.

    Finite carriers only; found within ``|G| + 1`` steps.
    """
    if not G.is_finite:
        raise DomainMismatch("tower cycles are only detected on finite carriers")
    seen = {}
    t = x
    for step in range(G.size + 1):
        if t in seen:
            return seen[t], step - seen[t]
        seen[t] = step
        t = G.apply(t, t, t)
    raise AssertionError("pigeonhole violated")  # unreachable on a valid table


def closure_check(predicate: Callable, G: TernaryStructure, probes: ProbeSet,
                  mode: str = "ternary") -> AxiomCheck:
    """Does ``predicate`` hold on all products of probe elements?

    ``mode="ternary"`` tests ``[xyz]`` over probe triples; ``mode="binary"``
    tests the underlying binary product over probe pairs.
    """
    if mode == "ternary":
        for x, y, z in itertools.product(probes.elements, repeat=3):
            v = G.apply(x, y, z)
            if not predicate(v):
                return AxiomCheck(False, (x, y, z), (v,), probes.scope)
    elif mode == "binary":
        for x, y in itertools.product(probes.elements, repeat=2):
            v = G.binary_op(x, y)
            if not predicate(v):
                return AxiomCheck(False, (x, y), (v,), probes.scope)
    else:
        raise ValueError(f"unknown closure mode {mode!r}")
    return AxiomCheck(True, scope=probes.scope)


def homomorphism_check(f: Callable, G1: TernaryStructure, G2: TernaryStructure,
                       probes: ProbeSet) -> AxiomCheck:
    """``f([xyz]_1) = [f(x) f(y) f(z)]_2`` on probe triples."""
    for x, y, z in itertools.product(probes.elements, repeat=3):
        lhs = f(G1.apply(x, y, z))
        rhs = G2.apply(f(x), f(y), f(z))
        if not G2.equal(lhs, rhs):
            return AxiomCheck(False, (x, y, z), (lhs, rhs), probes.scope)
    return AxiomCheck(True, scope=probes.scope)
