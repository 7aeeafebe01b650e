"""The direct (Hyers) method for approximately additive maps on ternary semigroups.

Given ``f: G -> X`` with ``||f([xyz]) - f(x) - f(y) - f(z)|| <= phi(x, y, z)``
the sequence ``3^-n f(x^(3^n))`` is Cauchy and its limit ``T`` is the unique
map with ``T(x^3) = 3 T(x)`` and ``||f(x) - T(x)|| <= phi~(x, x, x)``, where

    phi~(x, y, z) = 1/3 * sum_{n >= 0} 3^-n phi(x^(3^n), y^(3^n), z^(3^n)).

On commutative ``G`` the limit is additive: ``T([xyz]) = T(x) + T(y) + T(z)``.
Everything below checks these statements on a finite probe set.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import NoConvergenceCertificate, NotConverged, ScalingLawViolated
from .maps import Certificate, ControlFunction, MapSpec
from .target_spaces import algebra_mul3, norm
from .ternary_algebra import (ProbeSet, TernaryStructure, cube, cube_tower,
                              is_commutative, tower_cycle)

DEFAULT_ITER_TOL = 1e-12
DEFAULT_N_MAX = 60
PATIENCE = 3
ROUNDING_ULPS = 16


# --------------------------------------------------------------------------
# defects over probe triples

@dataclass(frozen=True)
class Defect:
    value: float
    argmax: tuple
    scope: str

    def __float__(self):
        return self.value


def defect_array(f: MapSpec, probes: ProbeSet, mode: str = "additive") -> np.ndarray:
    """Norms of the additive or multiplicative defect on every probe triple.

    Entry ``[i, j, k]`` belongs to ``(p_i, p_j, p_k)``, so a C-order argmax is
    the lexicographically first maximiser.
    """
    G, S = f.domain, f.codomain
    elems = probes.elements
    n = len(elems)
    out = np.empty((n, n, n))
    if f.vectorized and G.vectorized:
        X = np.asarray(elems)
        FX = np.asarray(f.values_many(X))
        for i in range(n):
            sums = G.apply_many(X[i], X[:, None], X[None, :])
            FS = np.asarray(f.values_many(sums))
            fy = FX[:, None, ...]
            fz = FX[None, :, ...]
            if mode == "additive":
                D = FS - FX[i] - fy - fz
            else:
                D = FS - algebra_mul3(S, FX[i], fy, fz)
            out[i] = norm(S, D)
        return out
    values = [f(x) for x in elems]
    for (i, x), (j, y), (k, z) in itertools.product(enumerate(elems), repeat=3):
        fs = f(G.apply(x, y, z))
        if mode == "additive":
            d = fs - values[i] - values[j] - values[k]
        else:
            d = fs - algebra_mul3(S, values[i], values[j], values[k])
        out[i, j, k] = norm(S, d)
    return out


def _argmax_triple(arr: np.ndarray, probes: ProbeSet) -> tuple[float, tuple]:
    flat = int(np.argmax(arr.reshape(-1)))
    i, j, k = np.unravel_index(flat, arr.shape)
    e = probes.elements
    return float(arr[i, j, k]), (e[i], e[j], e[k])


def additive_defect(f: MapSpec, probes: ProbeSet) -> Defect:
    """``sup ||f([xyz]) - f(x) - f(y) - f(z)||`` over probe triples."""
    value, arg = _argmax_triple(defect_array(f, probes, "additive"), probes)
    return Defect(value, arg, probes.scope)


def control_array(phi: ControlFunction, G: TernaryStructure, probes: ProbeSet) -> np.ndarray:
    elems = probes.elements
    n = len(elems)
    if phi.is_constant:
        return np.full((n, n, n), phi.epsilon)
    if G.vectorized:
        X = np.asarray(elems)
        return phi.values_many(X[:, None, None], X[None, :, None], X[None, None, :])
    out = np.empty((n, n, n))
    for (i, x), (j, y), (k, z) in itertools.product(enumerate(elems), repeat=3):
        out[i, j, k] = phi(x, y, z)
    return out


# --------------------------------------------------------------------------
# the control series phi~

@dataclass(frozen=True)
class PhiTilde:
    value: float
    error: float
    terms: int
    method: str  # "constant" | "cycle" | "certificate" | "empirical"
    certified: bool = True

    def __float__(self):
        return self.value


def _towers(G, x, y, z, count):
    out = []
    for _ in range(count):
        out.append((x, y, z))
        x, y, z = cube(G, x), cube(G, y), cube(G, z)
    return out


def phi_tilde(phi: ControlFunction, G: TernaryStructure, x, y, z,
              tol: float = DEFAULT_ITER_TOL, max_terms: int = 2000) -> PhiTilde:
    """``1/3 * sum 3^-n phi(x^(3^n), y^(3^n), z^(3^n))`` with an error bound.

    Constant controls give ``eps/2`` exactly.  On finite carriers the towers
    are eventually periodic and the tail is summed in closed form.  Otherwise
    a growth certificate ``C * lam**n`` bounds the tail; without one the
    growth rate is estimated from the first terms and the result is marked
    uncertified.
    """
    if phi.is_constant:
        return PhiTilde(phi.epsilon / 2.0, 0.0, 0, "constant")

    if G.is_finite:
        cycles = [tower_cycle(G, e) for e in (x, y, z)]
        start = max(mu for mu, _ in cycles)
        period = reduce(math.lcm, (lam for _, lam in cycles))
        terms = [phi(*t) for t in _towers(G, x, y, z, start + period)]
        head = math.fsum(3.0**-n * v for n, v in enumerate(terms[:start]))
        loop = math.fsum(3.0**-n * v for n, v in enumerate(terms[start:], start))
        total = (head + loop / (1.0 - 3.0**-period)) / 3.0
        return PhiTilde(total, 0.0, start + period, "cycle")

    cert = phi.certificate
    method, certified = "certificate", True
    t = (x, y, z)
    values: list[float] = []
    if cert is None:
        method, certified = "empirical", False
        window = 16
        for _ in range(window):
            values.append(phi(*t))
            t = tuple(cube(G, e) for e in t)
        lam = _growth_estimate(values)
        if lam >= 3.0:
            raise NoConvergenceCertificate(
                f"phi grows like {lam:.4g}^n >= 3^n along the towers of {(x, y, z)!r}; "
                "supply a growth certificate")
        C = max(v / lam**n if lam > 0 else v for n, v in enumerate(values)) if values else 0.0
        cert = Certificate(C, lam, 0)
    n = len(values)
    while n < cert.N0 or cert.tail(n) >= tol:
        if n >= max_terms:
            raise NoConvergenceCertificate(f"phi~ tail still above {tol} after {n} terms")
        values.append(phi(*t))
        t = tuple(cube(G, e) for e in t)
        n += 1
    total = math.fsum(3.0**-k * v for k, v in enumerate(values)) / 3.0
    return PhiTilde(total, cert.tail(n), n, method, certified)


def _growth_estimate(values: list[float]) -> float:
    """Largest consecutive ratio over the second half of the window."""
    half = values[len(values) // 2:]
    ratios = []
    for a, b in zip(half, half[1:]):
        if a == 0:
            if b != 0:
                return math.inf
            continue
        ratios.append(b / a)
    return max(ratios, default=0.0)


# --------------------------------------------------------------------------
# Hyers iteration

def hyers_term(f: MapSpec, x, n: int):
    """``3^-n f(x^(3^n))``."""
    return f(cube_tower(f.domain, x, n)) / 3.0**n


@dataclass
class HyersLimit:
    value: object
    n_used: int
    n_evaluated: int
    cauchy_residual: float
    residuals: list = field(default_factory=list)
    envelope_ok: bool | None = None
    envelope_first_violation: int | None = None


def hyers_limit(f: MapSpec, x, tol: float = DEFAULT_ITER_TOL, n_max: int = DEFAULT_N_MAX,
                phi: ControlFunction | None = None, patience: int = PATIENCE) -> HyersLimit:
    """Iterate ``3^-n f(x^(3^n))`` to a Cauchy limit.

    Stops once ``patience`` consecutive differences fall below ``tol`` and the
    remaining tail is below ``tol`` as well.  For large iterates ``tol`` is
    raised to ``16`` ulps of the iterate, since successive terms cannot agree
    more closely than their rounding.  Since ``3^n d_n`` equals
    ``||f(y^3) - 3 f(y)||`` at ``y = x^(3^(n-1))``, the running maximum ``B``
    of ``3^n d_n`` gives the tail estimate ``B 3^-n / 2``; with ``phi`` given
    the certified tail ``3^-n phi~(x^(3^n), ...)`` must be small too.  This
    keeps near-stationary stretches (``sin(3t) ~ 3 sin t`` for small ``t``)
    from passing as convergence.

    ``n_used`` is the first index of the final run (1 for a constant
    sequence); ``value`` is the last, most converged term.  With ``phi``
    given, each term is also checked against the telescoped envelope
    ``||3^-n f(x^(3^n)) - f(x)|| <= 1/3 sum_{k<n} 3^-k phi(x^(3^k), ...)``.
    """
    S, G = f.codomain, f.domain
    fx = f(x)
    prev = fx
    tower = x
    run = 0
    residuals = []
    scaled_max = 0.0
    envelope_sum = 0.0
    envelope_ok, first_bad = (True if phi is not None else None), None
    for n in range(1, n_max + 1):
        if phi is not None:
            envelope_sum += phi(tower, tower, tower) / 3.0**(n - 1) / 3.0
        tower = cube(G, tower)
        term = f(tower) / 3.0**n
        d = float(norm(S, term - prev))
        residuals.append(d)
        scaled_max = max(scaled_max, d * 3.0**n)
        if phi is not None and norm(S, term - fx) > envelope_sum + tol * max(1.0, envelope_sum):
            if envelope_ok:
                envelope_ok, first_bad = False, n
        prev = term
        # rounding floor: a few ulps of the iterate itself
        tol_n = max(tol, ROUNDING_ULPS * sys.float_info.epsilon * float(norm(S, term)))
        run = run + 1 if d < tol_n else 0
        if run >= patience and scaled_max / 3.0**n / 2.0 < tol_n:
            if phi is None or _phi_tail(phi, G, tower, n) < tol_n:
                return HyersLimit(term, n - run + 1, n, d, residuals, envelope_ok, first_bad)
    raise NotConverged(n_max, residuals[-1] if residuals else math.nan, x)


def _phi_tail(phi: ControlFunction, G: TernaryStructure, tower, n: int) -> float:
    """``3^-n phi~(t, t, t)`` at ``t = x^(3^n)``: bound on ``||T(x) - 3^-n f(t)||``."""
    if phi.is_constant:
        return phi.epsilon / 2.0 / 3.0**n
    pt = phi_tilde(phi, G, tower, tower, tower)
    return (pt.value + pt.error) / 3.0**n


def hyers_map(f: MapSpec, tol: float = DEFAULT_ITER_TOL, n_max: int = DEFAULT_N_MAX,
              name: str = "T") -> MapSpec:
    """The limit ``T`` as a lazily materialised, memoised map."""
    return MapSpec.from_callable(f.domain, f.codomain,
                                 lambda x: hyers_limit(f, x, tol, n_max).value, name=name)


# --------------------------------------------------------------------------
# full check of the stability statement

@dataclass
class StabilityReport:
    scope: str
    defect: float
    defect_argmax: tuple
    hypothesis_holds: bool
    hypothesis_violations: int
    hypothesis_table: list
    records: list
    commutative: bool
    additivity_max: float | None
    additivity_argmax: tuple | None
    tol: float
    bound_ok: bool = False
    scaling_ok: bool = False
    additivity_ok: bool | None = None
    converged: bool = True

    @property
    def passed(self) -> bool:
        return (self.converged and self.bound_ok and self.scaling_ok
                and self.additivity_ok is not False)

    @property
    def max_distance(self) -> float:
        return max(r["distance"] for r in self.records)

    @property
    def max_scaling_residual(self) -> float:
        return max(r["scaling_residual"] for r in self.records)


def _commutative(G: TernaryStructure, probes: ProbeSet) -> bool:
    if G.is_finite:
        return is_commutative(G).holds
    return G.is_commutative_family


def verify_stability(f: MapSpec, phi: ControlFunction, probes: ProbeSet,
                     tol: float = 1e-9, iter_tol: float = DEFAULT_ITER_TOL,
                     n_max: int = DEFAULT_N_MAX, max_table_rows: int = 20) -> StabilityReport:
    """Check every conclusion of the stability statement on ``probes``.

    (a) ``||f(x) - T(x)|| <= phi~(x, x, x) + error + tol``;
    (b) ``||T(x^3) - 3 T(x)|| <= tol``;
    (c) on commutative ``G``, ``||T([xyz]) - T(x) - T(y) - T(z)|| <= tol``;
    (d) a table of probe triples where the defect exceeds ``phi``.

    A violated hypothesis is reported, not raised; NotConverged and
    NoConvergenceCertificate propagate.
    """
    G, S = f.domain, f.codomain
    elems = probes.elements

    D = defect_array(f, probes, "additive")
    eps_hat, eps_arg = _argmax_triple(D, probes)
    Phi = control_array(phi, G, probes)
    excess = D - Phi
    bad = excess > tol
    table = []
    for i, j, k in zip(*np.nonzero(bad)):
        if len(table) >= max_table_rows:
            break
        table.append({"triple": (elems[i], elems[j], elems[k]), "defect": float(D[i, j, k]),
                      "phi": float(Phi[i, j, k])})

    limits: dict = {}

    def T(x):
        key = x if not isinstance(x, np.ndarray) else None
        if key is not None and key in limits:
            return limits[key].value
        lim = hyers_limit(f, x, iter_tol, n_max, phi)
        if key is not None:
            limits[key] = lim
        return lim.value

    records = []
    for x in elems:
        tx = T(x)
        lim = limits[x]
        pt = phi_tilde(phi, G, x, x, x, iter_tol)
        dist = float(norm(S, f(x) - tx))
        scale = float(norm(S, T(cube(G, x)) - 3.0 * tx))
        records.append({
            "x": x, "T": tx, "n_used": lim.n_used, "cauchy_residual": float(lim.cauchy_residual),
            "distance": dist, "phi_tilde": pt.value, "phi_tilde_error": pt.error,
            "phi_tilde_certified": pt.certified,
            "bound_ok": dist <= pt.value + pt.error + tol,
            "scaling_residual": scale, "scaling_ok": scale <= tol,
            "envelope_ok": lim.envelope_ok,
        })

    commutative = _commutative(G, probes)
    add_max = add_arg = None
    if commutative:
        add_max, add_arg = _additivity(f, probes, T)

    report = StabilityReport(
        scope=probes.scope, defect=eps_hat, defect_argmax=eps_arg,
        hypothesis_holds=not bad.any(), hypothesis_violations=int(bad.sum()),
        hypothesis_table=table, records=records, commutative=commutative,
        additivity_max=add_max, additivity_argmax=add_arg, tol=tol)
    report.bound_ok = all(r["bound_ok"] for r in records)
    report.scaling_ok = all(r["scaling_ok"] for r in records)
    report.additivity_ok = None if add_max is None else add_max <= tol
    return report


def _additivity(f: MapSpec, probes: ProbeSet, T) -> tuple[float, tuple]:
    G, S = f.domain, f.codomain
    elems = probes.elements
    n = len(elems)
    TX = [T(x) for x in elems]
    if G.vectorized:
        X = np.asarray(elems)
        sums = G.apply_many(X[:, None, None], X[None, :, None], X[None, None, :])
        uniq, inverse = np.unique(sums, return_inverse=True)
        tu = np.asarray([T(u.item()) for u in uniq])
        TS = tu[inverse.reshape(sums.shape)]
        TXa = np.asarray(TX)
        resid = norm(S, TS - TXa[:, None, None] - TXa[None, :, None] - TXa[None, None, :])
        resid = np.asarray(resid).reshape(n, n, n)
    else:
        resid = np.empty((n, n, n))
        for (i, x), (j, y), (k, z) in itertools.product(enumerate(elems), repeat=3):
            resid[i, j, k] = norm(S, T(G.apply(x, y, z)) - TX[i] - TX[j] - TX[k])
    return _argmax_triple(resid, probes)


# --------------------------------------------------------------------------
# uniqueness

@dataclass(frozen=True)
class UniquenessTrace:
    rows: list  # (n, max gap, max bound, ok)
    equal: bool
    max_gap: float


def uniqueness_gap(T: MapSpec, T_alt: MapSpec, phi_tilde_vals, probes: ProbeSet,
                   n_max: int = 30, tol: float = 1e-9) -> UniquenessTrace:
    """Trace ``3^-n ||T(x^(3^n)) - T'(x^(3^n))|| <= 2 * 3^-n * phi~(x, x, x)``.

    Both maps must satisfy ``T(x^3) = 3 T(x)`` on the probes, otherwise the
    argument does not apply and ScalingLawViolated is raised.
    """
    G, S = T.domain, T.codomain
    bounds = {x: float(v) for x, v in zip(probes.elements, phi_tilde_vals)} \
        if not isinstance(phi_tilde_vals, dict) else phi_tilde_vals
    for label, M in (("T", T), ("T_alt", T_alt)):
        for x in probes.elements:
            r = norm(S, M(cube(G, x)) - 3.0 * M(x))
            if r > tol:
                raise ScalingLawViolated(
                    f"{label}(x^3) - 3 {label}(x) has norm {r:.3e} at x={x!r}")
    rows = []
    for n in range(n_max + 1):
        gap = bound = 0.0
        ok = True
        for x in probes.elements:
            t = cube_tower(G, x, n)
            g = float(norm(S, T(t) - T_alt(t))) / 3.0**n
            b = 2.0 * float(bounds[x]) / 3.0**n
            gap, bound = max(gap, g), max(bound, b)
            ok &= g <= b + tol
        rows.append((n, gap, bound, ok))
    max_gap = max(float(norm(S, T(x) - T_alt(x))) for x in probes.elements)
    return UniquenessTrace(rows, all(r[3] for r in rows), max_gap)
