"""Superstability of multiplicative ternary homomorphisms.

For ``f: G -> A`` into a normed algebra with multiplicative norm and
``||f([xyz]) - f(x) f(y) f(z)|| <= eps`` everywhere, either
``||f(x)|| <= delta(eps) = (1 + sqrt(1 + 4 eps)) / 2`` for all ``x`` or ``f``
is an exact ternary homomorphism.  The operator norm on 2x2 matrices is not
multiplicative and the diagonal map ``x -> diag(e^x, d)`` shows the
dichotomy then fails.  The complex-valued variant: if
``|phi([xyz]) - phi(x) f(y) f(z)| <= alpha(y, z)`` then ``phi`` is bounded or
``f`` is a ternary homomorphism.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (AssociativityFailed, DegenerateInput, DichotomyViolated,
                     NotAnAlgebra, Overflow, PreconditionUnmet)
from .maps import ControlFunction, MapSpec
from .target_spaces import (TargetSpace, algebra_mul3, matrix_units,
                            multiplicativity_witness, norm)
from .ternary_algebra import ProbeSet, TernaryStructure, analytic, cube
from .stability_direct import Defect, _argmax_triple

DEFAULT_TOL = 1e-9


def delta_threshold(eps: float) -> float:
    """Larger root of ``d**2 - d = eps``."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return (1.0 + math.sqrt(1.0 + 4.0 * eps)) / 2.0


def _require_algebra(S: TargetSpace):
    if not S.is_algebra:
        raise NotAnAlgebra(f"{S.name} has no algebra product")


def _multiplicative_arrays(f: MapSpec, probes: ProbeSet):
    """Defect norms and their scales ``max(1, ||f([xyz])||, ||f(x)f(y)f(z)||)``."""
    G, S = f.domain, f.codomain
    elems = probes.elements
    n = len(elems)
    D = np.empty((n, n, n))
    scale = np.empty((n, n, n))
    if f.vectorized and G.vectorized:
        X = np.asarray(elems)
        FX = np.asarray(f.values_many(X))
        for i in range(n):
            FS = np.asarray(f.values_many(G.apply_many(X[i], X[:, None], X[None, :])))
            prod = algebra_mul3(S, FX[i], FX[:, None, ...], FX[None, :, ...])
            D[i] = norm(S, FS - prod)
            scale[i] = np.maximum(1.0, np.maximum(norm(S, FS), norm(S, prod)))
        return D, scale
    values = [f(x) for x in elems]
    for (i, x), (j, y), (k, z) in itertools.product(enumerate(elems), repeat=3):
        fs = f(G.apply(x, y, z))
        prod = algebra_mul3(S, values[i], values[j], values[k])
        D[i, j, k] = norm(S, fs - prod)
        scale[i, j, k] = max(1.0, norm(S, fs), norm(S, prod))
    return D, scale


def multiplicative_defect(f: MapSpec, probes: ProbeSet) -> Defect:
    """``sup ||f([xyz]) - f(x) f(y) f(z)||`` over probe triples."""
    _require_algebra(f.codomain)
    D, _ = _multiplicative_arrays(f, probes)
    value, arg = _argmax_triple(D, probes)
    return Defect(value, arg, probes.scope)


# --------------------------------------------------------------------------
# the dichotomy

@dataclass(frozen=True)
class DichotomyVerdict:
    tag: str  # "BoundedByDelta" | "ExactHom" | "Both" | "Inconclusive"
    max_norm: float
    defect: float
    relative_defect: float
    delta: float
    tol: float
    scope: str
    multiplicative_norm: bool
    max_norm_at: object = None
    defect_at: tuple | None = None

    @property
    def bounded(self) -> bool:
        return self.max_norm <= self.delta + self.tol

    @property
    def exact(self) -> bool:
        return self.relative_defect <= self.tol

    def invariants_hold(self) -> bool:
        if self.tag in ("BoundedByDelta", "Both") and not self.bounded:
            return False
        if self.tag in ("ExactHom", "Both") and not self.exact:
            return False
        if self.tag == "Inconclusive":
            if self.bounded or self.exact:
                return False
            if self.multiplicative_norm and self.scope == "exhaustive":
                return False
        return self.delta >= 1.0 and self.defect >= 0.0

    def to_dict(self) -> dict:
        return {"tag": self.tag, "max_norm": self.max_norm, "defect": self.defect,
                "relative_defect": self.relative_defect, "delta": self.delta,
                "tol": self.tol, "scope": self.scope,
                "multiplicative_norm": self.multiplicative_norm}


def dichotomy_classify(f: MapSpec, probes: ProbeSet, tol: float = DEFAULT_TOL
                       ) -> DichotomyVerdict:
    """Which branch of the dichotomy does ``f`` take on ``probes``?

    ``eps`` is the measured defect.  Norms within ``(delta - tol, delta + tol]``
    count as bounded.  The homomorphism branch compares each triple's defect
    with ``tol`` times ``max(1, ||f([xyz])||, ||f(x) f(y) f(z)||)``, so exact
    homomorphisms with large values are not lost to rounding.
    """
    S = f.codomain
    _require_algebra(S)
    D, scale = _multiplicative_arrays(f, probes)
    eps, eps_at = _argmax_triple(D, probes)
    rel = float(np.max(D / scale))
    delta = delta_threshold(eps)
    norms = [float(norm(S, f(x))) for x in probes.elements]
    i = int(np.argmax(norms))
    bounded = norms[i] <= delta + tol
    exact = rel <= tol
    tag = {(True, True): "Both", (True, False): "BoundedByDelta",
           (False, True): "ExactHom", (False, False): "Inconclusive"}[(bounded, exact)]
    exhaustive = probes.exhaustive and f.domain.is_finite
    scope = "exhaustive" if exhaustive else "on probes"
    if tag == "Inconclusive" and exhaustive and S.multiplicative_norm:
        raise DichotomyViolated(
            f"max norm {norms[i]:.6g} > delta {delta:.6g} and defect {eps:.3e} > tol "
            f"on an exhaustive probe set with multiplicative norm")
    return DichotomyVerdict(tag, norms[i], eps, rel, delta, tol, scope,
                            S.multiplicative_norm, probes.elements[i], eps_at)


# --------------------------------------------------------------------------
# growth induction

@dataclass(frozen=True)
class GrowthTrace:
    u: object
    delta: float
    p: float
    eps: float
    rows: list  # (n, log ||f(u^(3^n))||, lower bound delta + (n+1) p, passed)
    advisory: bool = False

    @property
    def passed(self) -> bool:
        return all(r[3] for r in self.rows)


def growth_witness(f: MapSpec, u, n_max: int = 40, tol: float = DEFAULT_TOL,
                   eps: float | None = None, probes: ProbeSet | None = None,
                   samples: int = 64) -> GrowthTrace:
    """Trace ``||f(u^(3^n))|| >= delta + (n + 1) p`` for ``n = 1..n_max``.

    ``p = ||f(u)|| - delta`` with ``delta = delta_threshold(eps)``; ``eps``
    defaults to the multiplicative defect measured on ``probes`` (or on
    ``{u}``).  Norms are compared in the log domain.  The trace is marked
    advisory when the codomain norm is not known to be multiplicative and a
    sampled pair of values confirms that it is not.
    """
    S, G = f.codomain, f.domain
    _require_algebra(S)
    if eps is None:
        probes = probes or ProbeSet.from_elements(G, [u])
        eps = multiplicative_defect(f, probes).value
    delta = delta_threshold(eps)
    log_fu = f.log_norm(u)
    if log_fu <= math.log(delta):
        raise PreconditionUnmet(f"||f(u)|| = {math.exp(log_fu):.6g} <= delta = {delta:.6g}")
    p = math.exp(log_fu) - delta if log_fu < 700 else math.inf
    advisory = False
    if not S.multiplicative_norm:
        values = [f(x) for x in (probes.elements if probes else [u])][:samples]
        pairs = list(itertools.product(values, repeat=2))
        advisory = not multiplicativity_witness(S, pairs, tol).holds
    rows = []
    t = u
    for n in range(1, n_max + 1):
        t = cube(G, t)
        actual = f.log_norm(t)
        lower = delta + (n + 1) * p
        floor = lower - tol
        ok = floor <= 0 or actual >= math.log(floor)
        rows.append((n, actual, lower, bool(ok)))
    return GrowthTrace(u, delta, p, eps, rows, advisory)


# --------------------------------------------------------------------------
# the diagonal-matrix counterexample

@dataclass
class BakerReport:
    eps: float
    delta: float
    f: MapSpec
    defect_norms: list
    defect_spread: float
    defect_ok: bool
    growth: list  # (x, ||f(x)||, e^x)
    unbounded_ok: bool
    hom_witness: tuple
    hom_defect: float
    multiplicativity_gap: float
    threshold: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (self.defect_ok and self.unbounded_ok and self.hom_defect > 0
                and self.multiplicativity_gap > 0)


def baker_delta(eps: float, iterations: int = 200) -> float:
    """Root ``d > 1`` of ``d**3 - d = eps`` by bisection on ``[1, 1 + sqrt(1 + eps)]``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    lo, hi = 1.0, 1.0 + math.sqrt(1.0 + eps)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if mid**3 - mid < eps:
            lo = mid
        else:
            hi = mid
    return lo if abs(lo**3 - lo - eps) <= abs(hi**3 - hi - eps) else hi


def baker_map(eps: float) -> tuple[MapSpec, float]:
    delta = baker_delta(eps)
    f = MapSpec.from_expression(analytic("reals-add"), TargetSpace("matrix2"),
                                f"[[exp(x), 0], [0, {delta!r}]]", name="baker")
    return f, delta


def baker_example(eps: float, n_triples: int = 100, seed: int = 0, tol: float = 1e-10,
                  spread: float = 5.0, growth_points=range(0, 11)) -> BakerReport:
    """Build ``f(x) = diag(e^x, d)`` with ``|d - d^3| = eps`` and check that it
    has constant defect ``eps``, is unbounded and is not a homomorphism."""
    f, delta = baker_map(eps)
    S = f.codomain
    rng = np.random.default_rng(seed)
    triples = rng.uniform(-spread, spread, size=(n_triples, 3))
    x, y, z = triples.T
    lhs = f.values_many(x + y + z)
    rhs = algebra_mul3(S, f.values_many(x), f.values_many(y), f.values_many(z))
    norms = np.asarray(norm(S, lhs - rhs), dtype=float)
    growth = [(float(k), float(norm(S, f(float(k)))), math.exp(k)) for k in growth_points]
    unbounded = all(n >= e * (1 - 1e-12) for _, n, e in growth) and \
        growth[-1][1] > delta_threshold(eps)
    zero = 0.0
    hom_defect = float(norm(S, f(zero) - algebra_mul3(S, f(zero), f(zero), f(zero))))
    e11, e22 = matrix_units()
    mw = multiplicativity_witness(S, [(e11, e22)])
    return BakerReport(
        eps=eps, delta=delta, f=f, defect_norms=norms.tolist(),
        defect_spread=float(norms.max() - norms.min()),
        defect_ok=bool(np.all(np.abs(norms - eps) <= tol)),
        growth=growth, unbounded_ok=unbounded, hom_witness=(zero, zero, zero),
        hom_defect=hom_defect, multiplicativity_gap=mw.gap,
        threshold=delta_threshold(eps),
        extra={"triples": triples.tolist()})


# --------------------------------------------------------------------------
# the rearrangement identity and the bounded-or-homomorphism criterion

def lemma_identity_residual(G: TernaryStructure, phi, f, quintuple, check=True) -> float:
    """``|LHS - RHS|`` of the rearrangement identity at ``(x, y, z, w, u)``::

        phi([[xyz]wu]) - phi([xyz]) f(w) f(u)
          = (phi([x[yzw]u]) - phi(x) f([yzw]) f(u))
          - (phi([xyz]) - phi(x) f(y) f(z)) f(w) f(u)
          + phi(x) (f([yzw]) - f(y) f(z) f(w)) f(u)

    It holds for arbitrary ``phi`` and ``f`` as soon as
    ``[[xyz]wu] = [x[yzw]u]``, which is checked first.
    """
    x, y, z, w, u = quintuple
    xyz = G.apply(x, y, z)
    yzw = G.apply(y, z, w)
    left_arg = G.apply(xyz, w, u)
    mid_arg = G.apply(x, yzw, u)
    if check and not G.equal(left_arg, mid_arg):
        raise AssociativityFailed(f"[[xyz]wu] != [x[yzw]u] at {quintuple!r}")
    lhs = phi(left_arg) - phi(xyz) * f(w) * f(u)
    rhs = ((phi(mid_arg) - phi(x) * f(yzw) * f(u))
           - (phi(xyz) - phi(x) * f(y) * f(z)) * f(w) * f(u)
           + phi(x) * (f(yzw) - f(y) * f(z) * f(w)) * f(u))
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class BoundedOrHomVerdict:
    bounded: bool
    hom: bool
    M: float
    hom_defect: float
    hypothesis_ok: bool
    scope: str
    witness: tuple | None = None
    names: tuple = ("PhiBounded", "FIsTernaryHom")

    @property
    def tag(self) -> str:
        if not self.hypothesis_ok:
            return "HypothesisViolated"
        if self.bounded and self.hom:
            return "Both"
        if self.bounded:
            return self.names[0]
        if self.hom:
            return self.names[1]
        return "Inconclusive"

    def invariants_hold(self) -> bool:
        if self.tag == "Inconclusive" and self.scope == "exhaustive":
            return False
        return self.M >= 0 and self.hom_defect >= 0

    def to_dict(self) -> dict:
        return {"tag": self.tag, "bounded": self.bounded, "hom": self.hom, "M": self.M,
                "hom_defect": self.hom_defect, "hypothesis_ok": self.hypothesis_ok,
                "scope": self.scope,
                "witness": None if self.witness is None else list(self.witness)}


def _phi_bounded(phi: MapSpec, probes: ProbeSet, M: float, tower_depth: int, tol: float
                 ) -> bool:
    """Bounded on probes, and the cube towers of the probes stay within ``M``."""
    if probes.exhaustive and phi.domain.is_finite:
        return True
    limit = math.log(M * (1 + 1e-9) + tol)
    for x in probes.elements:
        t = x
        for _ in range(tower_depth):
            t = cube(phi.domain, t)
            try:
                if phi.log_norm(t) > limit:
                    return False
            except Overflow:
                return False
    return True


def pair_dichotomy_classify(phi: MapSpec, f: MapSpec, alpha: ControlFunction,
                            probes: ProbeSet, tol: float = DEFAULT_TOL,
                            tower_depth: int = 4, names=("PhiBounded", "FIsTernaryHom")
                            ) -> BoundedOrHomVerdict:
    """Either ``phi`` is bounded or ``f`` is a ternary homomorphism.

    First checks ``|phi([xyz]) - phi(x) f(y) f(z)| <= alpha(y, z)`` on every
    probe triple (the lexicographically first violation is returned).  On an
    exhaustive finite probe set ``phi`` is bounded by its maximum.  On other
    probe sets ``phi`` counts as bounded when the cube towers of the probes
    (depth ``tower_depth``) stay below the probe maximum; if that fails and
    ``f`` is not a homomorphism either, the verdict is Inconclusive.
    """
    G = f.domain
    elems = probes.elements
    phis = [phi(x) for x in elems]
    fs = [f(x) for x in elems]
    if max(abs(v) for v in phis) == 0:
        raise DegenerateInput("phi vanishes on every probe")
    if max(abs(v) for v in fs) == 0:
        raise DegenerateInput("f vanishes on every probe")

    witness = None
    for (i, x), (j, y), (k, z) in itertools.product(enumerate(elems), repeat=3):
        lhs = phi(G.apply(x, y, z))
        rhs = phis[i] * fs[j] * fs[k]
        slack = tol * max(1.0, abs(lhs), abs(rhs))
        if abs(lhs - rhs) > alpha(y, z) + slack:
            witness = (x, y, z)
            break

    D, scale = _multiplicative_arrays(f, probes)
    hom_defect = float(D.max())
    hom = float(np.max(D / scale)) <= tol
    M = max(abs(v) for v in phis)
    bounded = _phi_bounded(phi, probes, M, tower_depth, tol)
    exhaustive = probes.exhaustive and G.is_finite
    return BoundedOrHomVerdict(bounded, hom, float(M), hom_defect, witness is None,
                               "exhaustive" if exhaustive else "on probes", witness, names)


def bounded_or_hom_classify(f: MapSpec, probes: ProbeSet, tol: float = DEFAULT_TOL,
                       tower_depth: int = 4) -> BoundedOrHomVerdict:
    """``f`` bounded or a ternary homomorphism, with ``phi = f`` and
    ``alpha`` the measured defect (so the hypothesis holds by construction)."""
    if f.codomain.kind not in ("complex", "real"):
        raise NotAnAlgebra("the bounded-or-homomorphism criterion is for scalar maps")
    eps = multiplicative_defect(f, probes).value
    alpha = ControlFunction.constant(eps, variables=("y", "z"))
    return pair_dichotomy_classify(f, f, alpha, probes, tol, tower_depth,
                                   names=("Bounded", "TernaryHom"))
