from __future__ import annotations

import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ternstab.errors import (AssociativityFailed, DegenerateInput, DichotomyViolated,
                             NotAnAlgebra, PreconditionUnmet)
from ternstab.maps import ControlFunction, MapSpec
from ternstab.superstability import (baker_delta, baker_example, baker_map,
                                     bounded_or_hom_classify, delta_threshold,
                                     dichotomy_classify, growth_witness,
                                     lemma_identity_residual, multiplicative_defect,
                                     pair_dichotomy_classify)
from ternstab.target_spaces import TargetSpace
from ternstab.ternary_algebra import (ProbeSet, analytic, cyclic_product, cyclic_sum,
                                      derive_from_binary, left_projection, random_table)

R = analytic("reals-add")
C, REAL, M2 = TargetSpace("complex"), TargetSpace("real"), TargetSpace("matrix2")


def character(n, k=1):
    return MapSpec.from_table(cyclic_sum(n), C, [cmath.exp(2j * math.pi * k * x / n)
                                                 for x in range(n)])


# -- threshold -------------------------------------------------------------------

def test_delta_threshold_examples():
    assert delta_threshold(0) == 1
    assert delta_threshold(2) == 2
    assert delta_threshold(6) == 3
    with pytest.raises(ValueError):
        delta_threshold(-1)


@given(st.floats(0, 1e6))
def test_delta_threshold_root(eps):
    d = delta_threshold(eps)
    assert d >= 1
    assert abs(d * d - d - eps) <= 1e-9 * max(1.0, eps)
    assert delta_threshold(eps + 1.0) > d


# -- defect and dichotomy --------------------------------------------------------

def test_multiplicative_defect_examples():
    probes = ProbeSet.from_elements(R, [0, 1, -1, 2.5])
    assert multiplicative_defect(MapSpec.from_expression(R, C, "exp(x)"), probes).value \
        <= 1e-12 * math.exp(7.5)
    c = 0.7 + 0.2j
    d = multiplicative_defect(MapSpec.from_expression(R, C, "0.7 + 0.2 * i"), probes)
    assert d.value == pytest.approx(abs(c - c**3), rel=1e-12)
    f, delta = baker_map(6.0)
    assert multiplicative_defect(f, probes).value == pytest.approx(6.0, abs=1e-10)
    with pytest.raises(NotAnAlgebra):
        multiplicative_defect(MapSpec.from_expression(R, TargetSpace("vector", 2), "[x, 1]"),
                              probes)


def test_characters_are_exact():
    # values in {0, 1, -1, i, -i} multiply without rounding: defect exactly 0
    for n in (1, 2, 4):
        for k in range(n):
            f = character(n, k) if n > 1 else MapSpec.from_table(cyclic_sum(1), C, [1.0])
            vals = [f(x) for x in range(n)]
            f = MapSpec.from_table(f.domain, C, [complex(round(v.real), round(v.imag))
                                                 for v in vals])
            assert multiplicative_defect(f, ProbeSet.exhaustive_of(f.domain)).value == 0
    for n in range(2, 8):
        G = cyclic_sum(n)
        f = MapSpec.from_table(G, C, [1.0] * n)
        assert multiplicative_defect(f, ProbeSet.exhaustive_of(G)).value == 0
    G = cyclic_product(5)
    f = MapSpec.from_table(G, C, [0, 1, 1, 1, 1])
    assert multiplicative_defect(f, ProbeSet.exhaustive_of(G)).value == 0
    # other roots of unity are rounded values; only rounding noise survives
    for n in range(2, 8):
        for k in range(n):
            f = character(n, k)
            assert multiplicative_defect(f, ProbeSet.exhaustive_of(f.domain)).value <= 1e-13


def test_dichotomy_examples():
    probes = ProbeSet.from_elements(R, [0, 1, -1, 5, -5])
    v = dichotomy_classify(MapSpec.from_expression(R, C, "exp(x)"), probes)
    assert v.tag == "ExactHom" and v.max_norm > v.delta and v.scope == "on probes"
    assert v.invariants_hold()
    v = dichotomy_classify(MapSpec.from_expression(R, C, "1"), probes)
    assert v.tag == "Both" and v.delta == 1
    f, _ = baker_map(6.0)
    v = dichotomy_classify(f, ProbeSet.from_elements(R, [0, 1, 2]))
    assert v.tag == "Inconclusive" and v.defect == pytest.approx(6.0)
    assert v.max_norm == pytest.approx(math.exp(2)) and not v.multiplicative_norm
    assert v.invariants_hold()


def test_dichotomy_bounded_branch():
    G = cyclic_sum(5)
    f = MapSpec.from_table(G, C, [0.5, 0.4j, -0.3, 0.2, 0.1])
    v = dichotomy_classify(f, ProbeSet.exhaustive_of(G))
    assert v.tag == "BoundedByDelta" and v.scope == "exhaustive" and v.invariants_hold()


def test_dichotomy_band_at_threshold():
    # constant c with |c| = delta(|c - c^3|) exactly: c - c^2 = ... choose c = 2 => eps 6, delta 3
    f = MapSpec.from_expression(R, C, "2")
    v = dichotomy_classify(f, ProbeSet.from_elements(R, [0.0]))
    assert v.delta == pytest.approx(3.0) and v.tag == "BoundedByDelta"


def test_violation_is_raised_not_hidden(monkeypatch):
    import ternstab.superstability as sup
    monkeypatch.setattr(sup, "delta_threshold", lambda eps: 0.5)
    G = cyclic_sum(3)
    f = MapSpec.from_table(G, C, [2.0, 1.0, 1.0])
    with pytest.raises(DichotomyViolated):
        sup.dichotomy_classify(f, ProbeSet.exhaustive_of(G))


def random_map(rng, G):
    kind = rng.integers(0, 4)
    n = G.size
    if kind == 0:
        vals = rng.normal(size=n) + 1j * rng.normal(size=n)
        vals *= rng.choice([0.1, 1.0, 10.0])
    elif kind == 1:
        vals = np.full(n, complex(*rng.normal(size=2)))
    elif kind == 2:
        vals = np.exp(2j * math.pi * rng.random(n))
    else:
        vals = np.where(rng.random(n) < 0.5, 0.0, 1.0) + 0j
    return MapSpec.from_table(G, C, vals)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_no_inconclusive_on_exhaustive_finite(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    G = derive_from_binary(np.arange(n)[:, None].repeat(n, 1)) if seed % 3 == 0 \
        else cyclic_sum(n)
    f = random_map(rng, G)
    probes = ProbeSet.exhaustive_of(G)
    if max(abs(f(x)) for x in range(n)) == 0:
        return
    v = dichotomy_classify(f, probes)
    assert v.tag != "Inconclusive" and v.invariants_hold()
    w = bounded_or_hom_classify(f, probes)
    assert w.tag != "Inconclusive" and w.invariants_hold()


# -- growth ----------------------------------------------------------------------

def test_growth_exp():
    f = MapSpec.from_expression(R, C, "exp(x)")
    trace = growth_witness(f, 1.0, n_max=40, eps=0.0)
    assert trace.delta == 1 and trace.p == pytest.approx(math.e - 1)
    assert trace.passed and len(trace.rows) == 40
    n, log_norm, lower, ok = trace.rows[-1]
    assert log_norm == pytest.approx(3.0**40, rel=1e-14)


def test_growth_two_to_the_x():
    f = MapSpec.from_expression(R, REAL, "2^x")
    trace = growth_witness(f, 1.0, n_max=40, probes=ProbeSet.from_elements(R, [1.0]))
    assert trace.eps == 0 and trace.delta == 1 and trace.p == 1
    for n, log_norm, lower, ok in trace.rows:
        assert ok and lower == 1 + (n + 1)
        assert log_norm == pytest.approx(3.0**n * math.log(2), rel=1e-14)


def test_growth_precondition():
    with pytest.raises(PreconditionUnmet):
        growth_witness(MapSpec.from_expression(R, C, "1"), 0.0, eps=0.0)


def test_growth_advisory_for_matrices():
    f, _ = baker_map(6.0)
    probes = ProbeSet.from_elements(R, [0.0, 3.0])
    trace = growth_witness(f, 3.0, n_max=3, probes=probes)
    assert trace.advisory


# -- the matrix counterexample ---------------------------------------------------

def test_baker_six():
    rep = baker_example(6.0)
    assert rep.delta == 2.0 and rep.passed
    assert all(abs(v - 6.0) <= 1e-10 for v in rep.defect_norms)
    assert rep.defect_spread < 1e-10 and rep.hom_defect == pytest.approx(6.0)
    assert rep.multiplicativity_gap == 1.0
    f = rep.f
    d = f(0.3 + 0.1 - 2.0) - f(0.3) @ f(0.1) @ f(-2.0)
    assert np.allclose(d, np.diag([0.0, 2.0 - 8.0]), atol=1e-12)


def test_baker_small_epsilon():
    d = baker_delta(0.1)
    # independent bisection on the cubic
    lo, hi = 1.0, 2.0
    for _ in range(100):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if mid**3 - mid < 0.1 else (lo, mid)
    assert abs(d - lo) <= 1e-12
    assert d == pytest.approx(1.046680, abs=1e-6)
    assert baker_example(0.1).passed


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_baker_defect_is_constant(eps):
    rep = baker_example(eps, n_triples=100, seed=1)
    assert rep.delta > 1 and abs(rep.delta**3 - rep.delta - eps) <= 1e-9 * max(1, eps)
    assert rep.defect_spread < 1e-10 * max(1.0, eps)


# -- rearrangement identity ------------------------------------------------------

def test_lemma_identity_all_quintuples_z7():
    G = cyclic_sum(7)
    rng = np.random.default_rng(2)
    phi = MapSpec.from_table(G, C, rng.normal(size=7) + 1j * rng.normal(size=7))
    f = MapSpec.from_table(G, C, rng.normal(size=7) + 1j * rng.normal(size=7))
    worst = max(lemma_identity_residual(G, phi, f, q)
                for q in itertools.product(range(7), repeat=5))
    assert worst <= 1e-12


def test_lemma_identity_degenerate_cases():
    G = left_projection(3)
    phi = MapSpec.from_table(G, C, [1.0, 2j, -3.0])
    zero = MapSpec.from_table(G, C, [0.0] * 3)
    for q in itertools.product(range(3), repeat=5):
        assert lemma_identity_residual(G, phi, zero, q) == 0
        assert lemma_identity_residual(G, zero, phi, q) == 0


def test_lemma_identity_needs_associativity():
    G = derive_from_binary([[(x - y) % 3 for y in range(3)] for x in range(3)])
    phi = MapSpec.from_table(G, C, [1.0, 2.0, 3.0])
    bad = next(q for q in itertools.product(range(3), repeat=5)
               if G.apply(G.apply(*q[:3]), *q[3:]) != G.apply(q[0], G.apply(*q[1:4]), q[4]))
    with pytest.raises(AssociativityFailed):
        lemma_identity_residual(G, phi, phi, bad)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lemma_identity_on_partial_associativity(seed):
    # any table: the identity holds wherever [[xyz]wu] = [x[yzw]u]
    rng = np.random.default_rng(seed)
    G = random_table(3, rng)
    phi = MapSpec.from_table(G, C, rng.normal(size=3) + 1j * rng.normal(size=3))
    f = MapSpec.from_table(G, C, rng.normal(size=3) + 1j * rng.normal(size=3))
    for q in itertools.product(range(3), repeat=5):
        x, y, z, w, u = q
        if G.apply(G.apply(x, y, z), w, u) == G.apply(x, G.apply(y, z, w), u):
            assert lemma_identity_residual(G, phi, f, q) <= 1e-12


# -- bounded-or-homomorphism -----------------------------------------------------

def test_pair_examples():
    chi = character(3)
    probes = ProbeSet.exhaustive_of(chi.domain)
    v = pair_dichotomy_classify(chi, chi, ControlFunction.constant(0, ("y", "z")), probes)
    assert v.tag == "Both" and v.bounded and v.hom and v.M == pytest.approx(1.0)
    G = cyclic_sum(4)
    one = MapSpec.from_table(G, C, [1.0] * 4)
    v = pair_dichotomy_classify(one, one, ControlFunction.constant(2, ("y", "z")),
                                ProbeSet.exhaustive_of(G))
    assert v.bounded and v.M == 1.0
    phi = MapSpec.from_expression(R, C, "x")
    f = MapSpec.from_expression(R, C, "1")
    v = pair_dichotomy_classify(phi, f, ControlFunction.constant(0, ("y", "z")),
                                ProbeSet.from_elements(R, [0.0, 1.0, 2.0]))
    assert v.tag == "HypothesisViolated"
    assert v.witness == (0.0, 0.0, 1.0)


def test_pair_degenerate():
    G = cyclic_sum(3)
    zero = MapSpec.from_table(G, C, [0.0] * 3)
    one = MapSpec.from_table(G, C, [1.0] * 3)
    alpha = ControlFunction.constant(1, ("y", "z"))
    with pytest.raises(DegenerateInput):
        pair_dichotomy_classify(zero, one, alpha, ProbeSet.exhaustive_of(G))
    with pytest.raises(DegenerateInput):
        bounded_or_hom_classify(zero, ProbeSet.exhaustive_of(G))


def test_pair_inconclusive_only_off_exhaustive():
    # phi grows along towers, f is no homomorphism, alpha large enough
    phi = MapSpec.from_expression(R, C, "exp(x)")
    f = MapSpec.from_expression(R, C, "1 + 0.5 * sin(x)")
    probes = ProbeSet.from_elements(R, [0.0, 0.5, 1.0])
    alpha = ControlFunction.constant(1e6, ("y", "z"))
    v = pair_dichotomy_classify(phi, f, alpha, probes)
    assert v.tag == "Inconclusive" and v.scope == "on probes" and v.invariants_hold()


def test_bounded_or_hom_examples():
    probes = ProbeSet.from_elements(R, [0.0, 1.0, -1.0, 4.0])
    assert bounded_or_hom_classify(MapSpec.from_expression(R, C, "exp(x)"), probes).tag \
        == "TernaryHom"
    v = bounded_or_hom_classify(MapSpec.from_expression(R, C, "0.5"), probes)
    assert v.tag == "Bounded" and v.M == 0.5 and v.hom_defect == pytest.approx(0.375)
    G = cyclic_sum(5)
    vals = [cmath.exp(2j * math.pi * x / 5) for x in range(5)]
    vals[2] += 0.01
    v = bounded_or_hom_classify(MapSpec.from_table(G, C, vals), ProbeSet.exhaustive_of(G))
    assert v.tag == "Bounded" and v.hom_defect >= 0.01 - 1e-12
    with pytest.raises(NotAnAlgebra):
        bounded_or_hom_classify(baker_map(1.0)[0], probes)
