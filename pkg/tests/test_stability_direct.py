from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ternstab.errors import NoConvergenceCertificate, NotConverged, ScalingLawViolated
from ternstab.maps import Certificate, ControlFunction, MapSpec
from ternstab.stability_direct import (additive_defect, hyers_limit, hyers_map, hyers_term,
                                       phi_tilde, uniqueness_gap, verify_stability)
from ternstab.target_spaces import TargetSpace
from ternstab.ternary_algebra import ProbeSet, analytic, cube_tower, cyclic_sum

R = analytic("reals-add")
REAL, V1, V2 = TargetSpace("real"), TargetSpace("vector", 1), TargetSpace("vector", 2)
Z7 = cyclic_sum(7)


def real_map(src):
    return MapSpec.from_expression(R, REAL, src)


def z7_table(seed, bound=10.0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(7, 2))
    v *= rng.uniform(0, bound, size=(7, 1)) / np.linalg.norm(v, axis=1, keepdims=True)
    return MapSpec.from_table(Z7, V2, v)


# -- defect ----------------------------------------------------------------------

def test_additive_defect_examples():
    grid = ProbeSet.grid(R, -10, 10, 41)
    assert additive_defect(real_map("2 * x"), grid).value == 0
    d = additive_defect(real_map("x + sin(x)"), grid)
    xs = np.asarray(grid.elements)
    oracle = np.abs(np.sin(xs[:, None, None] + xs[None, :, None] + xs[None, None, :])
                    - np.sin(xs)[:, None, None] - np.sin(xs)[None, :, None]
                    - np.sin(xs)[None, None, :]).max()
    assert d.value == pytest.approx(oracle, rel=1e-12) and d.value <= 4
    assert d.scope == "on probes"
    c = MapSpec.from_expression(R, V1, "[-1.25]")
    assert additive_defect(c, grid).value == pytest.approx(2.5)


def test_additive_defect_loop_fallback_matches():
    f = real_map("x + sin(x)")
    g = MapSpec.from_callable(R, REAL, lambda x: x + math.sin(x))
    probes = ProbeSet.grid(R, -3, 3, 9)
    a, b = additive_defect(f, probes), additive_defect(g, probes)
    assert a.value == pytest.approx(b.value, rel=1e-12) and a.argmax == b.argmax


# -- phi~ ------------------------------------------------------------------------

def test_phi_tilde_examples():
    assert phi_tilde(ControlFunction.constant(4.0), R, 1.0, 2.0, 3.0).value == 2.0
    assert phi_tilde(ControlFunction.constant(0.0), R, 1.0, 1.0, 1.0).value == 0.0
    phi = ControlFunction.expression("abs(x)^0.5", Certificate(1.0, math.sqrt(3) + 1e-12))
    pt = phi_tilde(phi, R, 1.0, 1.0, 1.0, tol=1e-13)
    partial = sum(3.0**-n * 3.0**(n / 2) for n in range(100)) / 3
    assert pt.value == pytest.approx(1 / (3 - math.sqrt(3)), abs=1e-12)
    assert abs(pt.value - partial) <= 1e-12 and pt.certified and pt.error < 1e-13


def test_phi_tilde_on_finite_carrier_sums_cycle_exactly():
    phi = ControlFunction.expression("1 + x + y * z")
    for x, y, z in itertools.product(range(7), repeat=3):
        pt = phi_tilde(phi, Z7, x, y, z)
        brute = sum(3.0**-n * (1 + cube_tower(Z7, x, n) + cube_tower(Z7, y, n)
                               * cube_tower(Z7, z, n)) for n in range(80)) / 3
        assert pt.value == pytest.approx(brute, rel=1e-13) and pt.method == "cycle"


def test_phi_tilde_without_certificate():
    with pytest.raises(NoConvergenceCertificate):
        phi_tilde(ControlFunction.expression("abs(x)"), R, 1.0, 1.0, 1.0)
    pt = phi_tilde(ControlFunction.expression("abs(x)^0.5"), R, 1.0, 1.0, 1.0)
    assert not pt.certified
    assert pt.value == pytest.approx(1 / (3 - math.sqrt(3)), rel=1e-9)


def test_certificate_validation():
    with pytest.raises(ValueError, match="λ<3"):
        Certificate(1.0, 3.0)
    with pytest.raises(ValueError):
        Certificate(-1.0, 1.0)


# -- Hyers iteration -------------------------------------------------------------

def test_hyers_term_examples():
    f = real_map("x + sin(x)")
    assert hyers_term(f, 1.0, 0) == f(1.0)
    assert hyers_term(f, 1.0, 30) == pytest.approx(1.0, abs=1e-14)
    g = z7_table(0)
    assert np.linalg.norm(hyers_term(g, 3, 30)) <= 10 / 3**30


def test_hyers_limit_exact_map_is_immediate():
    lim = hyers_limit(real_map("2 * x"), 1.7)
    assert lim.value == 3.4 and lim.n_used == 1


def test_hyers_limit_recovers_identity():
    f = real_map("x + sin(x)")
    for x in np.linspace(-30, 30, 121):
        lim = hyers_limit(f, float(x), n_max=40)
        assert abs(lim.value - x) <= 1e-12
        assert abs(lim.value - hyers_term(f, float(x), 40)) <= 1e-12


def test_hyers_limit_finite_carrier_goes_to_zero():
    f = z7_table(5)
    for x in range(7):
        assert np.linalg.norm(hyers_limit(f, x).value) <= 1e-12


def test_hyers_limit_divergence():
    with pytest.raises(NotConverged) as info:
        hyers_limit(real_map("x^2"), 1.0, n_max=20)
    assert info.value.n_max == 20


def test_hyers_envelope_with_phi():
    f = real_map("x + sin(x)")
    lim = hyers_limit(f, 2.0, phi=ControlFunction.constant(4.0))
    assert lim.envelope_ok


def test_telescoping_envelope_on_finite_carrier():
    for seed in range(20):
        f = z7_table(seed)
        eps = additive_defect(f, ProbeSet.exhaustive_of(Z7)).value
        for x in range(7):
            for n in range(8):
                bound = sum(3.0**-k * eps for k in range(n)) / 3
                assert np.linalg.norm(hyers_term(f, x, n) - f(x)) <= bound + 1e-12


def test_fixed_point_for_exact_finite_maps():
    # on a finite carrier the only additive map into a vector space is zero
    zero = MapSpec.from_table(Z7, V1, [[0.0]] * 7)
    assert additive_defect(zero, ProbeSet.exhaustive_of(Z7)).value == 0
    for x in range(7):
        assert np.array_equal(hyers_limit(zero, x).value, zero(x))
    # a nonzero constant has defect ||c - 3c||
    const = MapSpec.from_table(Z7, V1, [[2.0]] * 7)
    assert additive_defect(const, ProbeSet.exhaustive_of(Z7)).value == pytest.approx(4.0)


# -- full verification -----------------------------------------------------------

def test_verify_x_plus_sin():
    rep = verify_stability(real_map("x + sin(x)"), ControlFunction.constant(4.0),
                           ProbeSet.grid(R, -10, 10, 41))
    assert rep.passed and rep.hypothesis_holds and rep.commutative
    assert rep.max_distance <= 1.0 and rep.scope == "on probes"
    assert rep.additivity_max <= 1e-9 and rep.max_scaling_residual <= 1e-9


def test_verify_exact_hom():
    rep = verify_stability(real_map("-3 * x"), ControlFunction.constant(0.0),
                           ProbeSet.grid(R, -5, 5, 11))
    assert rep.passed and rep.max_distance == 0 and rep.defect == 0


def test_verify_finite_table():
    f = z7_table(9)
    probes = ProbeSet.exhaustive_of(Z7)
    eps = additive_defect(f, probes).value
    rep = verify_stability(f, ControlFunction.constant(eps), probes)
    assert rep.scope == "exhaustive" and rep.hypothesis_holds and rep.passed
    for r in rep.records:
        assert r["distance"] <= eps / 2 + 1e-9


def test_verify_reports_hypothesis_violations():
    rep = verify_stability(real_map("x + sin(x)"), ControlFunction.constant(1.0),
                           ProbeSet.grid(R, -10, 10, 41))
    assert not rep.hypothesis_holds and rep.hypothesis_violations > 0
    row = rep.hypothesis_table[0]
    assert row["defect"] > row["phi"] + 1e-9


def test_perturbation_robustness():
    f = MapSpec.perturbed(R, REAL, "5 * x", "0.3 * cos(2 * x + 1)")
    probes = ProbeSet.grid(R, -6, 6, 25)
    rep = verify_stability(f, ControlFunction.constant(4 * 0.3), probes)
    assert rep.passed
    for r in rep.records:
        assert r["T"] == pytest.approx(5 * r["x"], abs=1e-9)
        assert r["distance"] <= 0.3 + 1e-12


def test_hyers_map_is_lazy_and_scaling():
    T = hyers_map(real_map("x + sin(x)"))
    for x in (0.5, -2.0, 7.25):
        assert T(3 * x) == pytest.approx(3 * T(x), abs=1e-9)


# -- uniqueness ------------------------------------------------------------------

def test_uniqueness_gap():
    probes = ProbeSet.grid(R, -3, 3, 7)
    T = hyers_map(real_map("x + sin(x)"))
    same = uniqueness_gap(T, T, [2.0] * 7, probes)
    assert same.equal and same.max_gap == 0
    shifted = MapSpec.from_callable(R, REAL, lambda x: T(x) + 1.0)
    with pytest.raises(ScalingLawViolated):
        uniqueness_gap(T, shifted, [2.0] * 7, probes)
    a = hyers_map(z7_table(1))
    b = hyers_map(z7_table(2))
    trace = uniqueness_gap(a, b, [5.0] * 7, ProbeSet.exhaustive_of(Z7))
    assert trace.equal and trace.max_gap <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.5, 3.0), st.floats(-3, 3), st.floats(-4, 4))
def test_bounded_perturbation_property(a, b, c, slope):
    f = MapSpec.perturbed(R, REAL, f"{slope!r} * x", f"{a!r} * sin({b!r} * x + {c!r})")
    for x in (-9.5, -1.0, 0.0, 2.5, 10.0):
        lim = hyers_limit(f, x, n_max=40)
        assert abs(lim.value - slope * x) <= 1e-9
        assert abs(f(x) - lim.value) <= a + 1e-9
