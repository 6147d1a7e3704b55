import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import admissible_params, random_params, random_scales
from elastoshock.energy import (
    appendix_b_margin,
    classify_margin,
    convexity_quadratic,
    elastic_mach_check,
    energy_verdict,
    lienard_chipart,
    quartic_root_oracle,
    stretching_condition,
    theorem2_verdict,
    uniform_stability_margin,
    usc_expanded,
)
from elastoshock.errors import (
    ConvexityRequired,
    DegenerateLeadingCoefficient,
    InvalidInput,
    PatternMismatch,
)
from elastoshock.states import (
    PolytropicEOS,
    ShockParameters,
    SideState,
    TabulatedEOS,
    derived_scales,
)


def _scales(M, R, F11=0.0, F12=0.0, F21=0.0, F22=0.0, **kw):
    return derived_scales(ShockParameters(M, R, F11, F12, F21, F22, **kw))


# --- stability margin --------------------------------------------------------

def test_gas_reduction_example():
    sc = _scales(0.5, 1.5, allow_degenerate=True)
    assert uniform_stability_margin(sc) > 0
    assert 1 - 0.25 * 0.5 == 0.875


def test_stretching_examples(stretch2, stretch4):
    assert stretching_condition(stretch2) == pytest.approx(1.1784, abs=1e-12)
    assert stretching_condition(stretch4) == pytest.approx(-0.2216, abs=1e-12)
    assert uniform_stability_margin(stretch2) > 0
    assert uniform_stability_margin(stretch4) < 0
    # K thresholds from the defining formulas
    assert stretch4.K == pytest.approx(2.88)
    assert stretch4.K1 + stretch4.K2 == pytest.approx(2.70272)


def test_margin_is_scaled_threshold_gap(stretch2):
    # on the stretching plane the margin equals M*^2 (K1 + K2 - K) up to a positive factor
    sc = stretch2
    gap = sc.K1 + sc.K2 - sc.K
    ratio = uniform_stability_margin(sc) / (sc.M_star**2 * gap)
    assert ratio > 0
    sc4 = _scales(0.9, 3.0, 0.5, 0, 0, 0.8)
    ratio4 = uniform_stability_margin(sc4) / (sc4.M_star**2 * (sc4.K1 + sc4.K2 - sc4.K))
    assert ratio4 == pytest.approx(ratio, rel=1e-12)


def test_antidiagonal_symmetry():
    sc = _scales(0.9, 2.0, 0.0, 0.5, 0.8, 0.0)
    assert stretching_condition(sc) == pytest.approx(1.1784, abs=1e-12)
    assert stretching_condition(sc, "antidiagonal") == pytest.approx(1.1784, abs=1e-12)


def test_pattern_mismatch():
    sc = _scales(0.9, 2.0, 0.5, 0.1, 0.0, 0.8)
    with pytest.raises(PatternMismatch):
        stretching_condition(sc)
    with pytest.raises(PatternMismatch):
        stretching_condition(_scales(0.9, 2.0, 0.5, 0, 0, 0.8), "antidiagonal")
    with pytest.raises(InvalidInput):
        stretching_condition(_scales(0.9, 2.0, 0.5, 0, 0, 0.8), "shear")


def test_classify_margin_band():
    assert classify_margin(1e-3) == "stable"
    assert classify_margin(-1e-3) == "unstable"
    assert classify_margin(1e-10) == "indeterminate"


@settings(max_examples=300, deadline=None)
@given(admissible_params())
def test_compact_and_expanded_margins_agree(params):
    sc = derived_scales(params)
    m = uniform_stability_margin(sc)
    assert math.copysign(1, m) == math.copysign(1, usc_expanded(params)) or abs(m) < 1e-9


@settings(max_examples=300, deadline=None)
@given(admissible_params("stretching"))
def test_stretching_sign_agreement(params):
    sc = derived_scales(params)
    m = uniform_stability_margin(sc)
    s = stretching_condition(sc)
    if abs(m) > 1e-9 and abs(s) > 1e-9:
        assert (m > 0) == (s > 0) == (sc.K < sc.K1 + sc.K2)


def test_gas_sign_rule(rng):
    for _ in range(300):
        M, R = rng.uniform(0.01, 0.99), rng.uniform(1.0 + 1e-6, 6.0)
        m = uniform_stability_margin(_scales(M, R, allow_degenerate=True))
        g = 1 - M * M * (R - 1)
        if abs(g) > 1e-9:
            assert (m > 0) == (g > 0)


# --- elastic Mach number -----------------------------------------------------

def test_elastic_mach_examples(stretch2):
    chk = elastic_mach_check(stretch2)
    assert chk.gas_prime_margin == pytest.approx(0.44, abs=1e-12)
    assert chk.str_prime_margin is not None
    assert elastic_mach_check(stretch2, R=1.0).gas_prime_margin == 1.0
    assert elastic_mach_check(_scales(0.9, 2.0, 0.5, 0.1, 0.2, 0.8)).str_prime_margin is None


@settings(max_examples=200, deadline=None)
@given(admissible_params("stretching"))
def test_refined_bound_matches_margin(params):
    sc = derived_scales(params)
    m = uniform_stability_margin(sc)
    s = elastic_mach_check(sc).str_prime_margin
    if abs(m) > 1e-9 and abs(s) > 1e-9:
        assert (m > 0) == (s > 0)


# --- Lienard-Chipart ---------------------------------------------------------

def test_lc_pattern_case(stretch2):
    lc = lienard_chipart(stretch2)
    b0, b1, b2, b3, b4 = lc.coeffs
    assert stretch2.a2 == 0.0
    assert (b1, b3) == (2.0, 2.0)
    assert b0 == b4
    assert lc.passed == (stretch2.a1 > 0) == (uniform_stability_margin(stretch2) > 0)
    assert lc.passed


def test_b1_b3_always_positive(rng):
    for _ in range(500):
        lc = lienard_chipart(random_scales(rng))
        assert lc.coeffs[1] > 0 and lc.coeffs[3] > 0


def test_quartic_oracle_examples():
    r = quartic_root_oracle((1, 4, 6, 4, 1))
    assert np.allclose(r.roots, -1, atol=1e-3)
    assert r.left_half_plane
    r = quartic_root_oracle((1, 0, 2, 0, 1))
    assert np.allclose(np.sort(r.roots.imag), [-1, -1, 1, 1], atol=1e-6)
    assert np.abs(r.roots.real).max() < 1e-6
    assert not r.left_half_plane


def test_quartic_oracle_degenerate_lead():
    with pytest.warns(DegenerateLeadingCoefficient):
        r = quartic_root_oracle((6, 11, 6, 1, 0))
    assert np.allclose(np.sort(r.roots.real), [-3, -2, -1])
    assert r.left_half_plane
    with pytest.raises(InvalidInput):
        quartic_root_oracle((1, 2, 3))


def test_lc_matches_root_oracle(rng):
    for _ in range(500):
        lc = lienard_chipart(random_scales(rng))
        if min(abs(m) for m in lc.margins) > 1e-9:
            assert lc.passed == quartic_root_oracle(lc.coeffs).left_half_plane


def test_last_inequality_reduction(rng):
    # the rewritten Hurwitz condition and its reduced form both always hold
    for _ in range(1000):
        sc = random_scales(rng)
        b2 = sc.beta**2
        lhs = (b2 * sc.d0_tilde - sc.a1) / b2 - sc.M_star * b2 / (2 * sc.M**2) * sc.a2**2
        reduced = sc.M**2 * sc.M2**2 + sc.R * sc.M**2 * (sc.M**2 - sc.M1**2) - sc.ell0**2
        assert lhs > 0
        assert reduced > 0
        b0, b1, b2c, b3, b4 = lienard_chipart(sc).coeffs
        assert b2c > 0


def test_lc_equivalent_to_margin(rng):
    for _ in range(500):
        sc = random_scales(rng)
        m = uniform_stability_margin(sc)
        if abs(m) > 1e-9:
            assert lienard_chipart(sc).passed == (m > 0)


# --- convexity value D ---------------------------------------------------------

def test_d_value_example(stretch2):
    b = appendix_b_margin(stretch2)
    assert b.D == pytest.approx(0.78555, abs=5e-5)
    f1, f2 = b.factors
    assert f1 == pytest.approx(0.35319, abs=5e-5)
    assert f2 == pytest.approx(2.224018, abs=5e-5)
    assert b.sos_residual < 1e-12


@settings(max_examples=300, deadline=None)
@given(admissible_params())
def test_rr_identity_and_positive_d(params):
    sc = derived_scales(params)
    lhs = sc.M**2 * sc.sigma**2 - sc.ell0**2 * sc.beta**2
    rhs = sc.M_star**2 * (sc.M2**2 * sc.M_tilde**2 + sc.M**2 + sc.kappa**2)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))
    b = appendix_b_margin(sc)
    assert b.D > 0
    assert b.factors[1] > 0
    assert b.sos_residual < 1e-12


def test_quadratic_positive_on_unit_interval(rng):
    for _ in range(200):
        sc = random_scales(rng)
        Z = np.linspace(1e-6, 1 - 1e-6, 101)
        assert np.all(convexity_quadratic(sc, Z) > 0)


def test_usc1_consistency(rng):
    for _ in range(1000):
        sc = random_scales(rng)
        m = uniform_stability_margin(sc)
        lhs = sc.M_tilde**2 * (sc.R - 1)
        rhs = 1 + appendix_b_margin(sc).D / sc.M_star**4
        if abs(m) > 1e-9 and abs(lhs - rhs) > 1e-10 * rhs:
            assert (m > 0) == (lhs < rhs)


# --- verdicts ------------------------------------------------------------------

def test_energy_verdict(stretch2, stretch4):
    v = energy_verdict(stretch2)
    assert v.stable and v.status == "stable" and v.lc_pass
    assert len(v.quartic_roots) == 4
    d = v.to_dict()
    assert d["status"] == "stable" and len(d["lc_coeffs"]) == 5
    v4 = energy_verdict(stretch4)
    assert not v4.stable and v4.status == "unstable" and not v4.lc_pass


def _upstream(F=((0.3, 0.0), (0.0, 0.6))):
    return SideState(1.0, (0.0, 0.0), F)


def test_convex_verdict_example():
    v = theorem2_verdict(_upstream(), 1.5, PolytropicEOS(1.0, 2.0))
    assert v.status == "uniform"
    assert v.usc_margin > 0 and v.gas_prime_margin > 0 and v.d_value > 0 and v.lc_pass
    assert v.R_Mtilde_sq <= 1
    assert all(m > 0 for m in v.lax_margins if m is not None)


def test_convex_verdict_gates():
    rho = np.linspace(0.5, 3.0, 11)
    concave = TabulatedEOS(tuple(rho), tuple(np.sqrt(rho)))
    with pytest.raises(ConvexityRequired):
        theorem2_verdict(_upstream(), 1.5, concave)
    with pytest.raises(InvalidInput):
        theorem2_verdict(_upstream(), 0.9, PolytropicEOS(1.0, 2.0))


def test_convex_verdict_random_polytropic(rng):
    for gamma in (1.2, 5 / 3, 2.0, 3.0):
        for _ in range(25):
            eos = PolytropicEOS(rng.uniform(0.5, 2.0), gamma)
            F = rng.uniform(-1, 1, (2, 2))
            if abs(np.linalg.det(F)) < 1e-3:
                continue
            up = SideState(rng.uniform(0.5, 2.0), (0.0, 0.0), F)
            v = theorem2_verdict(up, up.rho * rng.uniform(1.01, 5.0), eos)
            assert v.status == "uniform"
            sc = derived_scales(v.params)
            assert elastic_mach_check(sc).gas_prime_margin > 0
            assert sc.M_tilde < 1


def test_random_params_helper_covers_patterns(rng):
    p = random_params(rng, "antidiagonal")
    assert p.F11 == 0 and p.F22 == 0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        energy_verdict(derived_scales(p))
