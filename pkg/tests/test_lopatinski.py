import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import admissible_params, random_params, random_scales
from elastoshock.energy import uniform_stability_margin
from elastoshock.errors import InvalidInput, PatternMismatch
from elastoshock.lopatinski import (
    Frequency,
    GridConfig,
    SpectralClass,
    assemble_symbols,
    boundary_kernel,
    boundary_kernel_closed,
    boundary_symbol,
    classify_spectral,
    classify_stretching,
    dispersion_roots,
    interior_eigenvector_closed,
    interior_symbol,
    iter_scan_rows,
    lambda_plus,
    lopatinski_det,
    lopatinski_function,
    mode_solution,
)
from elastoshock.states import ShockParameters, derived_scales

SMALL = GridConfig(n_polar=64, n_azimuth=64, n_boundary=1024)


def _rand_freq(rng):
    s = complex(rng.uniform(0.05, 1.0), rng.normal())
    return s, float(rng.normal())


def _stretch_relation(sc, s, w, lam):
    p = sc.params
    Om, M2 = s + lam, sc.M**2
    return ((lam**2 - w**2) * s + M2 * Om * lam * s + p.F11**2 * lam**2 * s
            + p.F22**2 * w**2 * lam + sc.R * (M2 - p.F11**2) * w**2 * Om)


# --- frequencies ---------------------------------------------------------------

def test_frequency_validation():
    with pytest.raises(InvalidInput):
        Frequency(0.0, 0.0, 0.0)
    with pytest.raises(InvalidInput):
        Frequency(-0.1, 1.0, 0.0)
    f = Frequency(3.0, 0.0, 4.0).normalized()
    assert (f.eta, f.omega) == pytest.approx((0.6, 0.8))
    assert f.s == complex(0.6, 0.0)


# --- symbols -------------------------------------------------------------------

def test_symbol_structure(rng):
    for _ in range(200):
        sc = random_scales(rng)
        sym = assemble_symbols(sc)
        assert np.array_equal(sym.A1, sym.A1.T) and np.array_equal(sym.A2, sym.A2.T)
        assert np.linalg.eigvalsh(sym.A0).min() > 0
        assert abs(np.linalg.det(sym.A1)) > 1e-12


def test_reference_stretching_kernel(stretch2, rng):
    sc, p = stretch2, stretch2.params
    sym = assemble_symbols(sc)
    for _ in range(10):
        s, w = _rand_freq(rng)
        a0 = sc.a0
        U = np.array([s, -sc.d0 * s, 1j * a0 * w, -p.F11 * s, 1j * a0 * p.F11 * w,
                      1j * a0 * p.F22 * w / sc.R, 0])
        B = boundary_symbol(sym, s, w, normalize=False)
        assert np.linalg.norm(B @ U) < 1e-12 * np.linalg.norm(U)
        k = boundary_kernel(sc, s, w)
        Un = U / np.linalg.norm(U)
        assert abs(abs(np.vdot(Un, k)) - 1) < 1e-10


def test_kernel_closed_form_general(rng):
    for _ in range(100):
        sc = random_scales(rng)
        s, w = _rand_freq(rng)
        sym = assemble_symbols(sc)
        U = boundary_kernel_closed(sc, s, w)
        B = boundary_symbol(sym, s, w, normalize=False)
        assert np.linalg.norm(B @ U) < 1e-12 * np.linalg.norm(U) * np.abs(B).max()
        k = boundary_kernel(sc, s, w, sym)
        assert np.linalg.norm(boundary_symbol(sym, s, w) @ k) < 1e-10
        assert abs(abs(np.vdot(U / np.linalg.norm(U), k)) - 1) < 1e-9
        first = k[np.argmax(np.abs(k) > 1e-12)]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_kernel_at_zero_omega(stretch2):
    k = boundary_kernel(stretch2, 1.0, 0.0)
    assert abs(k[2]) < 1e-14 and abs(k[4]) < 1e-14 and abs(k[6]) < 1e-14


# --- dispersion -------------------------------------------------------------------

def test_dispersion_roots_solve_symbol(rng):
    for _ in range(100):
        sc = random_scales(rng)
        s, w = _rand_freq(rng)
        sym = assemble_symbols(sc)
        roots = dispersion_roots(sc, s, w)
        assert len(roots) == 7
        assert np.allclose(roots[:3], -s)
        for lam in roots:
            L = interior_symbol(sym, s, w, lam)
            sv = np.linalg.svd(L, compute_uv=False)
            assert sv[-1] < 1e-8 * sv[0]


def test_determinant_factorization(rng):
    # det(s A0 + lam A1 + i w A2) is a constant multiple of the factored polynomial
    for _ in range(30):
        sc = random_scales(rng)
        p = sc.params
        s, w = _rand_freq(rng)
        sym = assemble_symbols(sc)

        def poly(lam):
            Om = s + lam
            s1 = p.F11 * lam + 1j * w * p.F21
            s2 = p.F12 * lam + 1j * w * p.F22
            slow = sc.M**2 * Om**2 - s1**2 - s2**2
            return Om**3 * slow * (slow - lam**2 + w**2)

        lams = rng.normal(size=4) + 1j * rng.normal(size=4)
        ratios = [np.linalg.det(interior_symbol(sym, s, w, z)) / poly(z) for z in lams]
        assert np.allclose(ratios, ratios[0], rtol=1e-8)


def test_zero_omega_roots(stretch2):
    sc, M, M1 = stretch2, stretch2.M, stretch2.M1
    s = 1.0
    roots = dispersion_roots(sc, s, 0.0)
    for want in (-M * s / (M - M1), -M * s / (M + M1), M * s / (sc.M_star - M)):
        assert np.abs(roots - want).min() < 1e-10 * abs(want)


def test_single_decaying_root(rng):
    for _ in range(300):
        sc = random_scales(rng)
        s, w = _rand_freq(rng)
        roots = dispersion_roots(sc, s, w)
        assert np.count_nonzero(roots.real > 0) == 1
        # the slow factor never supplies the decaying root
        assert np.all(roots[3:5].real < 0)
        lam = lambda_plus(sc, s, w)
        assert lam == pytest.approx(roots[roots.real > 0][0], rel=1e-12)


def test_lambda_plus_closed_form(stretch2):
    lam = lambda_plus(stretch2, 1.0, 0.0)
    assert lam.real == pytest.approx(0.9 / (np.sqrt(1.25) - 0.9), rel=1e-12)
    assert lam.real == pytest.approx(4.12779, abs=1e-5)


def test_lambda_plus_homogeneous(rng):
    for _ in range(50):
        sc = random_scales(rng)
        s, w = _rand_freq(rng)
        t = rng.uniform(0.1, 10)
        assert lambda_plus(sc, t * s, t * w) == pytest.approx(t * lambda_plus(sc, s, w), rel=1e-10)


def test_lambda_plus_boundary_limit(rng):
    # on eta = 0 the selected root is the limit of the eta > 0 root
    for _ in range(30):
        sc = random_scales(rng)
        xi, w = rng.normal(), rng.normal()
        lim = lambda_plus(sc, 1j * xi, w)
        near = lambda_plus(sc, complex(1e-9, xi), w)
        assert abs(lim - near) < 1e-6 * max(1.0, abs(lim))
        assert lim.real >= -1e-12


def test_lambda_plus_rejects_left_half_plane(stretch2):
    with pytest.raises(InvalidInput):
        lambda_plus(stretch2, complex(-0.1, 1.0), 1.0)


# --- Lopatinski determinant ---------------------------------------------------

def test_det_matches_stretching_relation(rng):
    for _ in range(30):
        sc = derived_scales(random_params(rng, "stretching"))
        A1 = assemble_symbols(sc).A1
        s, w = _rand_freq(rng)
        lam = lambda_plus(sc, s, w)
        raw = boundary_kernel_closed(sc, s, w) @ A1 @ interior_eigenvector_closed(sc, s, w, lam)
        assert raw == pytest.approx((1 - sc.d0) * _stretch_relation(sc, s, w, lam), rel=1e-10)


def test_det_forms_vanish_together(stretch4):
    w = classify_stretching(stretch4).witness
    d, alt = lopatinski_det(stretch4, 1j * w.xi, w.omega)
    assert abs(d) < 1e-10 and abs(alt) < 1e-10
    d, alt = lopatinski_det(stretch4, complex(0.3, 0.2), 0.9)
    assert abs(d) > 1e-3 and abs(alt) > 1e-3


def test_alt_det_matches_closed_form_function(rng):
    for _ in range(30):
        sc = random_scales(rng)
        s, w = _rand_freq(rng)
        d, alt = lopatinski_det(sc, s, w)
        f = float(lopatinski_function(sc, s, w))
        assert abs(abs(alt) - f) < 1e-10


def test_no_zero_on_omega_axis(rng):
    for _ in range(50):
        sc = random_scales(rng)
        for s in (1.0, 1j, -1j, complex(0.5, 0.5)):
            assert lopatinski_function(sc, s, 0.0) > 1e-6


def test_det_scale_invariant(rng):
    sc = random_scales(rng)
    s, w = _rand_freq(rng)
    f = lopatinski_function(sc, s, w)
    assert lopatinski_function(sc, 7.0 * s, 7.0 * w) == pytest.approx(f, rel=1e-10)


def test_mode_solution(stretch2):
    m = mode_solution(stretch2, complex(0.4, 0.3), 0.8)
    assert m.lambda_plus.real > 0
    assert len(m.roots_all) == 7
    assert np.linalg.norm(m.kernel_U0) == pytest.approx(1.0)


# --- closed-form stretching verdict -------------------------------------------

def test_closed_form_examples(stretch2, stretch4):
    v = classify_stretching(stretch2)
    assert v.cls is SpectralClass.UniformlyStable and v.witness is None
    v = classify_stretching(stretch4)
    assert v.cls is SpectralClass.NeutrallyStable
    assert v.witness.eta == 0.0
    assert (v.witness.xi, v.witness.omega) == pytest.approx((0.64582, 0.76349), abs=1e-5)
    assert v.to_dict()["class"] == "neutral"


def test_closed_form_transition():
    # choose R so that K = K1 + K2 exactly
    M, a, b = 0.9, 0.5, 0.8
    Ms2 = 1 + a * a
    K2 = 1 + b * b
    K1 = M * M * K2 / Ms2
    R = (K1 + K2 - b * b) / (M * M - a * a)
    sc = derived_scales(ShockParameters(M, R, a, 0, 0, b))
    v = classify_stretching(sc)
    assert v.details["transition"]
    assert v.cls is SpectralClass.NeutrallyStable


def test_closed_form_pattern_mismatch():
    sc = derived_scales(ShockParameters(0.9, 2.0, 0.5, 0.1, 0.0, 0.8))
    with pytest.raises(PatternMismatch):
        classify_stretching(sc)
    with pytest.raises(PatternMismatch):
        classify_stretching(derived_scales(ShockParameters(0.9, 2.0, 0.5, 0, 0, 0.8)),
                            "antidiagonal")


@settings(max_examples=200, deadline=None)
@given(admissible_params("stretching"))
def test_closed_form_matches_margin_and_delta_branch(params):
    sc = derived_scales(params)
    v = classify_stretching(sc)
    m = uniform_stability_margin(sc)
    if abs(m) > 1e-9:
        assert (v.cls is SpectralClass.UniformlyStable) == (m > 0)
    assert v.cls is not SpectralClass.ViolentlyUnstable
    if sc.K > sc.K2 * (1 + 1e-9):
        ratio = np.sqrt(sc.M_star**2 * (sc.K - sc.K1) / (sc.M**2 * (sc.K - sc.K2)))
        on_branch = ratio - 1 > sc.beta**2 / sc.M**2
        if abs(sc.K1 + sc.K2 - sc.K) > 1e-9:
            assert on_branch == (sc.K < sc.K1 + sc.K2)


@settings(max_examples=100, deadline=None)
@given(admissible_params("stretching"))
def test_witness_identity(params):
    sc = derived_scales(params)
    v = classify_stretching(sc)
    if v.cls is not SpectralClass.NeutrallyStable or v.details["transition"]:
        return
    w = v.witness
    delta = np.sqrt((sc.K - sc.K2) / sc.beta**2) * w.omega
    lhs = (w.xi / delta + 1) ** 2
    rhs = sc.M_star**2 * (sc.K - sc.K1) / (sc.M**2 * (sc.K - sc.K2))
    assert lhs == pytest.approx(rhs, rel=1e-10)
    lam = lambda_plus(sc, 1j * w.xi, w.omega)
    rel = abs(_stretch_relation(sc, 1j * w.xi, w.omega, lam)) / max(1.0, abs(lam)) ** 3
    assert rel < 1e-8


def test_real_root_between_thresholds(rng):
    # for K1 < K < K2 the candidate root has real lambda, imaginary Omega and eta < 0
    hits = 0
    for _ in range(300):
        sc = derived_scales(random_params(rng, "stretching"))
        K, K1, K2 = sc.K, sc.K1, sc.K2
        if not K1 < K < K2:
            continue
        hits += 1
        Mh2, M2, Ms2 = sc.beta**2, sc.M**2, sc.M_star**2
        lam = np.sqrt((K2 - K) / Mh2)
        Om = 1j * np.sqrt(Ms2 * (K - K1) / (M2 * Mh2))
        s = Om - lam
        assert s.real == pytest.approx(-lam)
        assert abs(M2 * Om**2 - Ms2 * lam**2 + K2) < 1e-12 * K2
        assert abs(Om * (M2 * lam * s + K) + (Ms2 * lam**2 - K2) * s) < 1e-10 * max(1, abs(s)) ** 3
        assert abs(_stretch_relation(sc, s, 1.0, lam)) < 1e-10 * max(1, abs(s)) ** 3
    assert hits > 0


# --- spectral scan -----------------------------------------------------------------

def test_scan_examples(stretch2, stretch4):
    v = classify_spectral(stretch2, SMALL)
    assert v.cls is SpectralClass.UniformlyStable and v.min_abs_det > 0
    v = classify_spectral(stretch4)
    assert v.cls is SpectralClass.NeutrallyStable
    assert v.witness.eta == 0.0
    ref = classify_stretching(stretch4).witness
    assert (v.witness.xi, v.witness.omega) == pytest.approx((ref.xi, ref.omega), abs=1e-6)


def test_scan_gas_limit():
    sc = derived_scales(ShockParameters(0.6, 2.0, 0, 0, 0, 0, allow_degenerate=True))
    assert classify_spectral(sc, SMALL).cls is SpectralClass.UniformlyStable


@pytest.mark.slow
def test_scan_matches_closed_form_on_stretching_grid():
    for a in (0.2, 0.7):
        for b in (0.3, 1.0):
            Ms = np.sqrt(1 + a * a)
            for t in (0.3, 0.8):
                for R in (1.5, 3.0, 5.5):
                    sc = derived_scales(ShockParameters(a + t * (Ms - a), R, a, 0, 0, b))
                    want = classify_stretching(sc)
                    got = classify_spectral(sc)
                    assert got.cls == want.cls, (a, b, t, R)


@settings(max_examples=10, deadline=None)
@given(admissible_params("stretching"), st.floats(0.2, 5.0))
def test_scan_rows_homogeneous(params, t):
    sc = derived_scales(params)
    row = next(iter_scan_rows(sc, GridConfig(n_polar=4, n_azimuth=4, n_boundary=4)))
    e, x, w, a, flag = row
    assert lopatinski_function(sc, complex(t * e, t * x), t * w) == pytest.approx(a, rel=1e-9)
    assert flag in ("zero", "band", "ok")


def test_grid_config_validation():
    with pytest.raises(InvalidInput):
        GridConfig(n_polar=2)
    with pytest.raises(InvalidInput):
        GridConfig(zero_rtol=1e-3, band_rtol=1e-4)
