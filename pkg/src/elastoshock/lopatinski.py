"""Normal-mode analysis: dispersion roots, boundary kernel and Lopatinski scans.

Unknowns are ordered ``(p, v1, v2, F11, F21, F12, F22)``. The frequency
``s = eta + i xi`` is dual to time and ``omega`` to the tangential coordinate.
All symbols are homogeneous of degree one in ``(s, omega)``, so scans run on
the half sphere ``eta >= 0, eta^2 + xi^2 + omega^2 = 1``.

Pointwise routines use SVD null vectors of the assembled symbols. Scans use the
equivalent closed-form kernel vectors, which vectorize over whole grids.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, NamedTuple, Optional

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .energy import deformation_pattern
from .errors import (
    InvalidInput,
    NumericalInconsistency,
    PatternMismatch,
    RankDeficient,
    ScanInconclusive,
    SelectionAmbiguous,
)
from .states import DerivedScales

ETA_SCHEDULE = 1e-2 * 2.0 ** -np.arange(21)
RANK_RTOL = 1e-8
ROOT_RTOL = 1e-8
KERNEL_ATOL = 1e-10
TRANSITION_RTOL = 1e-12


class SpectralClass(str, Enum):
    UniformlyStable = "uniform"
    NeutrallyStable = "neutral"
    ViolentlyUnstable = "violent"


@dataclass(frozen=True)
class Frequency:
    eta: float
    xi: float
    omega: float

    def __post_init__(self):
        vals = (self.eta, self.xi, self.omega)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidInput("frequency components must be finite")
        if self.eta < 0:
            raise InvalidInput("eta must be non-negative")
        if self.eta**2 + self.xi**2 + self.omega**2 == 0:
            raise InvalidInput("frequency must be nonzero")

    @property
    def s(self):
        return complex(self.eta, self.xi)

    def normalized(self):
        n = np.sqrt(self.eta**2 + self.xi**2 + self.omega**2)
        return Frequency(self.eta / n, self.xi / n, self.omega / n)

    def to_dict(self):
        return {"eta": self.eta, "xi": self.xi, "omega": self.omega}


class Symbols(NamedTuple):
    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    Bnd0: np.ndarray
    Bnd2: np.ndarray
    BndC: np.ndarray


def assemble_symbols(scales: DerivedScales) -> Symbols:
    """Interior coefficient matrices and the boundary symbol pieces.

    The boundary symbol at ``(s, omega)`` is ``s Bnd0 + i omega Bnd2 + BndC``
    with rows: normal-velocity relation, ``v2`` relation, then the four
    relations for ``F11, F12, F21, F22``.
    """
    p = scales.params
    M2 = scales.M**2
    R = scales.R
    a, b, c, d = p.F11, p.F12, p.F21, p.F22
    A0 = np.diag([1.0, M2, M2, 1.0, 1.0, 1.0, 1.0])
    A1 = np.array(
        [
            [1, 1, 0, 0, 0, 0, 0],
            [1, M2, 0, -a, 0, -b, 0],
            [0, 0, M2, 0, -a, 0, -b],
            [0, -a, 0, 1, 0, 0, 0],
            [0, 0, -a, 0, 1, 0, 0],
            [0, -b, 0, 0, 0, 1, 0],
            [0, 0, -b, 0, 0, 0, 1],
        ],
        dtype=float,
    )
    A2 = np.array(
        [
            [0, 0, 1, 0, 0, 0, 0],
            [0, 0, 0, -c, 0, -d, 0],
            [1, 0, 0, 0, -c, 0, -d],
            [0, -c, 0, 0, 0, 0, 0],
            [0, 0, -c, 0, 0, 0, 0],
            [0, -d, 0, 0, 0, 0, 0],
            [0, 0, -d, 0, 0, 0, 0],
        ],
        dtype=float,
    )
    l0 = scales.ell0
    Bnd0 = np.zeros((6, 7))
    Bnd2 = np.zeros((6, 7))
    BndC = np.zeros((6, 7))
    Bnd0[1, 2] = 1.0
    Bnd2[1, 0] = -scales.a0
    Bnd2[1, 2] = -l0 / M2
    BndC[0, :3] = [scales.d0, 1.0, -l0 / (M2 * R)]
    BndC[2, [0, 2, 3]] = [a, -c / R, 1.0]
    BndC[3, [0, 2, 5]] = [b, -d / R, 1.0]
    BndC[4, [2, 4]] = [-a, 1.0]
    BndC[5, [2, 6]] = [-b, 1.0]
    return Symbols(A0, A1, A2, Bnd0, Bnd2, BndC)


def interior_symbol(sym: Symbols, s, omega, lam):
    return s * sym.A0 + lam * sym.A1 + 1j * omega * sym.A2


def boundary_symbol(sym: Symbols, s, omega, normalize=True):
    B = s * sym.Bnd0 + 1j * omega * sym.Bnd2 + sym.BndC
    if normalize:
        B = B / np.linalg.norm(B, axis=1, keepdims=True)
    return B


# --- dispersion relation ----------------------------------------------------

def _quadratic_roots(a, b, c):
    """Both roots of ``a x^2 + b x + c`` (arrays, complex), cancellation-free."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c)))
    sq = np.sqrt(b * b - 4 * a * c)
    sgn = np.where((np.conj(b) * sq).real >= 0, 1.0, -1.0)
    q = -0.5 * (b + sgn * sq)
    safe_q = np.where(q == 0, 1.0, q)
    r1 = q / a
    r2 = np.where(q == 0, 0.0, c / safe_q)
    return r1, r2


def _fast_coeffs(scales: DerivedScales, s, omega):
    """Coefficients of the fast quadratic, whose roots include lambda^+."""
    M2 = scales.M**2
    lin = 2.0 * (M2 * s - 1j * omega * scales.ell0)
    const = M2 * s * s + omega**2 * (1.0 + scales.M2**2)
    return -scales.beta**2, lin, const


def _slow_coeffs(scales: DerivedScales, s, omega):
    M2 = scales.M**2
    lin = 2.0 * (M2 * s - 1j * omega * scales.ell0)
    const = M2 * s * s + omega**2 * scales.M2**2
    return scales.M_tilde**2, lin, const


def dispersion_roots(scales: DerivedScales, s, omega, check=True, rtol=ROOT_RTOL):
    """All seven roots ``lambda`` of ``det(s A0 + lambda A1 + i omega A2) = 0``.

    Returned order: the triple root ``-s``, the two roots of the slow factor,
    then the two roots of the fast factor (the latter contains ``lambda^+``).
    With ``check`` each root is verified against the assembled symbol via its
    relative smallest singular value.
    """
    s = complex(s)
    omega = float(omega)
    if s == 0 and omega == 0:
        raise InvalidInput("s and omega must not both vanish")
    slow = _quadratic_roots(*_slow_coeffs(scales, s, omega))
    fast = _quadratic_roots(*_fast_coeffs(scales, s, omega))
    roots = np.array([-s, -s, -s, complex(slow[0]), complex(slow[1]),
                      complex(fast[0]), complex(fast[1])])
    if check:
        sym = assemble_symbols(scales)
        for lam in roots:
            sv = np.linalg.svd(interior_symbol(sym, s, omega, lam), compute_uv=False)
            if sv[-1] > rtol * sv[0]:
                raise NumericalInconsistency(
                    f"root {lam:.6g} leaves relative singular value {sv[-1] / sv[0]:.3e}"
                )
    return roots


def _lambda_plus_array(scales: DerivedScales, s, omega, tol=1e-12):
    """Vectorized ``lambda^+`` for ``Re s > 0`` (direct) or ``Re s == 0`` (limit)."""
    s = np.asarray(s, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    s, omega = np.broadcast_arrays(s, omega)
    scale = np.maximum(np.abs(s), np.abs(omega))
    if np.any(scale == 0):
        raise InvalidInput("s and omega must not both vanish")
    out = np.empty(s.shape, dtype=complex)

    inner = s.real > tol * scale
    if np.any(inner):
        r1, r2 = _quadratic_roots(*_fast_coeffs(scales, s[inner], omega[inner]))
        hi = np.maximum(r1.real, r2.real)
        lo = np.minimum(r1.real, r2.real)
        sc = scale[inner]
        if np.any((np.abs(hi) < tol * sc) & (np.abs(lo) < tol * sc)) or np.any(lo > 0):
            raise SelectionAmbiguous("cannot single out the root with positive real part")
        out[inner] = np.where(r1.real >= r2.real, r1, r2)

    edge = ~inner
    if np.any(edge):
        out[edge] = _lambda_plus_limit(scales, s[edge].imag, omega[edge], scale[edge])
    return out


def _lambda_plus_limit(scales, xi, omega, scale):
    """Limit ``eta -> +0`` of ``lambda^+`` along a geometric schedule."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape, dtype=complex)
    axis = omega == 0
    # omega = 0: the fast quadratic factors exactly
    out[axis] = scales.M * 1j * xi[axis] / (scales.M_star - scales.M)
    gen = ~axis
    if np.any(gen):
        xi_g, om_g, sc_g = xi[gen], omega[gen], scale[gen]
        seq = []
        for eta in ETA_SCHEDULE[-2:]:
            s_k = eta * sc_g + 1j * xi_g
            r1, r2 = _quadratic_roots(*_fast_coeffs(scales, s_k, om_g))
            seq.append(np.where(r1.real >= r2.real, r1, r2))
        extrap = 2.0 * seq[1] - seq[0]
        e1, e2 = _quadratic_roots(*_fast_coeffs(scales, 1j * xi_g, om_g))
        out[gen] = np.where(np.abs(e1 - extrap) <= np.abs(e2 - extrap), e1, e2)
    return out


def lambda_plus(scales: DerivedScales, s, omega) -> complex:
    """Root of the fast dispersion factor that decays into the downstream region.

    For ``Re s > 0`` this is the unique root with positive real part. On the
    imaginary axis it is the limit as ``Re s -> +0``: the selected root is
    followed along ``eta = 1e-2 * 2**-k`` (relative to ``max(|s|, |omega|)``),
    Richardson-extrapolated to ``eta = 0`` and snapped to the nearest exact
    root there.
    """
    s = complex(s)
    if s.real < 0:
        raise InvalidInput("Re s must be non-negative")
    return complex(_lambda_plus_array(scales, s, float(omega)))


# --- kernel vectors ---------------------------------------------------------

def _phase_fix(v, tol=1e-12):
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > tol * np.abs(v).max()))
    return v * (abs(v[k]) / v[k])


def _null_vector(A, what):
    _, sv, vh = np.linalg.svd(A)
    if A.shape[0] < A.shape[1]:
        ratio = sv[-1] / sv[0]
    else:
        ratio = sv[-2] / sv[0]
    if ratio <= RANK_RTOL:
        raise RankDeficient(f"{what} has a kernel of dimension > 1 (ratio {ratio:.2e})")
    return _phase_fix(vh[-1].conj())


def boundary_kernel(scales: DerivedScales, s, omega, sym: Optional[Symbols] = None):
    """Unit vector spanning the kernel of the row-normalized boundary symbol."""
    sym = assemble_symbols(scales) if sym is None else sym
    B = boundary_symbol(sym, complex(s), float(omega))
    u = _null_vector(B, "boundary symbol")
    res = np.linalg.norm(B @ u)
    if res > KERNEL_ATOL:
        raise NumericalInconsistency(f"boundary kernel residual {res:.3e}")
    return u


def boundary_kernel_closed(scales: DerivedScales, s, omega):
    """Unnormalized boundary kernel, vectorized; last axis holds the components."""
    p_ = scales.params
    s = np.asarray(s, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    M2, R = scales.M**2, scales.R
    p = s - 1j * omega * scales.ell0 / M2
    v2 = 1j * omega * scales.a0
    v1 = -scales.d0 * p + scales.ell0 / (M2 * R) * v2
    return np.stack(
        np.broadcast_arrays(
            p, v1, v2,
            -p_.F11 * p + p_.F21 / R * v2,
            p_.F11 * v2,
            -p_.F12 * p + p_.F22 / R * v2,
            p_.F12 * v2,
        ),
        axis=-1,
    )


def interior_eigenvector_closed(scales: DerivedScales, s, omega, lam):
    """Kernel of ``s A0 + lam A1 + i omega A2`` for a root of the fast factor."""
    p_ = scales.params
    s, omega, lam = np.broadcast_arrays(
        np.asarray(s, dtype=complex), np.asarray(omega, dtype=float),
        np.asarray(lam, dtype=complex),
    )
    Om = s + lam
    iw = 1j * omega
    s1 = p_.F11 * lam + iw * p_.F21
    s2 = p_.F12 * lam + iw * p_.F22
    return np.stack(
        [lam * lam - omega**2, -lam * Om, -iw * Om, -lam * s1, -iw * s1, -lam * s2, -iw * s2],
        axis=-1,
    )


class ModeSolution(NamedTuple):
    lambda_plus: complex
    roots_all: np.ndarray
    kernel_U0: np.ndarray
    det_L: complex
    det_L_alt: complex


def lopatinski_matrix(sym: Symbols, s, omega, lam, U0):
    """Row ``(A1 U0)^T`` stacked on six rows of the interior symbol.

    The six rows are chosen by column-pivoted QR of the transposed symbol;
    all rows are scaled to unit norm.
    """
    L = interior_symbol(sym, s, omega, lam)
    L = L / np.linalg.norm(L, axis=1, keepdims=True)
    _, _, piv = scipy.linalg.qr(L.T, pivoting=True, mode="economic")
    rows = np.sort(piv[:6])
    first = sym.A1 @ U0
    return np.vstack([first, L[rows]])


def lopatinski_det(scales: DerivedScales, s, omega, sym: Optional[Symbols] = None):
    """``(det_L, det_L_alt)`` at ``(s, omega)``.

    ``det_L`` is the determinant of :func:`lopatinski_matrix`; ``det_L_alt``
    is ``(A1 U0) . r`` with ``r`` the unit kernel vector of the interior
    symbol at ``lambda^+``. Both vanish at the same frequencies.
    """
    sym = assemble_symbols(scales) if sym is None else sym
    s = complex(s)
    lam = lambda_plus(scales, s, omega)
    U0 = boundary_kernel(scales, s, omega, sym)
    r = _null_vector(interior_symbol(sym, s, omega, lam), "interior symbol")
    det_L = complex(np.linalg.det(lopatinski_matrix(sym, s, omega, lam, U0)))
    det_alt = complex((sym.A1 @ U0) @ r)
    return det_L, det_alt


def mode_solution(scales: DerivedScales, s, omega) -> ModeSolution:
    sym = assemble_symbols(scales)
    s = complex(s)
    lam = lambda_plus(scales, s, omega)
    U0 = boundary_kernel(scales, s, omega, sym)
    det_L, det_alt = lopatinski_det(scales, s, omega, sym)
    return ModeSolution(lam, dispersion_roots(scales, s, omega), U0, det_L, det_alt)


def lopatinski_function(scales: DerivedScales, s, omega, lam=None):
    """Normalized ``|det_L_alt|`` from closed-form vectors, vectorized.

    Equals ``|(A1 U0) . r|`` for unit ``U0`` and ``r``; invariant under
    positive rescaling of ``(s, omega)``.
    """
    s = np.asarray(s, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    if lam is None:
        lam = _lambda_plus_array(scales, s, omega)
    A1 = assemble_symbols(scales).A1
    U = boundary_kernel_closed(scales, s, omega)
    X = interior_eigenvector_closed(scales, s, omega, lam)
    num = np.abs(np.einsum("...i,ij,...j->...", U, A1, X))
    return num / (np.linalg.norm(U, axis=-1) * np.linalg.norm(X, axis=-1))


def _det_raw(scales, A1, s, omega, lam):
    U = boundary_kernel_closed(scales, s, omega)
    X = interior_eigenvector_closed(scales, s, omega, lam)
    return complex(U @ A1 @ X)


# --- classification ---------------------------------------------------------

@dataclass(frozen=True)
class GridConfig:
    n_polar: int = 256
    n_azimuth: int = 256
    n_boundary: int = 4096
    zero_rtol: float = 1e-10
    band_rtol: float = 1e-6
    eta_min: float = 1e-6
    n_polish: int = 8
    n_polish_boundary: int = 64
    max_newton: int = 60

    def __post_init__(self):
        if min(self.n_polar, self.n_azimuth, self.n_boundary) < 4:
            raise InvalidInput("grid resolutions must be at least 4")
        if not 0 < self.zero_rtol < self.band_rtol:
            raise InvalidInput("need 0 < zero_rtol < band_rtol")

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class SpectralVerdict:
    cls: SpectralClass
    witness: Optional[Frequency]
    min_abs_det: Optional[float]
    method: str
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "class": self.cls.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "min_abs_det": self.min_abs_det,
            "method": self.method,
            "details": self.details,
        }


def classify_stretching(scales: DerivedScales, which=None) -> SpectralVerdict:
    """Closed-form verdict for stretching or anti-diagonal deformations.

    Uniformly stable iff ``K < K1 + K2``; otherwise neutrally stable with a
    witness on ``eta = 0`` lying on the ``delta^+`` branch. Never violent.
    """
    pattern = deformation_pattern(scales.params)
    if pattern is None or (which is not None and which != pattern):
        raise PatternMismatch(f"deformation is not of {which or 'stretching/antidiagonal'} type")
    K, K1, K2 = scales.K, scales.K1, scales.K2
    margin = K1 + K2 - K
    details = {
        "pattern": pattern,
        "K": K,
        "K1": K1,
        "K2": K2,
        "margin": margin,
        "transition": bool(abs(margin) <= TRANSITION_RTOL * (K1 + K2)),
    }
    if margin > 0 and not details["transition"]:
        return SpectralVerdict(SpectralClass.UniformlyStable, None, None, "closed_form",
                               details)
    b2, M2 = scales.beta**2, scales.M**2
    delta = np.sqrt(max(K - K2, 0.0) / b2)
    ratio = np.sqrt(scales.M_star**2 * (K - K1) / (M2 * (K - K2)))
    xi = (ratio - 1.0) * delta
    details["xi_over_delta"] = float(ratio - 1.0)
    details["delta_plus_bound"] = b2 / M2
    witness = Frequency(0.0, float(xi), 1.0).normalized()
    return SpectralVerdict(SpectralClass.NeutrallyStable, witness, 0.0, "closed_form", details)


def _hemisphere(cfg: GridConfig):
    a = (np.arange(cfg.n_polar) + 0.5) * (0.5 * np.pi / cfg.n_polar)
    b = (np.arange(cfg.n_azimuth) + 0.5) * (2.0 * np.pi / cfg.n_azimuth)
    A, B = np.meshgrid(a, b, indexing="ij")
    return np.sin(A), np.cos(A) * np.cos(B), np.cos(A) * np.sin(B)


def _circle(cfg: GridConfig):
    th = (np.arange(cfg.n_boundary) + 0.5) * (2.0 * np.pi / cfg.n_boundary)
    return np.cos(th), np.sin(th)


def _local_minima_2d(F):
    """Indices of grid local minima (periodic along the second axis)."""
    mask = np.ones(F.shape, dtype=bool)
    for da in (-1, 0, 1):
        for db in (-1, 0, 1):
            if da == 0 and db == 0:
                continue
            G = np.roll(F, db, axis=1)
            if da == -1:
                nb = np.vstack([G[1:], np.full((1, F.shape[1]), np.inf)])
            elif da == 1:
                nb = np.vstack([np.full((1, F.shape[1]), np.inf), G[:-1]])
            else:
                nb = G
            mask &= F <= nb
    return np.argwhere(mask)


def _local_minima_1d(f):
    return np.flatnonzero((f <= np.roll(f, 1)) & (f <= np.roll(f, -1)))


def _newton_zero(scales, A1, s0, omega, lam0, cfg: GridConfig):
    """Complex Newton iteration on the analytic determinant at fixed ``omega``.

    The fast root is tracked by continuity from ``lam0``. Returns the final
    ``s`` and tracked ``lambda``, or ``None`` when the iteration stalls.
    """
    s, lam = complex(s0), complex(lam0)
    scale = max(abs(s), abs(omega))

    def track(sv, prev):
        r1, r2 = _quadratic_roots(*_fast_coeffs(scales, sv, omega))
        r1, r2 = complex(r1), complex(r2)
        return r1 if abs(r1 - prev) <= abs(r2 - prev) else r2

    for _ in range(cfg.max_newton):
        lam = track(s, lam)
        g = _det_raw(scales, A1, s, omega, lam)
        h = 1e-6 * scale
        gp = _det_raw(scales, A1, s + h, omega, track(s + h, lam))
        gm = _det_raw(scales, A1, s - h, omega, track(s - h, lam))
        dg = (gp - gm) / (2 * h)
        if dg == 0 or not np.isfinite(dg):
            return None
        step = g / dg
        if abs(step) > 0.5 * scale:
            step *= 0.5 * scale / abs(step)
        s -= step
        if not np.isfinite(s):
            return None
        if abs(step) < 1e-15 * scale:
            break
    return s, track(s, lam)


def _scan_values(scales: DerivedScales, cfg: GridConfig):
    eta, xi, om = _hemisphere(cfg)
    F = lopatinski_function(scales, eta + 1j * xi, om)
    cx, cw = _circle(cfg)
    lam_c = _lambda_plus_limit(scales, cx, cw, np.maximum(np.abs(cx), np.abs(cw)))
    Fc = lopatinski_function(scales, 1j * cx, cw, lam_c)
    return (eta, xi, om, F), (cx, cw, lam_c, Fc)


def iter_scan_rows(scales: DerivedScales, grid: Optional[GridConfig] = None
                   ) -> Iterator[tuple]:
    """Yield ``(eta, xi, omega, abs_det, flag)`` for every scanned frequency.

    ``flag`` is ``zero``, ``band`` or ``ok`` relative to the interior median.
    """
    cfg = grid or GridConfig()
    (eta, xi, om, F), (cx, cw, _, Fc) = _scan_values(scales, cfg)
    med = float(np.median(F))

    def flag(v):
        if v < cfg.zero_rtol * med:
            return "zero"
        return "band" if v < cfg.band_rtol * med else "ok"

    for e, x, w, v in zip(eta.ravel(), xi.ravel(), om.ravel(), F.ravel()):
        yield float(e), float(x), float(w), float(v), flag(v)
    for x, w, v in zip(cx, cw, Fc):
        yield 0.0, float(x), float(w), float(v), flag(v)


def classify_spectral(scales: DerivedScales, grid: Optional[GridConfig] = None
                      ) -> SpectralVerdict:
    """Scan the Lopatinski determinant over the frequency half sphere.

    Grid local minima (interior and on ``eta = 0``) seed a complex Newton
    iteration in ``s``. A converged zero with ``eta > eta_min`` means violent
    instability; a zero on ``eta = 0`` only means neutral stability. If no
    zero is confirmed but the minimum lies within ``band_rtol`` of the grid
    median the scan is inconclusive.
    """
    cfg = grid or GridConfig()
    A1 = assemble_symbols(scales).A1
    (eta, xi, om, F), (cx, cw, lam_c, Fc) = _scan_values(scales, cfg)
    med = float(np.median(F))
    zero_tol = cfg.zero_rtol * med

    best = min(float(F.min()), float(Fc.min()))
    best_at = None
    violent = neutral = None

    seeds = sorted(
        ((F[i, j], complex(eta[i, j], xi[i, j]), om[i, j]) for i, j in _local_minima_2d(F)),
        key=lambda t: t[0],
    )
    for _, s0, w in seeds[: cfg.n_polish]:
        lam0 = complex(_lambda_plus_array(scales, s0, w))
        out = _newton_zero(scales, A1, s0, w, lam0, cfg)
        if out is None:
            continue
        s1 = out[0]
        nrm = np.hypot(abs(s1), w)
        e, x, ww = s1.real / nrm, s1.imag / nrm, w / nrm
        if e > cfg.eta_min:
            val = float(lopatinski_function(scales, complex(e, x), ww))
            at = Frequency(e, x, ww)
            if val < zero_tol and violent is None:
                violent = at
        elif e >= -cfg.eta_min:
            val = float(lopatinski_function(scales, 1j * x, ww))
            at = Frequency(0.0, x, ww)
        else:
            continue
        if val < best:
            best, best_at = val, at

    # on eta = 0 the determinant may vanish next to a branch point of lambda^+,
    # where Newton is unreliable; bracketed 1D minimization of |det| is used there
    def on_circle(t):
        x, w = np.cos(t), np.sin(t)
        return float(lopatinski_function(scales, 1j * x, w))

    dth = 2.0 * np.pi / cfg.n_boundary
    th = (np.arange(cfg.n_boundary) + 0.5) * dth
    kmins = sorted(_local_minima_1d(Fc), key=lambda k: Fc[k])[: cfg.n_polish_boundary]
    for k in kmins:
        # grid neighbours bracket the minimum; golden section keeps full precision
        # on the V-shaped |det| profile at a simple zero
        lo, hi = th[k] - dth, th[k] + dth
        if on_circle(lo) > Fc[k] < on_circle(hi):
            res = minimize_scalar(on_circle, bracket=(lo, th[k], hi), method="golden")
        else:
            # flat neighbourhood: golden section needs a strict bracket
            res = minimize_scalar(on_circle, bounds=(lo, hi), method="bounded")
        if res.fun < 1e-3 * med:
            w = max(1e-6 * dth, 4.0 * 1.5e-8 * abs(res.x))
            a, c = res.x - w, res.x + w
            if on_circle(a) > res.fun < on_circle(c):
                res = minimize_scalar(on_circle, bracket=(a, res.x, c), method="golden",
                                      options={"xtol": 1e-16, "maxiter": 200})
        val = float(res.fun)
        if val < best:
            best, best_at = val, Frequency(0.0, float(np.cos(res.x)), float(np.sin(res.x)))
        if val < zero_tol and neutral is None:
            neutral = Frequency(0.0, float(np.cos(res.x)), float(np.sin(res.x)))

    details = {"grid": cfg.to_dict(), "median_abs_det": med}
    if violent is not None:
        return SpectralVerdict(SpectralClass.ViolentlyUnstable, violent, best, "scan", details)
    if neutral is not None:
        return SpectralVerdict(SpectralClass.NeutrallyStable, neutral, best, "scan", details)
    if best_at is None:
        if F.min() <= Fc.min():
            i, j = np.unravel_index(np.argmin(F), F.shape)
            best_at = Frequency(float(eta[i, j]), float(xi[i, j]), float(om[i, j]))
        else:
            k = int(np.argmin(Fc))
            best_at = Frequency(0.0, float(cx[k]), float(cw[k]))
    if best < cfg.band_rtol * med:
        raise ScanInconclusive(
            f"minimum |det| {best:.3e} lies in the indeterminate band",
            witness=best_at, min_abs_det=best,
        )
    return SpectralVerdict(SpectralClass.UniformlyStable, best_at, best, "scan", details)
