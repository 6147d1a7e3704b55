"""Energy-method uniform stability criterion and its algebraic companions.

The criterion is a single inequality in the derived scales. It is evaluated
here in several equivalent arrangements (compact, fully expanded in the raw
deformation entries, via the quartic coefficients of the boundary matrix
spectrum, and via the convexity value ``D``) so that each can be checked
against the others.
"""
from __future__ import annotations

import math
import warnings
from fractions import Fraction
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    ConvexityRequired,
    DegenerateLeadingCoefficient,
    InvalidInput,
    NumericalInconsistency,
    PatternMismatch,
)
from .states import (
    DerivedScales,
    ShockParameters,
    check_lax,
    derived_scales,
    solve_rankine_hugoniot,
)

MARGIN_BAND = 1e-9
PATTERN_TOL = 1e-12


def classify_margin(margin, band=MARGIN_BAND):
    """``'stable'``, ``'unstable'`` or ``'indeterminate'`` for a signed margin."""
    if margin > band:
        return "stable"
    if margin < -band:
        return "unstable"
    return "indeterminate"


def _usc_terms(scales: DerivedScales):
    M, R = scales.M, scales.R
    Ms2 = scales.M_star**2
    sig2 = scales.sigma**2
    l0 = scales.ell0
    return (
        (Ms2 + M * M) * sig2,
        -(R * scales.M_tilde**2 + scales.M2**2) * Ms2**2,
        l0 * l0 * (2.0 * scales.beta**2 + M * M),
        -2.0 * abs(l0) * scales.beta * M * scales.sigma,
    )


def usc_expanded(params: ShockParameters):
    """The criterion written directly in ``M``, ``R`` and the entries of F.

    Returns LHS minus RHS of the expanded inequality.
    """
    M, R = params.M, params.R
    F11, F12, F21, F22 = params.F11, params.F12, params.F21, params.F22
    m1 = F11**2 + F12**2
    frob = F11**2 + F12**2 + F21**2 + F22**2
    det = params.kappa
    ell = F11 * F21 + F12 * F22
    big = 1.0 + frob + det**2
    lhs = (
        (1.0 + m1 + M * M) * big
        - (R * (M * M - m1) + F21**2 + F22**2) * (1.0 + m1) ** 2
        + ell**2 * (2.0 * (1.0 + m1) - M * M)
    )
    rhs = 2.0 * M * abs(ell) * math.sqrt((1.0 + m1 - M * M) * big)
    return lhs - rhs


def uniform_stability_margin(scales: DerivedScales, rtol=1e-10):
    """Signed margin of the uniform stability condition; positive means stable.

    Both the compact and the expanded arrangements are evaluated and must agree
    to ``rtol`` relative to the largest term.
    """
    terms = _usc_terms(scales)
    margin = math.fsum(terms)
    other = usc_expanded(scales.params)
    scale = max(abs(t) for t in terms)
    if abs(margin - other) > rtol * scale:
        raise NumericalInconsistency(
            f"compact ({margin}) and expanded ({other}) stability margins disagree"
        )
    return margin


def deformation_pattern(params: ShockParameters, tol=PATTERN_TOL):
    """``'stretching'`` (F12 = F21 = 0), ``'antidiagonal'`` (F11 = F22 = 0) or None."""
    scale = max(1.0, float(np.abs(params.F).max()))
    if abs(params.F12) <= tol * scale and abs(params.F21) <= tol * scale:
        return "stretching"
    if abs(params.F11) <= tol * scale and abs(params.F22) <= tol * scale:
        return "antidiagonal"
    return None


def stretching_condition(scales: DerivedScales, which=None, tol=PATTERN_TOL):
    """Closed-form stability margin for the two particular deformations.

    ``which='stretching'`` needs F12 = F21 = 0; ``which='antidiagonal'`` needs
    F11 = F22 = 0 and uses F12, F21 in place of F11, F22. With ``which=None``
    the pattern is detected.
    """
    p = scales.params
    found = deformation_pattern(p, tol)
    if which is None:
        which = found
        if which is None:
            raise PatternMismatch("F is neither diagonal nor anti-diagonal")
    if which == "stretching":
        a, b, off = p.F11, p.F22, (p.F12, p.F21)
    elif which == "antidiagonal":
        a, b, off = p.F12, p.F21, (p.F11, p.F22)
    else:
        raise InvalidInput(f"unknown pattern {which!r}")
    scale = max(1.0, float(np.abs(p.F).max()))
    if max(abs(x) for x in off) > tol * scale:
        raise PatternMismatch(f"F = {p.F.tolist()} does not have the {which} zero pattern")
    M, R = p.M, p.R
    return 1.0 + a * a + M * M - R * (1.0 + a * a) * (M * M - a * a) + b * b * M * M


class ElasticMachCheck(NamedTuple):
    gas_prime_margin: float
    str_prime_margin: Optional[float]


def elastic_mach_check(scales: DerivedScales, R=None):
    """Margins of the gas-dynamics-like bound on the elastic Mach number.

    ``gas_prime_margin = 1 - Mt**2 (R - 1)``. For stretching, also the margin
    of the refined bound whose right-hand side carries the elastic correction.
    ``R`` defaults to the density ratio of ``scales``.
    """
    R = scales.R if R is None else float(R)
    w = scales.M_tilde**2
    gas = 1.0 - w * (R - 1.0)
    p = scales.params
    str_prime = None
    if deformation_pattern(p) == "stretching":
        a2, b2 = p.F11**2, p.F22**2
        rhs = 1.0 + (a2 * (1.0 - w) + b2 * (w + a2)) / (1.0 + a2)
        str_prime = rhs - w * (R - 1.0)
    return ElasticMachCheck(gas, str_prime)


class LienardChipart(NamedTuple):
    coeffs: tuple  # (b0, b1, b2, b3, b4)
    passed: bool
    margins: tuple  # (b0, b1, b2, b3, b4, b1(b2 b3 - b1 b4) - b3^2 b0)


def quartic_coefficients(scales: DerivedScales):
    M, a1, a2 = scales.M, scales.a1, scales.a2
    b2_ = scales.beta**2
    Ms = scales.M_star
    b4 = M * (a1 / b2_ + a2)
    b3 = 2.0 * (1.0 + Ms * a2)
    b2 = (2.0 * M / b2_) * (2.0 * b2_ * scales.d0_tilde - a1)
    b1 = 2.0 * (1.0 - Ms * a2)
    b0 = M * (a1 / b2_ - a2)
    return (b0, b1, b2, b3, b4)


def lienard_chipart(scales: DerivedScales) -> LienardChipart:
    """Lienard-Chipart test on the quartic factor of the boundary-matrix spectrum."""
    b0, b1, b2, b3, b4 = coeffs = quartic_coefficients(scales)
    hurwitz = b1 * (b2 * b3 - b1 * b4) - b3 * b3 * b0
    margins = (b0, b1, b2, b3, b4, hurwitz)
    return LienardChipart(coeffs, all(m > 0 for m in margins), margins)


class QuarticRoots(NamedTuple):
    roots: np.ndarray
    left_half_plane: bool


def quartic_root_oracle(coeffs, rtol=1e-7, lead_tol=1e-12) -> QuarticRoots:
    """Roots of ``b4 x^4 + b3 x^3 + b2 x^2 + b1 x + b0`` from a companion matrix.

    ``coeffs`` is ``(b0, b1, b2, b3, b4)``. The flag is true when every real
    part is below ``-rtol * max(1, max |root|)``. A numerically vanishing
    leading coefficient triggers a :class:`DegenerateLeadingCoefficient`
    warning and the cubic is solved instead.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (5,) or not np.all(np.isfinite(c)):
        raise InvalidInput("expected five finite coefficients b0..b4")
    if abs(c[4]) <= lead_tol * max(1.0, float(np.abs(c).max())):
        warnings.warn(f"|b4| = {abs(c[4])} is negligible; solving the cubic",
                      DegenerateLeadingCoefficient, stacklevel=2)
        c = c[:4]
    n = len(c) - 1
    companion = np.zeros((n, n))
    companion[1:, :-1] = np.eye(n - 1)
    companion[:, -1] = -c[:-1] / c[-1]
    roots = np.linalg.eigvals(companion)
    tol = rtol * max(1.0, float(np.abs(roots).max()))
    return QuarticRoots(roots, bool(roots.real.max() < -tol))


class AppendixB(NamedTuple):
    D: float
    factors: tuple
    sos_residual: float


def _quadratic(m1, m2, k2, Z):
    return (
        ((m1 + m2) ** 2 - 4 * k2) * Z * Z
        + 2 * ((m2 - m1) * (m1 + k2) + 2 * k2 - 2 * m1 * m2) * Z
        + (m1 + k2) ** 2
    )


def _sos(m1, m2, k2, Z):
    return 4 * k2 * Z * (1 - Z) + ((m1 + m2) * Z - (m1 + k2)) ** 2 + 4 * m2 * k2 * Z


def convexity_quadratic(scales: DerivedScales, Z):
    """The quadratic in ``Z`` whose positivity on (0, 1) is equivalent to D > 0."""
    return _quadratic(scales.M1**2, scales.M2**2, scales.kappa**2, Z)


def convexity_sos(scales: DerivedScales, Z):
    """Sum-of-squares form of :func:`convexity_quadratic`, evidently positive on (0, 1)."""
    return _sos(scales.M1**2, scales.M2**2, scales.kappa**2, Z)


def appendix_b_margin(scales: DerivedScales) -> AppendixB:
    """Value ``D``, its two factors, and the gap between the quadratic and its SOS form.

    The gap is computed in exact rational arithmetic on the floating-point
    inputs: near the minimum of the quadratic its terms cancel by several
    orders of magnitude and a double-precision evaluation would report
    rounding noise rather than a property of the identity.
    """
    M = scales.M
    core = M * scales.sigma - abs(scales.ell0) * scales.beta
    shift = scales.M_star**2 * scales.M_tilde
    f1, f2 = core - shift, core + shift
    args = [Fraction(x) for x in (scales.M1**2, scales.M2**2, scales.kappa**2,
                                  scales.M_tilde**2)]
    q, sos = _quadratic(*args), _sos(*args)
    denom = max(abs(q), abs(sos))
    residual = float(abs(q - sos) / denom) if denom else 0.0
    return AppendixB(f1 * f2, (f1, f2), residual)


@dataclass(frozen=True)
class EnergyVerdict:
    usc_margin: float
    lc_pass: bool
    lc_coeffs: tuple
    quartic_roots: np.ndarray
    d_value: float
    status: str

    @property
    def stable(self):
        return self.usc_margin > 0

    def to_dict(self):
        return {
            "usc_margin": self.usc_margin,
            "status": self.status,
            "lc_pass": self.lc_pass,
            "lc_coeffs": list(self.lc_coeffs),
            "quartic_roots": [[z.real, z.imag] for z in self.quartic_roots],
            "d_value": self.d_value,
        }


def energy_verdict(scales: DerivedScales, band=MARGIN_BAND) -> EnergyVerdict:
    margin = uniform_stability_margin(scales)
    lc = lienard_chipart(scales)
    roots = quartic_root_oracle(lc.coeffs).roots
    return EnergyVerdict(
        margin, lc.passed, lc.coeffs, roots, appendix_b_margin(scales).D,
        classify_margin(margin, band),
    )


# ---------------------------------------------------------------------------
# convex equations of state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Theorem2Verdict:
    status: str
    params: ShockParameters
    lax_margins: tuple
    usc_margin: float
    gas_prime_margin: float
    R_Mtilde_sq: float
    d_value: float
    lc_pass: bool

    def to_dict(self):
        return {
            "status": self.status,
            "params": self.params.to_dict(),
            "lax_margins": list(self.lax_margins),
            "usc_margin": self.usc_margin,
            "gas_prime_margin": self.gas_prime_margin,
            "R_Mtilde_sq": self.R_Mtilde_sq,
            "d_value": self.d_value,
            "lc_pass": self.lc_pass,
        }


def theorem2_verdict(upstream, rho_plus, eos, rtol=1e-12) -> Theorem2Verdict:
    """Full pipeline for a compressive jump with a convex equation of state.

    Solves the jump relations, then checks Lax admissibility, ``R Mt^2 <= 1``,
    ``D > 0`` and the stability margin. All of them must hold for a convex
    pressure law; a failure raises :class:`NumericalInconsistency`.
    """
    if not eos.is_convex:
        raise ConvexityRequired("equation of state is not convex")
    if not rho_plus > upstream.rho:
        raise InvalidInput("a compressive jump needs rho_plus > upstream density")
    rh = solve_rankine_hugoniot(upstream, rho_plus, eos)
    params = rh.params
    lax = check_lax(params)
    scales = derived_scales(params)
    margin = uniform_stability_margin(scales)
    elastic = elastic_mach_check(scales)
    r_w = params.R * scales.M_tilde**2
    d = appendix_b_margin(scales).D
    lc = lienard_chipart(scales)
    failures = []
    if not lax.admissible:
        failures.append(f"Lax margins {lax.margins}")
    if r_w > 1.0 + rtol:
        failures.append(f"R*Mt^2 = {r_w} > 1")
    if not d > 0:
        failures.append(f"D = {d} <= 0")
    if not margin > 0:
        failures.append(f"stability margin {margin} <= 0")
    if not elastic.gas_prime_margin > 0:
        failures.append(f"elastic Mach bound margin {elastic.gas_prime_margin} <= 0")
    if not lc.passed:
        failures.append("Lienard-Chipart test failed")
    if failures:
        raise NumericalInconsistency("convex compressive shock failed: " + "; ".join(failures))
    return Theorem2Verdict("uniform", params, lax.margins, margin,
                           elastic.gas_prime_margin, r_w, d, lc.passed)
