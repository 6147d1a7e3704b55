"""Physical and dimensionless shock states.

Equations of state, side states, the six-number dimensionless description of a
rectilinear shock (downstream Mach number ``M``, density ratio ``R`` and the
scaled deformation gradient), the derived constants used by every stability
test, and the Rankine-Hugoniot / Lax machinery that links them.

State vectors follow the ordering ``(p, v1, v2, F11, F21, F12, F22)`` wherever
a 7-vector appears; deformation gradients are 2x2 with ``F[i][j] = F_ij``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import ClassVar, NamedTuple, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    Degenerate,
    DegenerateDeformation,
    FrameError,
    InvalidInput,
    InvalidParameters,
    LaxViolated,
    NoRealRoot,
    NonHyperbolic,
    NumericalInconsistency,
    OutOfRange,
)

RESIDUAL_RTOL = 1e-10
IDENTITY_ATOL = 1e-12


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInput(f"{name} must be finite, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# equations of state
# ---------------------------------------------------------------------------

class EOSValue(NamedTuple):
    p: float
    c2: float
    convex_ok: bool


@dataclass(frozen=True)
class PolytropicEOS:
    """``p = A * rho**gamma``."""

    A: float
    gamma: float
    kind: ClassVar[str] = "polytropic"

    def __post_init__(self):
        A = _finite("A", self.A)
        gamma = _finite("gamma", self.gamma)
        if A <= 0:
            raise InvalidInput(f"pressure scale A must be positive, got {A}")
        if gamma <= 1:
            raise InvalidInput(f"adiabatic exponent must exceed 1, got {gamma}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "gamma", gamma)

    @property
    def is_convex(self) -> bool:
        return True

    def check_range(self, rho):
        if not rho > 0:
            raise OutOfRange(f"density must be positive, got {rho}")

    def pressure(self, rho):
        return self.A * rho**self.gamma

    def dpdrho(self, rho):
        return self.A * self.gamma * rho ** (self.gamma - 1.0)

    def d2pdrho2(self, rho):
        return self.A * self.gamma * (self.gamma - 1.0) * rho ** (self.gamma - 2.0)

    def to_dict(self):
        return {"kind": self.kind, "A": self.A, "gamma": self.gamma}


@dataclass(frozen=True)
class TabulatedEOS:
    """Pressure given as monotone samples ``(rho_k, p_k)``.

    Interpolation is monotone cubic (PCHIP), which keeps ``p'(rho) >= 0``
    between knots. Convexity is judged on the second divided differences of
    the table, not on the interpolant.
    """

    rho: tuple
    p: tuple
    convexity_tol: float = 1e-12
    kind: ClassVar[str] = "table"

    def __post_init__(self):
        rho = tuple(_finite("rho sample", r) for r in self.rho)
        p = tuple(_finite("p sample", q) for q in self.p)
        if len(rho) != len(p) or len(rho) < 3:
            raise InvalidInput("table needs at least 3 (rho, p) pairs of equal length")
        if rho[0] <= 0 or any(b <= a for a, b in zip(rho, rho[1:])):
            raise InvalidInput("table densities must be positive and strictly increasing")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise NonHyperbolic("tabulated pressure must be strictly increasing in density")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "p", p)

    @cached_property
    def _interp(self):
        return PchipInterpolator(np.array(self.rho), np.array(self.p), extrapolate=False)

    @cached_property
    def _second_divided(self):
        r = np.array(self.rho)
        q = np.array(self.p)
        slopes = np.diff(q) / np.diff(r)
        return 2.0 * np.diff(slopes) / (r[2:] - r[:-2])

    @property
    def is_convex(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self._second_divided))))
        return bool(np.all(self._second_divided >= -self.convexity_tol * scale))

    def check_range(self, rho):
        if not (self.rho[0] <= rho <= self.rho[-1]):
            raise OutOfRange(
                f"density {rho} outside table range [{self.rho[0]}, {self.rho[-1]}]"
            )

    def pressure(self, rho):
        self.check_range(rho)
        return float(self._interp(rho))

    def dpdrho(self, rho):
        self.check_range(rho)
        return float(self._interp(rho, 1))

    def d2pdrho2(self, rho):
        # dd[i] is centred on knot i+1; take the two centred on the interval ends
        self.check_range(rho)
        dd = self._second_divided
        j = int(np.searchsorted(self.rho, rho, side="right")) - 1
        j = min(max(j, 0), len(self.rho) - 2)
        lo, hi = max(j - 1, 0), min(j, len(dd) - 1)
        return float(np.min(dd[lo : hi + 1]))

    def to_dict(self):
        return {"kind": self.kind, "rho": list(self.rho), "p": list(self.p)}


def eos_eval(eos, rho, tol=IDENTITY_ATOL) -> EOSValue:
    """Pressure, sound speed squared and a local convexity flag at ``rho``."""
    rho = _finite("rho", rho)
    if rho <= 0:
        raise OutOfRange(f"density must be positive, got {rho}")
    eos.check_range(rho)
    p = eos.pressure(rho)
    c2 = eos.dpdrho(rho)
    if not c2 > 0:
        raise NonHyperbolic(f"p'(rho) = {c2} <= 0 at rho = {rho}")
    convex_ok = eos.d2pdrho2(rho) >= -tol * max(1.0, abs(c2) / rho)
    return EOSValue(p, c2, bool(convex_ok))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def _as_matrix(F):
    F = np.asarray(F, dtype=float)
    if F.shape != (2, 2):
        raise InvalidInput(f"deformation gradient must be 2x2, got shape {F.shape}")
    if not np.all(np.isfinite(F)):
        raise InvalidInput("deformation gradient has non-finite entries")
    return F


@dataclass(frozen=True)
class SideState:
    """Constant state on one side of the front (physical units)."""

    rho: float
    v: tuple
    F: tuple
    allow_degenerate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        rho = _finite("rho", self.rho)
        if rho <= 0:
            raise InvalidInput(f"density must be positive, got {rho}")
        v = tuple(_finite("v", x) for x in self.v)
        if len(v) != 2:
            raise InvalidInput("velocity must have two components")
        F = _as_matrix(self.F)
        if np.linalg.det(F) == 0 and not self.allow_degenerate:
            raise DegenerateDeformation("det F = 0; pass allow_degenerate for the gas limit")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "F", tuple(map(tuple, F.tolist())))

    @property
    def F_matrix(self):
        return np.array(self.F)

    def to_dict(self):
        return {"rho": self.rho, "v": list(self.v), "F": [list(r) for r in self.F]}


@dataclass(frozen=True)
class ShockParameters:
    """Dimensionless description of a rectilinear shock.

    ``F11 .. F22`` are the entries of the scaled downstream deformation
    gradient (physical gradient divided by the downstream sound speed).
    """

    M: float
    R: float
    F11: float
    F12: float
    F21: float
    F22: float
    M_minus: Optional[float] = None
    allow_degenerate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("M", "R", "F11", "F12", "F21", "F22"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.M_minus is not None:
            object.__setattr__(self, "M_minus", _finite("M_minus", self.M_minus))
        if not self.M > 0:
            raise InvalidParameters(f"M must be positive, got {self.M}")
        if not self.R > 0:
            raise InvalidParameters(f"R must be positive, got {self.R}")
        if self.R == 1.0:
            raise InvalidParameters("R = 1 (zero density jump) is not a shock")
        if self.kappa == 0.0 and not self.allow_degenerate:
            raise InvalidParameters("det F = 0; pass allow_degenerate for the gas limit")

    @classmethod
    def from_matrix(cls, M, R, F, M_minus=None, allow_degenerate=False):
        F = _as_matrix(F)
        return cls(M, R, F[0, 0], F[0, 1], F[1, 0], F[1, 1], M_minus, allow_degenerate)

    @property
    def F(self):
        return np.array([[self.F11, self.F12], [self.F21, self.F22]])

    @property
    def kappa(self):
        return self.F11 * self.F22 - self.F12 * self.F21

    @property
    def rarefaction(self):
        return self.R < 1.0

    def replace(self, **changes):
        values = {
            "M": self.M, "R": self.R, "F11": self.F11, "F12": self.F12,
            "F21": self.F21, "F22": self.F22, "M_minus": self.M_minus,
            "allow_degenerate": self.allow_degenerate,
        }
        values.update(changes)
        return ShockParameters(**values)

    def to_dict(self):
        return {
            "M": self.M, "R": self.R, "F11": self.F11, "F12": self.F12,
            "F21": self.F21, "F22": self.F22, "M_minus": self.M_minus,
        }


@dataclass(frozen=True)
class DerivedScales:
    params: ShockParameters
    M1: float
    M2: float
    M_star: float
    beta: float
    sigma: float
    ell0: float
    kappa: float
    M_tilde: float
    d0: float
    a0: float
    d0_tilde: float
    a1: float
    a2: float
    K: float
    K1: float
    K2: float

    @property
    def M(self):
        return self.params.M

    @property
    def R(self):
        return self.params.R

    def to_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "params"}
        out["params"] = self.params.to_dict()
        return out


def derived_scales(params: ShockParameters, atol=IDENTITY_ATOL) -> DerivedScales:
    """All secondary constants of the linearized problem.

    Raises
    ------
    LaxViolated
        If ``M <= M1`` or ``M >= M_star``; the square roots of ``M**2 - M1**2``
        and ``M_star**2 - M**2`` are then not real.
    """
    M, R = params.M, params.R
    F11, F12, F21, F22 = params.F11, params.F12, params.F21, params.F22
    M1sq = F11**2 + F12**2
    M2sq = F21**2 + F22**2
    Mstar_sq = 1.0 + M1sq
    ell0 = F11 * F21 + F12 * F22
    kappa = params.kappa

    wsq = M * M - M1sq
    beta_sq = Mstar_sq - M * M
    if not wsq > 0 or not beta_sq > 0:
        raise LaxViolated(
            f"M = {M} outside ({math.sqrt(M1sq)}, {math.sqrt(Mstar_sq)})"
        )

    sigma_sq = Mstar_sq + M2sq + kappa**2
    alt = Mstar_sq * (1.0 + M2sq) - ell0**2
    if abs(sigma_sq - alt) > atol * sigma_sq:
        raise NumericalInconsistency(f"sigma^2 identities disagree: {sigma_sq} vs {alt}")

    Mstar = math.sqrt(Mstar_sq)
    beta = math.sqrt(beta_sq)
    sigma = math.sqrt(sigma_sq)
    d0 = (Mstar_sq + M * M) / (2.0 * M * M)
    a0 = -beta_sq * R / (2.0 * M * M)
    d0_tilde = d0 / Mstar
    a2 = ell0 * beta / (Mstar * M * sigma)
    a1 = (
        beta_sq * d0_tilde
        + a0 * (wsq + M2sq / R) * Mstar**3 / sigma_sq
        + a2**2 * Mstar * (beta_sq + 0.5 * M * M)
    )
    K = R * wsq + M2sq
    K2 = 1.0 + M2sq
    K1 = M * M * K2 / Mstar_sq
    return DerivedScales(
        params=params,
        M1=math.sqrt(M1sq),
        M2=math.sqrt(M2sq),
        M_star=Mstar,
        beta=beta,
        sigma=sigma,
        ell0=ell0,
        kappa=kappa,
        M_tilde=math.sqrt(wsq),
        d0=d0,
        a0=a0,
        d0_tilde=d0_tilde,
        a1=a1,
        a2=a2,
        K=K,
        K1=K1,
        K2=K2,
    )


# ---------------------------------------------------------------------------
# characteristics and Lax conditions
# ---------------------------------------------------------------------------

def characteristic_speeds(rho, v_N, F1N, F2N, c):
    """The seven normal characteristic speeds, ascending.

    The elastic pair travels at ``sqrt(F1N**2 + F2N**2)`` relative to the flow
    and the acoustic pair at ``sqrt(c**2 + F1N**2 + F2N**2)``; the remaining
    speed ``v_N`` is triple.
    """
    rho = _finite("rho", rho)
    c = _finite("c", c)
    v_N, F1N, F2N = (_finite(n, x) for n, x in (("v_N", v_N), ("F1N", F1N), ("F2N", F2N)))
    if rho <= 0 or c <= 0:
        raise InvalidInput("density and sound speed must be positive")
    elastic_sq = F1N**2 + F2N**2
    if elastic_sq == 0:
        raise DegenerateDeformation("F1N = F2N = 0 (vortex-sheet degeneracy)")
    e = math.sqrt(elastic_sq)
    a = math.sqrt(c * c + elastic_sq)
    return (v_N - a, v_N - e, v_N, v_N, v_N, v_N + e, v_N + a)


class LaxCheck(NamedTuple):
    admissible: bool
    margins: tuple  # (M - M1, M_star - M, M_minus - M/M_tilde or None)


def check_lax(params: ShockParameters) -> LaxCheck:
    M1 = math.hypot(params.F11, params.F12)
    Mstar = math.sqrt(1.0 + M1 * M1)
    M = params.M
    m1 = M - M1
    m2 = Mstar - M
    if params.M_minus is None:
        m3 = None
    elif M * M - M1 * M1 > 0:
        m3 = params.M_minus - M / math.sqrt(M * M - M1 * M1)
    else:
        m3 = -math.inf
    present = [m for m in (m1, m2, m3) if m is not None]
    return LaxCheck(all(m > 0 for m in present), (m1, m2, m3))


# ---------------------------------------------------------------------------
# Rankine-Hugoniot
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RHSolution:
    """Result of :func:`solve_rankine_hugoniot`.

    Velocities of ``upstream`` and ``downstream`` are in the frame of the
    input upstream state; ``shock_speed`` is the front velocity in that frame.
    """

    upstream: SideState
    downstream: SideState
    params: ShockParameters
    shock_speed: float
    rarefaction: bool
    residuals: tuple

    def to_dict(self):
        return {
            "upstream": self.upstream.to_dict(),
            "downstream": self.downstream.to_dict(),
            "params": self.params.to_dict(),
            "shock_speed": self.shock_speed,
            "rarefaction": self.rarefaction,
            "residuals": list(self.residuals),
        }


def rh_residuals(upstream, downstream, eos, shock_speed=0.0):
    """Relative residuals of the four jump relations in the shock frame.

    Returns ``(mass, normal momentum, [F2j], [rho F1j])``, each scaled by the
    magnitude of the quantities it balances.
    """
    rm, rp = upstream.rho, downstream.rho
    wm = upstream.v[0] - shock_speed
    wp = downstream.v[0] - shock_speed
    Fm, Fp = upstream.F_matrix, downstream.F_matrix
    pm, pp = eos.pressure(rm), eos.pressure(rp)
    R = rp / rm
    mass = abs(R - wm / wp) / abs(R)
    lhs = R * (wp**2 - (Fp[0, 0] ** 2 + Fp[0, 1] ** 2)) * (rp - rm)
    momentum = abs(lhs - (pp - pm)) / max(abs(pp - pm), abs(lhs))
    fscale = max(1.0, float(np.abs(Fm).max()), float(np.abs(Fp).max()))
    tangential = float(np.abs(Fp[1] - Fm[1]).max()) / fscale
    normal = float(np.abs(rp * Fp[0] - rm * Fm[0]).max()) / (fscale * max(rm, rp))
    return (mass, momentum, tangential, normal)


def solve_rankine_hugoniot(upstream: SideState, rho_plus, eos, allow_degenerate=False,
                           rtol=RESIDUAL_RTOL) -> RHSolution:
    """Downstream state of a stationary-in-its-own-frame 1-shock.

    The second row of ``F`` is continuous, the first row scales with
    ``rho_minus / rho_plus``, and the relative normal velocity behind the front
    follows from the normal momentum balance. The tangential velocity is
    carried over unchanged; the upstream normal velocity only fixes the frame
    (the front moves at ``shock_speed``).

    Rarefaction jumps (``rho_plus < upstream.rho``) are solved and tagged.
    """
    rho_plus = _finite("rho_plus", rho_plus)
    if rho_plus <= 0:
        raise InvalidInput(f"rho_plus must be positive, got {rho_plus}")
    rm = upstream.rho
    if rho_plus == rm:
        raise Degenerate("rho_plus equals upstream density: [rho] = 0 is not a shock")
    Fm = upstream.F_matrix
    Fp = Fm.copy()
    Fp[0] *= rm / rho_plus

    pm, c2m, _ = eos_eval(eos, rm)
    pp, c2p, _ = eos_eval(eos, rho_plus)
    R = rho_plus / rm
    jump = (pp - pm) / (R * (rho_plus - rm))
    if not jump > 0:
        raise NoRealRoot(f"[p]/(R[rho]) = {jump} <= 0: jump data inconsistent")
    wp = math.sqrt(Fp[0, 0] ** 2 + Fp[0, 1] ** 2 + jump)
    wm = R * wp
    shock_speed = upstream.v[0] - wm

    degenerate = allow_degenerate or upstream.allow_degenerate
    downstream = SideState(rho_plus, (shock_speed + wp, upstream.v[1]), Fp,
                           allow_degenerate=degenerate)
    residuals = rh_residuals(upstream, downstream, eos, shock_speed)
    if max(residuals) > rtol:
        raise NumericalInconsistency(f"Rankine-Hugoniot residuals {residuals} exceed {rtol}")

    cp = math.sqrt(c2p)
    params = ShockParameters.from_matrix(
        wp / cp, R, Fp / cp, M_minus=wm / math.sqrt(c2m), allow_degenerate=degenerate
    )
    return RHSolution(upstream, downstream, params, shock_speed, R < 1.0, residuals)


def nondimensionalize(upstream: SideState, downstream: SideState, eos, tol=1e-12,
                      allow_degenerate=False) -> ShockParameters:
    """Scale a pair of constant states to :class:`ShockParameters`.

    The front velocity is recovered from the mass flux balance, so the states
    may be given in any frame moving along the normal; a common tangential
    velocity is removed by a Galilean shift.
    """
    vm, vp = upstream.v, downstream.v
    if abs(vp[1] - vm[1]) > tol * max(1.0, abs(vp[1]), abs(vm[1])):
        raise FrameError(f"tangential velocity jumps: {vm[1]} vs {vp[1]}")
    rm, rp = upstream.rho, downstream.rho
    if rp == rm:
        raise Degenerate("[rho] = 0")
    shock_speed = (rp * vp[0] - rm * vm[0]) / (rp - rm)
    wm = vm[0] - shock_speed
    wp = vp[0] - shock_speed
    if not (wm > 0 and wp > 0):
        raise InvalidParameters("flow must cross the front from upstream to downstream")
    _, c2m, _ = eos_eval(eos, rm)
    _, c2p, _ = eos_eval(eos, rp)
    cp = math.sqrt(c2p)
    degenerate = allow_degenerate or upstream.allow_degenerate or downstream.allow_degenerate
    return ShockParameters.from_matrix(
        wp / cp, rp / rm, downstream.F_matrix / cp,
        M_minus=wm / math.sqrt(c2m), allow_degenerate=degenerate,
    )
