"""Combine the individual stability tests into one verdict per parameter point."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .energy import (
    MARGIN_BAND,
    classify_margin,
    deformation_pattern,
    lienard_chipart,
    uniform_stability_margin,
)
from .errors import InvalidInput, NumericalFailure, ScanInconclusive
from .lopatinski import GridConfig, classify_spectral, classify_stretching
from .states import ShockParameters, check_lax, derived_scales
from .symmetrizer import build_symmetrizer, dissipativity_probe

METHODS = ("energy", "lc", "spectral", "symmetrizer")
DEFAULT_METHODS = ("energy", "lc")
CLASSES = ("uniform", "neutral", "violent", "lax_fail", "indeterminate")


def parse_methods(methods) -> tuple:
    if isinstance(methods, str):
        methods = [m.strip() for m in methods.split(",") if m.strip()]
    methods = tuple(methods)
    unknown = sorted(set(methods) - set(METHODS))
    if unknown or not methods:
        raise InvalidInput(f"methods must be a nonempty subset of {METHODS}, got {methods}")
    return tuple(m for m in METHODS if m in methods)


@dataclass
class PointVerdict:
    params: ShockParameters
    lax_ok: bool
    lax_margins: tuple
    cls: str = "indeterminate"
    energy_margin: Optional[float] = None
    energy_status: Optional[str] = None
    lc_pass: Optional[bool] = None
    spectral_class: Optional[str] = None
    closed_form: Optional[dict] = None
    spectral: Optional[dict] = None
    symmetrizer: Optional[dict] = None
    agree: bool = True
    conflicts: list = field(default_factory=list)

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "class": self.cls,
            "lax_ok": self.lax_ok,
            "lax_margins": list(self.lax_margins),
            "energy_margin": self.energy_margin,
            "energy_status": self.energy_status,
            "lc_pass": self.lc_pass,
            "spectral_class": self.spectral_class,
            "closed_form": self.closed_form,
            "spectral": self.spectral,
            "symmetrizer": self.symmetrizer,
            "agree": self.agree,
            "conflicts": list(self.conflicts),
        }


def classify_point(params: ShockParameters, methods=DEFAULT_METHODS, grid=None,
                   alpha=2.0, band=MARGIN_BAND, strict=True, probe_samples=1000
                   ) -> PointVerdict:
    """Run the requested tests at one point and reconcile their answers.

    The reported class comes from the spectral scan when requested, otherwise
    from the closed form for stretching/anti-diagonal deformations, otherwise
    from the energy margin (a negative margin is then only ``indeterminate``,
    since the energy condition is sufficient in general). With
    ``strict=False`` an inconclusive scan is recorded instead of raised.
    """
    methods = parse_methods(methods)
    lax = check_lax(params)
    out = PointVerdict(params, lax.admissible, lax.margins)
    if not lax.admissible:
        out.cls = "lax_fail"
        return out

    scales = derived_scales(params)
    margin = uniform_stability_margin(scales)
    status = classify_margin(margin, band)
    if "energy" in methods:
        out.energy_margin = margin
        out.energy_status = status
    if "lc" in methods:
        out.lc_pass = lienard_chipart(scales).passed

    pattern = deformation_pattern(params)
    closed = None
    if pattern is not None:
        closed = classify_stretching(scales)
        out.closed_form = closed.to_dict()

    if "spectral" in methods:
        try:
            sv = classify_spectral(scales, grid)
            out.spectral = sv.to_dict()
            out.spectral_class = sv.cls.value
        except ScanInconclusive as exc:
            if strict:
                raise
            out.spectral = {
                "error": str(exc),
                "witness": None if exc.witness is None else exc.witness.to_dict(),
                "min_abs_det": exc.min_abs_det,
            }
            out.spectral_class = "indeterminate"
    elif closed is not None:
        out.spectral_class = closed.cls.value

    if "symmetrizer" in methods:
        try:
            bundle = build_symmetrizer(scales, alpha)
            cert = bundle.certificate()
            probe = dissipativity_probe(bundle, probe_samples)
            cert["probe_minimum"] = probe.minimum
            cert["probe_identity_defect"] = probe.identity_defect
            cert["built"] = True
        except NumericalFailure as exc:
            cert = {"built": False, "error": f"{type(exc).__name__}: {exc}"}
        out.symmetrizer = cert

    if out.spectral_class in ("uniform", "neutral", "violent"):
        out.cls = out.spectral_class
    elif status == "stable":
        out.cls = "uniform"
    else:
        out.cls = "indeterminate"

    out.conflicts = _conflicts(out, margin, status, closed)
    out.agree = not out.conflicts
    return out


def _conflicts(v: PointVerdict, margin, status, closed):
    msgs = []
    decided = status != "indeterminate"
    stable = status == "stable"
    if v.lc_pass is not None and decided and v.lc_pass != stable:
        msgs.append(f"lc_pass={v.lc_pass} but energy margin {margin:.6g}")
    if v.spectral is not None and v.spectral_class != "indeterminate":
        if decided and (v.spectral_class == "uniform") != stable:
            msgs.append(f"spectral {v.spectral_class} but energy margin {margin:.6g}")
        if closed is not None and v.spectral_class != closed.cls.value:
            msgs.append(f"spectral {v.spectral_class} but closed form {closed.cls.value}")
    elif v.spectral is not None:
        msgs.append("spectral scan inconclusive")
    if v.symmetrizer is not None and decided:
        certified = bool(v.symmetrizer.get("built")) and (
            v.symmetrizer.get("h_positive") == "positive"
            and v.symmetrizer.get("probe_minimum", 0.0) > 0
        )
        if certified != stable:
            msgs.append(f"symmetrizer certificate {certified} but energy margin {margin:.6g}")
    return msgs


def classify_values(values: tuple, methods, grid_dict, alpha, band, allow_degenerate,
                    M_minus=None, probe_samples=1000):
    """Process-pool friendly wrapper; ``values`` is ``(M, R, F11, F12, F21, F22)``."""
    params = ShockParameters(*values, M_minus=M_minus, allow_degenerate=allow_degenerate)
    grid = GridConfig(**grid_dict) if grid_dict else None
    return classify_point(params, methods, grid, alpha, band, strict=False,
                          probe_samples=probe_samples)
