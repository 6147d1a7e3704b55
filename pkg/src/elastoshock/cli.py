"""Command-line interface.

Subcommands ``classify``, ``scan``, ``rh`` and ``symmetrizer``. Exit status is
0 on success, 2 for invalid input and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .energy import MARGIN_BAND, theorem2_verdict
from .errors import ConvexityRequired, InvalidInput, NumericalFailure
from .lopatinski import GridConfig, iter_scan_rows
from .scan import ScanConfig, run_scan
from .states import (
    ShockParameters,
    check_lax,
    derived_scales,
    nondimensionalize,
    solve_rankine_hugoniot,
)
from .symmetrizer import build_symmetrizer, dissipativity_probe
from .verdict import DEFAULT_METHODS, classify_point

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _emit(obj, out=None):
    text = json.dumps(io.jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _add_param_flags(p, required=True):
    p.add_argument("--M", type=float, required=required, help="downstream Mach number")
    p.add_argument("--R", type=float, required=required, help="density ratio rho+/rho-")
    for name in ("F11", "F12", "F21", "F22"):
        p.add_argument(f"--{name}", type=float, default=0.0,
                       help=f"scaled deformation entry {name} (default 0)")
    p.add_argument("--M-minus", dest="M_minus", type=float, default=None,
                   help="upstream Mach number (only used for the Lax check)")
    p.add_argument("--allow-degenerate", action="store_true",
                   help="admit det F = 0 (gas-dynamics limit)")


def _params_from_args(args) -> ShockParameters:
    return ShockParameters(args.M, args.R, args.F11, args.F12, args.F21, args.F22,
                           args.M_minus, allow_degenerate=args.allow_degenerate)


def cmd_classify(args):
    params = _params_from_args(args)
    grid = GridConfig(n_polar=args.grid, n_azimuth=args.grid) if args.grid else None
    v = classify_point(params, args.methods, grid=grid, alpha=args.alpha, band=args.tol,
                       strict=True)
    _emit(v.to_dict(), args.out)
    if args.scan_out:
        if not v.lax_ok:
            raise InvalidInput("no frequency scan for a Lax-inadmissible point")
        with open(args.scan_out, "w", encoding="utf-8") as fh:
            fh.write("eta,xi,omega,abs_det,class_flag\n")
            for e, x, w, a, flag in iter_scan_rows(derived_scales(params), grid):
                fh.write(f"{e:.17g},{x:.17g},{w:.17g},{a:.17g},{flag}\n")
    return EXIT_OK


def cmd_scan(args):
    data = io.load(args.config)
    cfg = ScanConfig.from_dict(data)
    fmt = args.format or cfg.output_format
    out = args.out or cfg.output_path
    jobs = max(1, args.jobs)
    if args.tol is not None:
        cfg = ScanConfig(**{**cfg.__dict__, "tol": args.tol})
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            report = run_scan(cfg, fh, jobs, fmt)
        print(json.dumps(report.summary(), sort_keys=True))
    else:
        report = run_scan(cfg, sys.stdout, jobs, fmt)
        print(json.dumps(report.summary(), sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_rh(args):
    data = io.validate(io.load(args.input), io.RH_SCHEMA, "rh input")
    degenerate = data.get("allow_degenerate", args.allow_degenerate)
    upstream = io.parse_state(data["upstream"], degenerate)
    eos = io.parse_eos(data["eos"])
    if "downstream" in data:
        downstream = io.parse_state(data["downstream"], degenerate)
        params = nondimensionalize(upstream, downstream, eos, allow_degenerate=degenerate)
        out = {"params": params.to_dict()}
    else:
        sol = solve_rankine_hugoniot(upstream, data["rho_plus"], eos, allow_degenerate=degenerate)
        params = sol.params
        out = sol.to_dict()
        if eos.is_convex and not sol.rarefaction:
            try:
                out["theorem2"] = theorem2_verdict(upstream, data["rho_plus"], eos).to_dict()
            except ConvexityRequired:
                pass
    lax = check_lax(params)
    out["lax_ok"] = lax.admissible
    out["lax_margins"] = list(lax.margins)
    _emit(out, args.out)
    return EXIT_OK


def cmd_symmetrizer(args):
    G0 = None
    alpha = args.alpha
    if args.input:
        data = io.load(args.input)
        params = io.parse_params(data, args.allow_degenerate)
        G0 = data.get("G0")
        alpha = data.get("alpha", alpha)
    else:
        if args.M is None or args.R is None:
            raise InvalidInput("give --M and --R, or --input")
        params = _params_from_args(args)
    scales = derived_scales(params)
    bundle = build_symmetrizer(scales, alpha, None if G0 is None else np.array(G0, float))
    probe = dissipativity_probe(bundle, args.samples, args.seed)
    out = {"params": params.to_dict(), **bundle.to_dict()}
    out["probe"] = {"minimum": probe.minimum, "identity_defect": probe.identity_defect,
                    "samples": probe.samples, "seed": args.seed}
    _emit(out, args.out)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="elastoshock",
        description="Stability classification of rectilinear shocks in 2D elastodynamics.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify one parameter point")
    _add_param_flags(c)
    c.add_argument("--methods", default=",".join(DEFAULT_METHODS),
                   help="comma list from energy,lc,spectral,symmetrizer")
    c.add_argument("--alpha", type=float, default=2.0)
    c.add_argument("--tol", type=float, default=MARGIN_BAND,
                   help="margins with |value| below this are indeterminate")
    c.add_argument("--grid", type=int, default=None,
                   help="spectral grid resolution per chart axis (default 256)")
    c.add_argument("--scan-out", default=None,
                   help="write every scanned frequency as CSV to this path")
    c.add_argument("--out", default=None, help="write JSON here instead of stdout")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("scan", help="scan a parameter grid from a JSON config")
    s.add_argument("--config", required=True, help="config path, or - for stdin")
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=("csv", "json"), default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--tol", type=float, default=None)
    s.set_defaults(func=cmd_scan)

    r = sub.add_parser("rh", help="solve the jump relations for a given upstream state")
    r.add_argument("--input", default="-", help="JSON path, or - for stdin")
    r.add_argument("--allow-degenerate", action="store_true")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_rh)

    y = sub.add_parser("symmetrizer", help="build and certify the dissipative symmetrizer")
    _add_param_flags(y, required=False)
    y.add_argument("--input", default=None, help="JSON with M, R, F.. (and optional G0, alpha)")
    y.add_argument("--alpha", type=float, default=2.0)
    y.add_argument("--samples", type=int, default=1000)
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--out", default=None)
    y.set_defaults(func=cmd_symmetrizer)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
