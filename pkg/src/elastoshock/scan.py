"""Parameter-space scans over rectangular grids."""
from __future__ import annotations

import functools
import itertools
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .energy import MARGIN_BAND
from .errors import ConfigError, InvalidInput
from .io import CONFIG_SCHEMA, PARAM_NAMES, jsonable, validate
from .lopatinski import GridConfig
from .states import ShockParameters
from .verdict import DEFAULT_METHODS, PointVerdict, classify_values, parse_methods

CSV_HEADER = "F11,F12,F21,F22,M,R,lax_ok,energy_margin,lc_pass,spectral_class,agree"


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    steps: int

    def values(self):
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class ScanConfig:
    axes: tuple
    fixed: dict
    methods: tuple = DEFAULT_METHODS
    grid: Optional[dict] = None
    output_path: Optional[str] = None
    output_format: str = "csv"
    alpha: float = 2.0
    tol: float = MARGIN_BAND
    allow_degenerate: bool = False
    M_minus: Optional[float] = None

    @classmethod
    def from_dict(cls, d) -> "ScanConfig":
        validate(d, CONFIG_SCHEMA, "scan config")
        axes = tuple(Axis(a["name"], float(a["min"]), float(a["max"]), int(a["steps"]))
                     for a in d["axes"])
        fixed = dict(d.get("fixed", {}))
        M_minus = fixed.pop("M_minus", None)
        names = [a.name for a in axes] + list(fixed)
        if sorted(names) != sorted(PARAM_NAMES):
            dup = sorted(n for n, c in Counter(names).items() if c > 1)
            missing = sorted(set(PARAM_NAMES) - set(names))
            raise ConfigError(
                f"axes and fixed must cover {PARAM_NAMES} exactly once "
                f"(duplicated: {dup}, missing: {missing})"
            )
        grid = d.get("grid")
        if grid is not None:
            try:
                GridConfig(**grid)
            except InvalidInput as exc:
                raise ConfigError(f"grid: {exc}") from None
        out = d.get("output", {})
        return cls(
            axes=axes,
            fixed=fixed,
            methods=parse_methods(d.get("methods", DEFAULT_METHODS)),
            grid=grid,
            output_path=out.get("path"),
            output_format=out.get("format", "csv"),
            alpha=float(d.get("alpha", 2.0)),
            tol=float(d.get("tol", MARGIN_BAND)),
            allow_degenerate=bool(d.get("allow_degenerate", False)),
            M_minus=M_minus,
        )

    def to_dict(self):
        d = {
            "axes": [a.__dict__ for a in self.axes],
            "fixed": dict(self.fixed, **({} if self.M_minus is None else {"M_minus": self.M_minus})),
            "methods": list(self.methods),
            "output": {"format": self.output_format},
            "alpha": self.alpha,
            "tol": self.tol,
            "allow_degenerate": self.allow_degenerate,
        }
        if self.grid is not None:
            d["grid"] = dict(self.grid)
        if self.output_path is not None:
            d["output"]["path"] = self.output_path
        return d

    def points(self) -> list:
        """Grid points as ``(M, R, F11, F12, F21, F22)``; the last axis varies fastest."""
        pts = []
        for combo in itertools.product(*(a.values() for a in self.axes)):
            vals = dict(self.fixed)
            vals.update({a.name: float(x) for a, x in zip(self.axes, combo)})
            pts.append(tuple(float(vals[n]) for n in PARAM_NAMES))
        return pts

    def check_points(self, pts):
        for i, vals in enumerate(pts):
            try:
                ShockParameters(*vals, M_minus=self.M_minus,
                                allow_degenerate=self.allow_degenerate)
            except InvalidInput as exc:
                named = dict(zip(PARAM_NAMES, vals))
                raise ConfigError(f"grid point {i} {named}: {exc}") from None


@dataclass
class ScanReport:
    rows: list = field(default_factory=list)
    error: Optional[dict] = None

    def summary(self):
        counts = Counter(r.cls for r in self.rows)
        return {
            "points": len(self.rows),
            "counts": {k: counts[k] for k in sorted(counts)},
            "disagreements": [i for i, r in enumerate(self.rows) if not r.agree],
        }


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def csv_row(v: PointVerdict) -> str:
    p = v.params
    cells = (p.F11, p.F12, p.F21, p.F22, p.M, p.R, v.lax_ok, v.energy_margin,
             v.lc_pass, v.spectral_class, v.agree)
    return ",".join(_fmt(c) for c in cells)


def iter_verdicts(cfg: ScanConfig, jobs=1) -> Iterator[PointVerdict]:
    """Classify every grid point, yielding verdicts in grid order."""
    pts = cfg.points()
    cfg.check_points(pts)
    work = functools.partial(
        classify_values, methods=cfg.methods, grid_dict=cfg.grid, alpha=cfg.alpha,
        band=cfg.tol, allow_degenerate=cfg.allow_degenerate, M_minus=cfg.M_minus,
    )
    if jobs <= 1:
        for vals in pts:
            yield work(vals)
        return
    chunk = max(1, len(pts) // (8 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so output does not depend on jobs
        yield from pool.map(work, pts, chunksize=chunk)


def run_scan(cfg: ScanConfig, stream, jobs=1, fmt=None) -> ScanReport:
    """Run the scan and write rows to ``stream`` as they arrive.

    A numerical failure stops the scan; rows already written are kept and a
    trailing error record is appended before the exception is re-raised.
    """
    fmt = fmt or cfg.output_format
    cfg.check_points(cfg.points())
    report = ScanReport()
    if fmt == "csv":
        stream.write(CSV_HEADER + "\n")
    try:
        for v in iter_verdicts(cfg, jobs):
            report.rows.append(v)
            if fmt == "csv":
                stream.write(csv_row(v) + "\n")
    except Exception as exc:
        report.error = {"type": type(exc).__name__, "message": str(exc),
                        "completed_points": len(report.rows)}
        _finish(report, cfg, stream, fmt)
        raise
    _finish(report, cfg, stream, fmt)
    return report


def _finish(report: ScanReport, cfg, stream, fmt):
    if fmt == "csv":
        if report.error is not None:
            stream.write("# error," + json.dumps(report.error, sort_keys=True) + "\n")
    else:
        doc = {
            "config": cfg.to_dict(),
            "header": CSV_HEADER.split(","),
            "rows": [v.to_dict() for v in report.rows],
            "summary": report.summary(),
            "error": report.error,
        }
        json.dump(jsonable(doc), stream, indent=1, sort_keys=True, allow_nan=False)
        stream.write("\n")
    stream.flush()
