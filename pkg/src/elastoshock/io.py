"""JSON input parsing with strict schemas.

Non-finite numbers (``NaN``, ``Infinity``) are rejected while parsing, before
any schema check runs.
"""
from __future__ import annotations

import json
import math
import sys

import jsonschema

from .errors import ConfigError
from .states import PolytropicEOS, ShockParameters, SideState, TabulatedEOS

PARAM_NAMES = ("M", "R", "F11", "F12", "F21", "F22")

_NUM = {"type": "number"}
_VEC2 = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_MAT2 = {"type": "array", "items": _VEC2, "minItems": 2, "maxItems": 2}

STATE_SCHEMA = {
    "type": "object",
    "properties": {"rho": _NUM, "v": _VEC2, "F": _MAT2},
    "required": ["rho", "v", "F"],
    "additionalProperties": False,
}

EOS_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "polytropic"}, "A": _NUM, "gamma": _NUM},
            "required": ["kind", "A", "gamma"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "table"},
                "rho": {"type": "array", "items": _NUM, "minItems": 3},
                "p": {"type": "array", "items": _NUM, "minItems": 3},
            },
            "required": ["kind", "rho", "p"],
            "additionalProperties": False,
        },
    ]
}

RH_SCHEMA = {
    "type": "object",
    "properties": {
        "upstream": STATE_SCHEMA,
        "downstream": STATE_SCHEMA,
        "rho_plus": _NUM,
        "eos": EOS_SCHEMA,
        "allow_degenerate": {"type": "boolean"},
    },
    "required": ["upstream", "eos"],
    "oneOf": [{"required": ["rho_plus"]}, {"required": ["downstream"]}],
    "additionalProperties": False,
}

PARAMS_SCHEMA = {
    "type": "object",
    "properties": {
        **{k: _NUM for k in PARAM_NAMES},
        "M_minus": _NUM,
        "allow_degenerate": {"type": "boolean"},
        "alpha": _NUM,
        "G0": {
            "type": "array",
            "minItems": 6,
            "maxItems": 6,
            "items": {"type": "array", "items": _NUM, "minItems": 6, "maxItems": 6},
        },
    },
    "required": ["M", "R"],
    "additionalProperties": False,
}

GRID_SCHEMA = {
    "type": "object",
    "properties": {
        "n_polar": {"type": "integer", "minimum": 4},
        "n_azimuth": {"type": "integer", "minimum": 4},
        "n_boundary": {"type": "integer", "minimum": 4},
        "zero_rtol": {"type": "number", "exclusiveMinimum": 0},
        "band_rtol": {"type": "number", "exclusiveMinimum": 0},
        "eta_min": {"type": "number", "exclusiveMinimum": 0},
        "n_polish": {"type": "integer", "minimum": 0},
        "n_polish_boundary": {"type": "integer", "minimum": 0},
        "max_newton": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "axes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "name": {"enum": list(PARAM_NAMES)},
                    "min": _NUM,
                    "max": _NUM,
                    "steps": {"type": "integer", "minimum": 2},
                },
                "required": ["name", "min", "max", "steps"],
                "additionalProperties": False,
            },
        },
        "fixed": {
            "type": "object",
            "properties": {**{k: _NUM for k in PARAM_NAMES}, "M_minus": _NUM},
            "additionalProperties": False,
        },
        "methods": {
            "type": "array",
            "minItems": 1,
            "uniqueItems": True,
            "items": {"enum": ["energy", "lc", "spectral", "symmetrizer"]},
        },
        "grid": GRID_SCHEMA,
        "output": {
            "type": "object",
            "properties": {"path": {"type": "string"}, "format": {"enum": ["csv", "json"]}},
            "additionalProperties": False,
        },
        "alpha": {"type": "number", "exclusiveMinimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "allow_degenerate": {"type": "boolean"},
    },
    "required": ["axes"],
    "additionalProperties": False,
}


def jsonable(obj):
    """Copy of ``obj`` with non-finite floats replaced by ``None``."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _reject_constant(name):
    raise ConfigError(f"non-finite number {name} is not allowed")


def loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None


def load(path):
    """Parse JSON from ``path``; ``-`` or ``None`` reads standard input."""
    if path in (None, "-"):
        return loads(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def validate(data, schema, what="input"):
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{what} invalid at {loc}: {exc.message}") from None
    return data


def parse_state(d, allow_degenerate=False) -> SideState:
    validate(d, STATE_SCHEMA, "state")
    return SideState(d["rho"], tuple(d["v"]), d["F"], allow_degenerate=allow_degenerate)


def parse_eos(d):
    validate(d, EOS_SCHEMA, "eos")
    if d["kind"] == "polytropic":
        return PolytropicEOS(d["A"], d["gamma"])
    return TabulatedEOS(tuple(d["rho"]), tuple(d["p"]))


def parse_params(d, allow_degenerate=False) -> ShockParameters:
    validate(d, PARAMS_SCHEMA, "parameters")
    return ShockParameters(
        d["M"], d["R"], d.get("F11", 0.0), d.get("F12", 0.0), d.get("F21", 0.0),
        d.get("F22", 0.0), d.get("M_minus"),
        allow_degenerate=d.get("allow_degenerate", allow_degenerate),
    )
