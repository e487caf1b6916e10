"""Experiment configuration: JSON schema, validation and resolution into objects."""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from importlib import resources
from typing import Any, Dict

import jsonschema

from .exponents import lorentz_form, split_form
from .geometry import (
    PellNormForm,
    PolynomialMap,
    Polynomial,
    QuadraticForm,
    QuadricGroup,
    SpecialLinear,
    SpectralParams,
    default_spectral_params,
)
from .numeric import DomainError

EXPERIMENTS = ("lift", "lift-quant", "restrict", "generic", "sift", "linnik", "linnik-density",
               "exponents", "pell-control", "growth")

_num = {"type": "number"}
_int = {"type": "integer"}
_rational = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}

SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment"],
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "preset": {"type": "string", "pattern": r"^(sl\d+|spin-split-\d+|quadric-lorentz-\d+|pell-\d+)$"},
        "group": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["sl", "quadric"]},
                "n": {"type": "integer", "minimum": 1},
                "form": {"type": "array", "items": {"type": "array", "items": _int}},
                "cover": {"enum": ["spin", "special-orthogonal"]},
            },
        },
        "D": {"type": "integer", "minimum": 2},
        "T": {"type": "number", "exclusiveMinimum": 0},
        "T_grid": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["lo", "hi", "num"],
            "properties": {"lo": _num, "hi": _num, "num": {"type": "integer", "minimum": 2}},
        },
        "T_axiom": {"type": "number", "exclusiveMinimum": 0},
        "T_cap": {"type": "number", "exclusiveMinimum": 0},
        "q": {"type": "integer", "minimum": 1},
        "q_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "q_range": {"type": "array", "items": _int, "minItems": 2, "maxItems": 2},
        "primes_only": {"type": "boolean"},
        "f": {
            "oneOf": [
                {"enum": ["trace"]},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["expr"],
                    "properties": {"expr": {"type": "string"}, "t": {"type": "integer", "minimum": 1},
                                   "N": {"type": "integer", "minimum": 1}, "name": {"type": "string"}},
                },
            ]
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: _rational for k in ("p", "a", "d", "dim", "alpha_group", "alpha_orbit")},
        },
        "subvarieties": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["polynomials", "dim"],
                "properties": {
                    "polynomials": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "dim": {"type": "integer", "minimum": 0},
                    "deg": {"type": "integer", "minimum": 1},
                    "name": {"type": "string"},
                },
            },
        },
        "n": {"type": "integer", "minimum": 2},
        "b": _int,
        "r": {"type": "integer", "minimum": 0},
        "sigma": _rational,
        "sigma_max": {"type": "number", "exclusiveMinimum": 0},
        "r_max": {"type": "integer", "minimum": 0},
        "prime_cap": {"type": "integer", "minimum": 2},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "z_list": {"type": "array", "items": _num},
        "t": {"type": "integer", "minimum": 1},
        "deg": {"type": "integer", "minimum": 1},
        "budget": {"type": "integer", "minimum": 1},
        "seed": _int,
        "bands": {"type": "object"},
        "out": {"type": "string"},
    },
}


class ConfigError(ValueError):
    """Schema violation; the message names the field and its position."""


def load_bands() -> Dict[str, Any]:
    text = resources.files("homocount").joinpath("data/bands.json").read_text()
    return json.loads(text)


def band(config: dict, name: str):
    if name in config.get("bands", {}):
        return config["bands"][name]
    return load_bands()["bands"][name]["value"]


def validate(config: Any) -> dict:
    try:
        jsonschema.validate(config, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None
    return config


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return validate(data)


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def resolve_group(config: dict):
    g = config.get("group")
    if g is not None:
        if g["type"] == "sl":
            return SpecialLinear(g.get("n", 2))
        if "form" not in g:
            raise ConfigError("config error at group/form: quadric groups need a form")
        return QuadricGroup(QuadraticForm(tuple(tuple(r) for r in g["form"])), g.get("cover", "spin"))
    preset = config.get("preset", "sl2")
    if preset.startswith("sl"):
        return SpecialLinear(int(preset[2:]))
    m = int(preset.rsplit("-", 1)[1])
    if preset.startswith("spin-split-"):
        return QuadricGroup(split_form(m), "spin")
    if preset.startswith("quadric-lorentz-"):
        return QuadricGroup(lorentz_form(m), "spin")
    raise ConfigError(f"config error at preset: {preset!r} is not a group")


def resolve_pell(config: dict) -> PellNormForm:
    if "D" in config:
        return PellNormForm(config["D"])
    preset = config.get("preset", "pell-2")
    if not preset.startswith("pell-"):
        raise ConfigError("config error at preset: expected pell-<D> or D")
    return PellNormForm(int(preset[5:]))


def resolve_f(config: dict, nvars: int, n: int) -> PolynomialMap:
    f = config.get("f", "trace")
    if f == "trace":
        return PolynomialMap.trace(n)
    return PolynomialMap(Polynomial.parse(f["expr"], nvars), f.get("t", 1), f.get("N", 1), f.get("name", f["expr"]))


def resolve_params(config: dict, spec) -> SpectralParams:
    over = {k: Fraction(str(v)) for k, v in config.get("params", {}).items()}
    if "dim" in over:
        over["dim"] = int(over["dim"])
    try:
        base = default_spectral_params(spec)
    except DomainError:
        if not over:
            raise
        return SpectralParams(**over)
    return base.replace(**over) if over else base
