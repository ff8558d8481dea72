"""JSON run configuration for the ``solve`` command."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import jsonschema

from .exact import as_rational
from .potentials import PotentialSpec, potential_from_config

RATIONAL_PATTERN = r"^\s*-?\d+(\.\d+)?(/\d+)?\s*$"

_rational = {"type": "string", "pattern": RATIONAL_PATTERN}
_order = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "required": ["potential", "a", "method", "interval"],
    "additionalProperties": False,
    "properties": {
        "potential": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["kind", "v"],
                    "additionalProperties": False,
                    "properties": {"kind": {"const": "polynomial"}, "v": {"type": "array", "items": _rational, "minItems": 1}},
                },
                {
                    "type": "object",
                    "required": ["kind", "lambda", "g"],
                    "additionalProperties": False,
                    "properties": {"kind": {"const": "rational"}, "lambda": _rational, "g": _rational},
                },
            ]
        },
        "a": _rational,
        "s": {"enum": [0, 1]},
        "method": {"enum": ["hill", "hankel", "both"]},
        "M_min": _order,
        "M_max": _order,
        "D_min": _order,
        "D_max": _order,
        "d": {"type": "integer", "minimum": 0},
        "interval": {"type": "array", "items": _rational, "minItems": 2, "maxItems": 2},
        "tol": _rational,
        "backend": {"enum": ["exact", "float"]},
        "precision": {"type": "integer", "minimum": 50},
        "grid_n": {"type": "integer", "minimum": 2},
        "reference": _rational,
        "output": {"type": "string"},
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    potential_doc: dict
    a: Fraction
    s: int
    method: str
    M_range: tuple[int, int] | None
    D_range: tuple[int, int] | None
    d: int
    interval: tuple[Fraction, Fraction]
    tol: Fraction
    backend: str
    precision: int
    grid_n: int
    reference: Fraction | None
    output: Path

    @property
    def J(self) -> int:
        need = 1
        if self.M_range:
            need = max(need, self.M_range[1])
        if self.D_range:
            need = max(need, 2 * self.D_range[1] + self.d - 1)
        return need

    def potential(self) -> PotentialSpec:
        return potential_from_config(self.potential_doc, self.J)


def parse_config(doc: dict) -> RunConfig:
    """Validate against the schema and the cross-field rules."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config: {exc.message}") from None
    method = doc["method"]
    M_range = D_range = None
    if method in ("hill", "both"):
        M_range = _range(doc, "M")
    if method in ("hankel", "both"):
        D_range = _range(doc, "D")
    lo, hi = (as_rational(x) for x in doc["interval"])
    if not lo < hi:
        raise ConfigError("config: interval needs lo < hi")
    tol = as_rational(doc.get("tol", "1/10000000000000000000000000"))
    if tol <= 0:
        raise ConfigError("config: tol must be positive")
    ref = doc.get("reference")
    try:
        potential_from_config(doc["potential"], 1)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"config: {exc}") from None
    return RunConfig(
        potential_doc=doc["potential"],
        a=as_rational(doc["a"]),
        s=doc.get("s", 0),
        method=method,
        M_range=M_range,
        D_range=D_range,
        d=doc.get("d", 0),
        interval=(lo, hi),
        tol=tol,
        backend=doc.get("backend", "float"),
        precision=doc.get("precision", 256),
        grid_n=doc.get("grid_n", 200),
        reference=None if ref is None else as_rational(ref),
        output=Path(doc.get("output", "out")),
    )


def _range(doc: dict, name: str) -> tuple[int, int]:
    lo, hi = doc.get(f"{name}_min"), doc.get(f"{name}_max")
    if lo is None or hi is None:
        raise ConfigError(f"config: {name}_min and {name}_max are required for this method")
    if lo > hi:
        raise ConfigError(f"config: empty range {name}_min={lo} > {name}_max={hi}")
    if name == "D" and lo < 1:
        raise ConfigError("config: D_min must be at least 1")
    return lo, hi


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    return parse_config(doc)
