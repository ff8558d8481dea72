"""Even potentials V(x) = sum_k v_k x^(2k).

Two families: polynomials given by their coefficients, and the rational
potential x^2 + lam*x^2/(1 + g*x^2) expanded as a geometric series and
truncated at a caller-chosen order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import gmpy2

from .exact import as_rational, format_rational
from .highprec import DEFAULT_DIGITS, HighPrecFloat, to_hp, working_precision

POLYNOMIAL = "polynomial"
RATIONAL = "rational_truncated"


@dataclass(frozen=True)
class PotentialSpec:
    v: tuple[Fraction, ...]
    kind: str = POLYNOMIAL
    params: tuple[Fraction, Fraction] | None = None  # (lam, g) for the rational family
    truncation_order: int | None = None

    def __post_init__(self):
        if not self.v:
            raise ValueError("potential needs at least one coefficient")
        if self.kind == RATIONAL:
            lam, g = self.params
            if g <= 0:
                raise ValueError("pole structure undefined for g <= 0")

    def coefficient(self, k: int) -> Fraction:
        """v_k for k >= 1; zero past the end of a polynomial."""
        if k < 1:
            raise IndexError("potential coefficients start at k = 1")
        if k <= len(self.v):
            return self.v[k - 1]
        if self.kind == RATIONAL:
            raise ValueError(f"coefficient v_{k} is beyond the truncation order {self.truncation_order}")
        return Fraction(0)

    @property
    def available(self) -> int | None:
        """Highest materialised k, or None when every coefficient is known."""
        return self.truncation_order if self.kind == RATIONAL else None

    def extended(self, J: int) -> PotentialSpec:
        """Same potential with at least J coefficients available."""
        if self.kind != RATIONAL or self.truncation_order >= J:
            return self
        return expand_rational(*self.params, J)

    def closed_form(self) -> Callable:
        """V(x) evaluated from its defining formula, never from the series.

        Constants are rounded at the precision active when this is called.
        """
        if self.kind == RATIONAL:
            lam, g = (_as_float(c) for c in self.params)

            def rational(x):
                x2 = x * x
                return x2 + lam * x2 / (1 + g * x2)

            return rational
        coeffs = [_as_float(c) for c in self.v]

        def polynomial(x):
            x2 = x * x
            acc = 0
            for c in reversed(coeffs):
                acc = acc * x2 + c
            return acc * x2

        return polynomial

    def describe(self) -> str:
        if self.kind == RATIONAL:
            lam, g = self.params
            return f"x^2 + ({lam})x^2/(1 + ({g})x^2)"
        terms = [f"({c})x^{2 * k}" for k, c in enumerate(self.v, start=1) if c]
        return " + ".join(terms)


def _as_float(c: Fraction):
    return c.numerator if c.denominator == 1 else to_hp(c)


def polynomial_potential(coeffs) -> PotentialSpec:
    v = tuple(as_rational(c) for c in coeffs)
    if not v or all(c == 0 for c in v):
        raise ValueError("free particle not supported")
    return PotentialSpec(v=v, kind=POLYNOMIAL)


def expand_rational(lam, g, J: int) -> PotentialSpec:
    """Coefficients of x^2 + lam*x^2/(1+g*x^2) up to x^(2J)."""
    lam, g = as_rational(lam), as_rational(g)
    if g <= 0:
        raise ValueError("pole structure undefined for g <= 0")
    if J < 1:
        raise ValueError("truncation order must be at least 1")
    v = [1 + lam] + [lam * (-g) ** (k - 1) for k in range(2, J + 1)]
    return PotentialSpec(v=tuple(v), kind=RATIONAL, params=(lam, g), truncation_order=J)


@dataclass(frozen=True)
class PoleInfo:
    radius: HighPrecFloat
    location_description: str


def pole_radius(spec: PotentialSpec, digits: int = DEFAULT_DIGITS) -> PoleInfo:
    """Distance 1/sqrt(g) of the poles +-i/sqrt(g) from the origin."""
    if spec.kind != RATIONAL:
        raise ValueError("entire potential has no finite poles")
    _, g = spec.params
    with working_precision(digits):
        radius = 1 / gmpy2.sqrt(to_hp(g))
    return PoleInfo(radius=radius, location_description=f"+-i/sqrt({g}) on imaginary axis")


def potential_from_config(doc: dict, J: int = 1) -> PotentialSpec:
    """Build a potential from ``{"kind": "polynomial", "v": [...]}`` or
    ``{"kind": "rational", "lambda": ..., "g": ...}``."""
    kind = doc.get("kind")
    if kind == "polynomial":
        return polynomial_potential(doc["v"])
    if kind in ("rational", RATIONAL):
        return expand_rational(doc["lambda"], doc["g"], max(J, 1))
    raise ValueError(f"unknown potential kind {kind!r}")


def potential_to_config(spec: PotentialSpec) -> dict:
    if spec.kind == RATIONAL:
        lam, g = spec.params
        return {"kind": "rational", "lambda": format_rational(lam), "g": format_rational(g)}
    return {"kind": "polynomial", "v": [format_rational(c) for c in spec.v]}


QUARTIC = polynomial_potential([0, 1])
HARMONIC = polynomial_potential([1])
