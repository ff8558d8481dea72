"""Numerov shooting on the closed-form potential, as an independent check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import gmpy2
from gmpy2 import mpfr

from .exact import as_rational
from .highprec import digits_to_bits

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class ShootingConfig:
    x_max: Fraction
    h: Fraction
    parity: str = EVEN
    precision: int = 30

    def __post_init__(self):
        object.__setattr__(self, "x_max", as_rational(self.x_max))
        object.__setattr__(self, "h", as_rational(self.h))
        if self.x_max <= 0:
            raise ValueError("x_max must be positive")
        if not 0 < self.h < self.x_max:
            raise ValueError("step h must satisfy 0 < h < x_max")
        if (self.x_max / self.h).denominator != 1:
            raise ValueError("x_max / h must be an integer")
        if self.parity not in (EVEN, ODD):
            raise ValueError("parity must be 'even' or 'odd'")

    @property
    def steps(self) -> int:
        return int(self.x_max / self.h)

    def halved(self) -> ShootingConfig:
        return ShootingConfig(self.x_max, self.h / 2, self.parity, self.precision)


@dataclass(frozen=True)
class OracleResult:
    E: object
    h: Fraction
    x_max: Fraction
    error_estimate: object  # |E(h) - E(h/2)| * 16/15


def _context(config: ShootingConfig):
    return gmpy2.context(gmpy2.get_context(), precision=digits_to_bits(config.precision))


def _shooter(potential: Callable, config: ShootingConfig) -> Callable:
    """E -> psi(x_max) for the outward Numerov integration."""
    h = mpfr(config.h.numerator) / config.h.denominator
    q = h * h / 12
    V = [potential(h * n) for n in range(config.steps + 1)]

    def shoot(E):
        f0, f1 = V[0] - E, V[1] - E
        if config.parity == EVEN:
            y0 = mpfr(1)
            y1 = y0 * (1 + 5 * q * f0) / (1 - q * f1)
        else:
            y0, y1 = mpfr(0), h
        w0, w1 = y0 * (1 - q * f0), y1 * (1 - q * f1)
        # w_n = (1 - q f_n) y_n turns the recurrence into w_{n+1} = 2 w_n - w_{n-1} + 12 q f_n y_n
        for n in range(1, config.steps):
            w0, w1 = w1, 2 * w1 - w0 + 12 * q * (V[n] - E) * y1
            y1 = w1 / (1 - q * (V[n + 1] - E))
        return y1

    return shoot


def numerov_eigenvalue(potential_closed_form: Callable, config: ShootingConfig, bracket, tol=Fraction(1, 10**18)):
    """Bisect E on the sign of psi(x_max) inside ``bracket``.

    ``potential_closed_form`` maps an mpfr x to V(x); it is called at the
    configured precision.
    """
    with _context(config):
        shoot = _shooter(potential_closed_form, config)
        lo, hi = (mpfr(as_rational(b).numerator) / as_rational(b).denominator for b in bracket)
        if not lo < hi:
            raise ValueError("bracket needs E_lo < E_hi")
        s_lo, s_hi = gmpy2.sign(shoot(lo)), gmpy2.sign(shoot(hi))
        if s_lo * s_hi >= 0:
            raise ValueError("no eigenvalue isolated in bracket")
        tol = mpfr(as_rational(tol).numerator) / as_rational(tol).denominator
        while hi - lo > tol:
            mid = (lo + hi) / 2
            s = gmpy2.sign(shoot(mid))
            if s == 0:
                return mid
            if s == s_lo:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def numerov_with_error(potential_factory: Callable, config: ShootingConfig, bracket) -> OracleResult:
    """Eigenvalue at step h plus a discretisation error estimate from h/2.

    ``potential_factory`` builds the closed-form callable; it is invoked
    inside the oracle's precision context so that its constants are
    rounded there.
    """
    with _context(config):
        v = potential_factory()
    E_h = numerov_eigenvalue(v, config, bracket)
    E_h2 = numerov_eigenvalue(v, config.halved(), bracket)
    with _context(config):
        err = abs(E_h - E_h2) * 16 / 15
    return OracleResult(E=E_h2, h=config.h / 2, x_max=config.x_max, error_estimate=err)
