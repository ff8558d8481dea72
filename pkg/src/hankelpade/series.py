"""Series coefficients c_j(E) of the Gaussian-weighted ansatz.

With psi(x) = exp(-a x^2) * sum_j c_j x^(2j+s), the factor
phi = sum_j c_j x^(2j+s) satisfies

    phi'' - 4 a x phi' + (4 a^2 x^2 - 2a + E - V) phi = 0,

and matching powers of x gives the three-term-plus-convolution recurrence

    (2j+2+s)(2j+1+s) c_{j+1} = (2a(4j+2s+1) - E) c_j - 4a^2 c_{j-1}
                               + sum_{k=1..j} v_k c_{j-k}

with c_0 = 1 and c_{-1} = 0.  Each c_j is a polynomial of degree j in E.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpfr

from .exact import EPoly, as_rational, format_rational
from .highprec import to_hp
from .potentials import PotentialSpec


@dataclass(frozen=True)
class SeriesParams:
    a: object  # Fraction normally; an EPoly in a second variable for symbolic work
    s: int = 0
    J: int = 1

    def __post_init__(self):
        if self.s not in (0, 1):
            raise ValueError("parity index s must be 0 or 1")
        if self.J < 1:
            raise ValueError("series length J must be at least 1")
        if not isinstance(self.a, (Fraction, EPoly)):
            object.__setattr__(self, "a", as_rational(self.a))


@dataclass(frozen=True)
class SeriesTable:
    params: SeriesParams
    potential: PotentialSpec
    c: tuple[EPoly, ...]
    _float_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def J(self) -> int:
        return len(self.c) - 1

    def values_at(self, E, upto: int | None = None) -> list:
        """c_0(E) .. c_upto(E).  Exact for rational E; for an mpfr E the
        coefficients are rounded once at the active precision."""
        upto = self.J if upto is None else upto
        if isinstance(E, mpfr(0).__class__):
            coeffs = self.float_coefficients(E.precision)
            out = []
            for cs in coeffs[: upto + 1]:
                acc = cs[-1]
                for c in reversed(cs[:-1]):
                    acc = acc * E + c
                out.append(acc)
            return out
        E = as_rational(E)
        return [p(E) for p in self.c[: upto + 1]]

    def float_coefficients(self, bits: int) -> list[list]:
        cached = self._float_cache.get(bits)
        if cached is None:
            cached = [[to_hp(x, bits=bits) for x in p.coeffs] or [mpfr(0, bits)] for p in self.c]
            self._float_cache[bits] = cached
        return cached


def generate_series(potential: PotentialSpec, params: SeriesParams, c0=1) -> SeriesTable:
    """Coefficients c_0..c_J as exact polynomials in E."""
    a, s, J = params.a, params.s, params.J
    v = [potential.coefficient(k) for k in range(1, J + 1)]
    E = EPoly.variable()
    c = [EPoly.constant(c0)]
    four_a2 = 4 * a * a
    for j in range(J):
        nxt = c[j].scale(2 * a * (4 * j + 2 * s + 1)) - c[j] * E
        if j >= 1:
            nxt = nxt - c[j - 1].scale(four_a2)
        for k in range(1, j + 1):
            if v[k - 1] != 0:
                nxt = nxt + c[j - k].scale(v[k - 1])
        c.append(nxt / ((2 * j + 2 + s) * (2 * j + 1 + s)))
    return SeriesTable(params=params, potential=potential, c=tuple(c))


def series_values(potential: PotentialSpec, a, s: int, J: int, E) -> list:
    """c_0(E)..c_J(E) straight from the recurrence at a numeric E."""
    c = [E * 0 + 1]
    for j in range(J):
        t = (2 * a * (4 * j + 2 * s + 1) - E) * c[j]
        if j >= 1:
            t -= 4 * a * a * c[j - 1]
        for k in range(1, j + 1):
            vk = potential.coefficient(k)
            if vk:
                t += vk * c[j - k]
        c.append(t / ((2 * j + 2 + s) * (2 * j + 1 + s)))
    return c


def residual_check(table: SeriesTable, E_sample) -> Fraction:
    """Largest |coefficient of x^(2j+s)|, j < J, after substituting the
    truncated series into the transformed equation.  Zero for a valid table.

    The operator is applied term by term to an explicit power dictionary,
    independently of the recurrence used to build the table.
    """
    E = as_rational(E_sample)
    a, s, J = as_rational(table.params.a), table.params.s, table.J
    phi = {2 * j + s: cj for j, cj in enumerate(table.values_at(E))}
    out: dict[int, Fraction] = {}

    def add(power: int, value: Fraction):
        out[power] = out.get(power, Fraction(0)) + value

    for p, c in phi.items():
        if p >= 2:
            add(p - 2, p * (p - 1) * c)  # phi''
        add(p, -4 * a * p * c)  # -4 a x phi'
        add(p + 2, 4 * a * a * c)
        add(p, (E - 2 * a) * c)
        for k in range(1, J):
            vk = table.potential.coefficient(k)
            if vk:
                add(p + 2 * k, -vk * c)
    return max((abs(out.get(2 * j + s, Fraction(0))) for j in range(J)), default=Fraction(0))


def coefficients_json(table: SeriesTable) -> dict:
    """{"j": [c_j0, c_j1, ...]} with exact rational strings."""
    return {str(j): [format_rational(x) for x in p.coeffs] for j, p in enumerate(table.c)}
