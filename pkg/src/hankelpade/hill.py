"""Eigenvalue estimates as the real roots of a single coefficient c_M(E)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Bracket, as_rational, isolate_real_roots, narrow_bracket
from .series import SeriesTable


@dataclass(frozen=True)
class HillRoot:
    value: Fraction
    bracket: Bracket  # certified by the Sturm count; narrowed to tol unless the root is exact
    exact: bool = False


@dataclass(frozen=True)
class HillResult:
    M: int
    roots: tuple[HillRoot, ...]
    interval: tuple[Fraction, Fraction]
    degenerate: tuple[Fraction, ...] = ()

    @property
    def values(self) -> list[Fraction]:
        return [r.value for r in self.roots]

    def nearest(self, target) -> HillRoot | None:
        if not self.roots:
            return None
        target = as_rational(target)
        return min(self.roots, key=lambda r: (abs(r.value - target), r.value))


def hill_roots(table: SeriesTable, M: int, lo, hi, tol=Fraction(1, 10**30)) -> HillResult:
    """All real roots of c_M in (lo, hi), isolated by Sturm sequences and
    bisected in exact arithmetic to ``tol``."""
    if M > table.J:
        raise ValueError(f"series too short: c_{M} requested, table has J = {table.J}")
    if M < 1:
        raise ValueError("M must be at least 1")
    lo, hi = as_rational(lo), as_rational(hi)
    tol = as_rational(tol)
    p = table.c[M]
    iso = isolate_real_roots(p, lo, hi)
    roots = []
    for b in iso.brackets:
        value, final = narrow_bracket(p, b, tol)
        roots.append(HillRoot(value, final or b, exact=final is None))
    degenerate = tuple(d.refine(tol) for d in iso.degenerate)
    return HillResult(M=M, roots=tuple(roots), interval=(lo, hi), degenerate=degenerate)


def hill_sequence(table: SeriesTable, M_values: Sequence[int], lo, hi, tol=Fraction(1, 10**30)) -> list[HillResult]:
    """hill_roots for every M; no matching across M."""
    M_values = list(M_values)
    if M_values and max(M_values) > table.J:
        raise ValueError(f"series too short: c_{max(M_values)} requested, table has J = {table.J}")
    return [hill_roots(table, M, lo, hi, tol) for M in M_values]
