"""Hankel-determinant quantization and the underlying Padé construction.

Requiring that [N+d/N] rational functions of t = x^2 reproduce one more
series coefficient than they have free parameters makes the determinants

    H_D^d(E) = det[c_{i+j+d-1}(E)],  i, j = 1..D,  D = N + 1

vanish.  Their real roots in E are the eigenvalue estimates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2

from .exact import Bracket, as_rational, det_exact, dyadic_between
from .highprec import DEFAULT_DIGITS, HighPrecFloat, digits_to_bits, log10_abs, to_hp, working_precision
from .series import SeriesTable

log = logging.getLogger(__name__)

EXACT = "exact"
FLOAT = "float"


@dataclass(frozen=True)
class HankelSpec:
    D: int
    d: int = 0

    def __post_init__(self):
        if self.D < 1:
            raise ValueError("Hankel dimension D must be at least 1")
        if self.d < 0:
            raise ValueError("diagonal displacement d must be non-negative")

    @property
    def required_J(self) -> int:
        """Highest series index the determinant consumes."""
        return 2 * self.D + self.d - 1


def _check_length(table: SeriesTable, spec: HankelSpec):
    if table.J < spec.required_J:
        raise ValueError(
            f"series too short: H_{spec.D}^{spec.d} needs coefficients up to J = {spec.required_J}, "
            f"table has J = {table.J}"
        )


def hankel_matrix(values: Sequence, spec: HankelSpec) -> list[list]:
    """D x D matrix with (i, j) entry c_{i+j+d-1}, 1-based."""
    D, d = spec.D, spec.d
    return [[values[i + j + d + 1] for j in range(D)] for i in range(D)]


def det_float(m: Sequence[Sequence]):
    """Gaussian elimination with partial pivoting, in the operands' precision."""
    a = [list(row) for row in m]
    n = len(a)
    det = a[0][0] * 0 + 1
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[p][k] == 0:
            return det * 0
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        piv = a[k][k]
        det *= piv
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            f = rowi[k] / piv
            if f:
                for j in range(k + 1, n):
                    rowi[j] -= f * rowk[j]
    return det


def hankel_eval(table: SeriesTable, spec: HankelSpec, E, backend: str = EXACT, precision: int = DEFAULT_DIGITS):
    """H_D^d(E); a Fraction for the exact backend, an mpfr for the float one."""
    _check_length(table, spec)
    if backend == EXACT:
        values = table.values_at(as_rational(E), spec.required_J)
        return det_exact(hankel_matrix(values, spec))
    if backend == FLOAT:
        with working_precision(precision):
            x = E if isinstance(E, HighPrecFloat) else to_hp(as_rational(E))
            values = table.values_at(x, spec.required_J)
            return det_float(hankel_matrix(values, spec))
    raise ValueError(f"unknown backend {backend!r}")


def hankel_symbolic(table: SeriesTable, spec: HankelSpec):
    """H_D^d as an exact polynomial in E (cost grows like D^2 in degree)."""
    _check_length(table, spec)
    return det_exact(hankel_matrix(table.c, spec))


# root finding


@dataclass(frozen=True)
class HankelRoot:
    value: Fraction
    bracket: Bracket | None
    backend: str
    exact_confirmed: bool


@dataclass(frozen=True)
class DegenerateCandidate:
    """Grid point where |H| dips towards zero without changing sign."""

    value: Fraction
    log10_relative: float


@dataclass(frozen=True)
class HankelResult:
    spec: HankelSpec
    roots: tuple[HankelRoot, ...]
    interval: tuple[Fraction, Fraction]
    degenerate: tuple[DegenerateCandidate, ...] = ()

    @property
    def values(self) -> list[Fraction]:
        return [r.value for r in self.roots]

    def nearest(self, target) -> HankelRoot | None:
        if not self.roots:
            return None
        target = as_rational(target)
        return min(self.roots, key=lambda r: (abs(r.value - target), r.value))


def _dyadic_round(x: Fraction, step_bits: int) -> Fraction:
    return Fraction(round(x * 2**step_bits), 2**step_bits)


def sample_points(
    lo: Fraction, hi: Fraction, grid_n: int, focus: Fraction | None = None, zoom_n: int = 40, min_width: Fraction | None = None
) -> list[Fraction]:
    """Equally spaced grid on [lo, hi], plus nested windows around ``focus``.

    Each window is ten times narrower than the last, down to ``min_width``.
    Interior points are rounded to dyadic rationals so that the float
    backend represents them exactly.
    """
    width = hi - lo
    pts = {lo, hi}
    bits = max(0, math.ceil(math.log2(grid_n / width)) + 8)
    for i in range(1, grid_n):
        pts.add(_dyadic_round(lo + width * i / grid_n, bits))
    if focus is not None and lo < focus < hi:
        min_width = min_width or width * Fraction(1, 10**20)
        half = width / 20
        while half > min_width:
            a, b = max(lo, focus - half), min(hi, focus + half)
            wbits = max(0, math.ceil(math.log2(zoom_n / (b - a))) + 8)
            for i in range(zoom_n + 1):
                p = _dyadic_round(a + (b - a) * i / zoom_n, wbits)
                if lo < p < hi:
                    pts.add(p)
            half /= 10
    return sorted(pts)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


class _Evaluator:
    """Sign/value oracle for one determinant, with an exact-value cache."""

    def __init__(self, table: SeriesTable, spec: HankelSpec, precision: int):
        self.table, self.spec, self.precision = table, spec, precision
        self.bits = digits_to_bits(precision)
        self._exact: dict[Fraction, Fraction] = {}

    def float_value(self, x: Fraction):
        with working_precision(self.precision):
            values = self.table.values_at(to_hp(x, bits=self.bits), self.spec.required_J)
            return det_float(hankel_matrix(values, self.spec))

    def exact_value(self, x: Fraction) -> Fraction:
        v = self._exact.get(x)
        if v is None:
            values = self.table.values_at(x, self.spec.required_J)
            v = det_exact(hankel_matrix(values, self.spec))
            self._exact[x] = v
        return v

    def value(self, x: Fraction, backend: str):
        return self.exact_value(x) if backend == EXACT else self.float_value(x)


def _bisect(f, lo: Fraction, hi: Fraction, s_lo: int, tol: Fraction) -> tuple[Fraction, Fraction, Fraction | None]:
    while hi - lo >= tol:
        m = dyadic_between(lo, hi)
        s = _sign(f(m))
        if s == 0:
            return m, m, m
        if s == s_lo:
            lo = m
        else:
            hi = m
    return lo, hi, None


def hankel_roots(
    table: SeriesTable,
    spec: HankelSpec,
    lo,
    hi,
    grid_n: int = 200,
    tol=Fraction(1, 10**25),
    backend: str = FLOAT,
    precision: int = DEFAULT_DIGITS,
    focus=None,
    zoom_n: int = 40,
    confirm: bool = True,
    degenerate_threshold: float = 1e-8,
    max_probe_rounds: int = 4,
    cluster_zoom: bool = True,
    max_deflations: int = 6,
) -> HankelResult:
    """Real roots of H_D^d in (lo, hi).

    A sign scan over ``grid_n + 1`` equally spaced points (plus nested zoom
    windows when ``focus`` is given) brackets every sign change.  Each
    bracket is bisected to ``tol`` with ``backend`` signs; when the float
    backend is used the endpoints of the final bracket are then re-signed
    exactly, and an unconfirmed bracket is re-bisected in exact arithmetic.
    With ``cluster_zoom`` a second scan zooms around every root of the
    first, which exposes close roots sharing a grid cell.
    Grid points where |H| has a local minimum below ``degenerate_threshold``
    times the largest sampled |H|, without a sign change, are returned as
    degenerate candidates rather than roots.
    """
    _check_length(table, spec)
    lo, hi = as_rational(lo), as_rational(hi)
    tol = as_rational(tol)
    if not lo < hi:
        raise ValueError("search interval needs lo < hi")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    ev = _Evaluator(table, spec, precision)
    focus = None if focus is None else as_rational(focus)
    cache: dict[Fraction, object] = {}

    def f(x):
        v = cache.get(x)
        if v is None:
            v = cache[x] = ev.value(x, backend)
        return v

    pts = sample_points(lo, hi, grid_n, focus, zoom_n, min_width=tol * 100)
    for p in pts:
        f(p)
    _probe_all(f, sorted(cache), tol, max_probe_rounds)
    found = _roots_from_scan(ev, cache, lo, hi, tol, backend, {})
    zoomed: set[Fraction] = set()
    for _ in range(max_deflations if cluster_zoom else 0):
        # roots closer than a grid cell hide each other; zoom on every known
        # root and look for dips of H with the known roots divided out
        for r in found.values():
            if r.value not in zoomed:
                zoomed.add(r.value)
                for p in sample_points(lo, hi, 2, r.value, 16, min_width=tol * 100):
                    f(p)
        known = [r.value for r in found.values()]
        with working_precision(precision):
            deflated = _deflate(f, known, tol, backend)
            _probe_all(deflated, [x for x in sorted(cache) if deflated(x) is not None], tol, max_probe_rounds, cache)
        before = len(found)
        found = _roots_from_scan(ev, cache, lo, hi, tol, backend, found)
        if len(found) == before:
            break
    roots = sorted(found.values(), key=lambda r: r.value)
    if confirm and backend == FLOAT:
        roots = [c for c in (_confirm(ev, r, tol) for r in roots) if c is not None]
    pts = sorted(cache)
    vals = [cache[p] for p in pts]
    signs = [_sign(v) for v in vals]

    degenerate = []
    mags = [log10_abs(v) for v in vals]
    top = max(mags)
    cutoff = top + math.log10(degenerate_threshold)
    for i in range(1, len(pts) - 1):
        if signs[i - 1] == signs[i] == signs[i + 1] != 0 and mags[i] < mags[i - 1] and mags[i] < mags[i + 1] and mags[i] < cutoff:
            degenerate.append(DegenerateCandidate(pts[i], mags[i] - top))
    return HankelResult(spec=spec, roots=tuple(roots), interval=(lo, hi), degenerate=tuple(degenerate))


def _deflate(f, known: Sequence[Fraction], tol: Fraction, backend: str):
    """x -> H(x) / prod(x - r); None within ``tol`` of a known root."""
    if backend == FLOAT:
        rs = [to_hp(r) for r in known]

        def g(x):
            v = f(x)
            xf = to_hp(x)
            for r, rf in zip(known, rs):
                if abs(x - r) <= tol:
                    return None
                v = v / (xf - rf)
            return v

        return g

    def g_exact(x):
        v = f(x)
        for r in known:
            if abs(x - r) <= tol:
                return None
            v = v / (x - r)
        return v

    return g_exact


def _probe_all(f, pts: list, tol: Fraction, rounds: int, sink: dict | None = None) -> None:
    """Probe every same-sign dip of ``f`` over ``pts``, repeating on the
    refined point set.  Values of the underlying function land in the
    caller's cache through ``f``."""
    vals = {p: f(p) for p in pts}
    probed: set[Fraction] = set()
    for _ in range(rounds):
        xs = sorted(vals)
        ys = [vals[x] for x in xs]
        extra = {}
        for i in range(1, len(xs) - 1):
            if xs[i] not in probed and _is_dip(ys[i - 1], ys[i], ys[i + 1]):
                probed.add(xs[i])
                extra.update(_probe_dip(f, xs[i - 1 : i + 2], ys[i - 1 : i + 2], tol))
        extra = {x: y for x, y in extra.items() if y is not None}
        if not extra:
            break
        probed.update(extra)
        vals.update(extra)


def _roots_from_scan(ev, cache: dict, lo, hi, tol, backend, found: dict) -> dict:
    """Refine every sign change of the cached values.  ``found`` maps a
    bracket's lower point to an earlier result so cells are not redone."""
    pts = sorted(cache)
    signs = [_sign(cache[p]) for p in pts]
    out: dict = {}
    known = sorted(found.values(), key=lambda r: r.value)
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        if signs[i] == 0:
            if lo < a < hi:
                r = _exact_point_root(ev, a, backend, tol)
                if r is not None:
                    out[a] = r
            continue
        if signs[i + 1] == 0 or signs[i] == signs[i + 1]:
            continue
        prior = next((r for r in known if a <= r.value <= b), None)
        r = prior or _refine(ev, a, b, signs[i], tol, backend, False)
        if r is not None:
            out[a] = r
    return out


def _confirm(ev: _Evaluator, r: HankelRoot, tol: Fraction) -> HankelRoot | None:
    if r.exact_confirmed:
        return r
    half = tol / 2
    lo, hi = r.value - half, r.value + half
    e_lo, e_hi = _sign(ev.exact_value(lo)), _sign(ev.exact_value(hi))
    if e_lo * e_hi == -1:
        return HankelRoot(r.value, Bracket(lo, hi, e_lo, e_hi), FLOAT, True)
    if e_lo == 0:
        return _exact_point_root(ev, lo, FLOAT, tol)
    if e_hi == 0:
        return _exact_point_root(ev, hi, FLOAT, tol)
    log.warning("float root of H_%d^%d near %s failed exact confirmation", ev.spec.D, ev.spec.d, float(r.value))
    return None


def _is_dip(y0, y1, y2) -> bool:
    return _sign(y0) == _sign(y1) == _sign(y2) != 0 and abs(y1) < abs(y0) and abs(y1) < abs(y2)


def _probe_dip(f, xs: Sequence[Fraction], ys: Sequence, tol: Fraction, max_iter: int = 60) -> dict:
    """Chase a same-sign local minimum of |H| with parabolic vertex steps.

    A close pair of roots shows up as such a dip; the vertex then lands
    between the roots and the sign flips.  When the bracket stops shrinking
    (flat minima of clustered roots) a golden-section step is taken instead.
    Returns the points evaluated.
    """
    (x0, x1, x2), (y0, y1, y2) = list(xs), list(ys)
    seen = {}
    s = _sign(y1)
    widths = [x2 - x0]
    for _ in range(max_iter):
        if x2 - x0 < tol:
            break
        v = None
        if len(widths) < 3 or widths[-1] < widths[-3] / 2:
            v = _vertex(x0, x1, x2, y0, y1, y2)
        if v is None or not x0 < v < x2 or v == x1:
            v = _golden(x0, x1, x2)
        yv = f(v)
        if yv is None:
            break
        seen[v] = yv
        if _sign(yv) != s:
            break
        if v < x1:
            if abs(yv) < abs(y1):
                x2, y2, x1, y1 = x1, y1, v, yv
            else:
                x0, y0 = v, yv
        else:
            if abs(yv) < abs(y1):
                x0, y0, x1, y1 = x1, y1, v, yv
            else:
                x2, y2 = v, yv
        widths.append(x2 - x0)
    return seen


def _golden(x0: Fraction, x1: Fraction, x2: Fraction) -> Fraction:
    """Golden-section point between x1 and the farther end, as a dyadic."""
    far = x0 if x1 - x0 > x2 - x1 else x2
    a, b = min(x1, far), max(x1, far)
    bits = max(0, math.ceil(-math.log2(float(b - a))) + 16)
    v = _dyadic_round(x1 + (far - x1) * Fraction(382, 1000), bits)
    return v if a < v < b else dyadic_between(a, b)


def _vertex(x0, x1, x2, y0, y1, y2) -> Fraction | None:
    """Abscissa of the parabola through three points, rounded to a dyadic."""
    y0, y1, y2 = (as_rational(y) for y in (y0, y1, y2))
    den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if den == 0:
        return None
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    v = x1 - num / (2 * den)
    bits = max(0, math.ceil(-math.log2(float(x2 - x0))) + 16)
    return _dyadic_round(v, bits)


def _exact_point_root(ev: _Evaluator, x: Fraction, backend: str, tol: Fraction) -> HankelRoot | None:
    if ev.exact_value(x) != 0:
        return None
    delta = tol / 4
    s_lo, s_hi = _sign(ev.exact_value(x - delta)), _sign(ev.exact_value(x + delta))
    bracket = Bracket(x - delta, x + delta, s_lo, s_hi) if s_lo * s_hi == -1 else None
    return HankelRoot(value=x, bracket=bracket, backend=backend, exact_confirmed=True)


def _refine(ev: _Evaluator, a: Fraction, b: Fraction, s_a: int, tol: Fraction, backend: str, confirm: bool) -> HankelRoot | None:
    if backend == EXACT:
        f = ev.exact_value
        lo, hi, hit = _bisect(f, a, b, s_a, tol)
        if hit is not None:
            return _exact_point_root(ev, hit, backend, tol)
        return HankelRoot((lo + hi) / 2, Bracket(lo, hi, s_a, -s_a), EXACT, True)

    lo, hi, hit = _bisect(ev.float_value, a, b, s_a, tol)
    if hit is not None:
        lo, hi = hit - tol / 4, hit + tol / 4
    if not confirm:
        return HankelRoot((lo + hi) / 2, None, FLOAT, False)
    e_lo, e_hi = _sign(ev.exact_value(lo)), _sign(ev.exact_value(hi))
    if e_lo * e_hi == -1:
        return HankelRoot((lo + hi) / 2, Bracket(lo, hi, e_lo, e_hi), FLOAT, True)
    if e_lo == 0:
        return _exact_point_root(ev, lo, FLOAT, tol)
    if e_hi == 0:
        return _exact_point_root(ev, hi, FLOAT, tol)
    # float signs misled the bisection; fall back to exact signs on the grid bracket
    log.warning("float bracket for H_%d^%d near %s failed exact confirmation", ev.spec.D, ev.spec.d, float(lo))
    s_a_exact, s_b_exact = _sign(ev.exact_value(a)), _sign(ev.exact_value(b))
    if s_a_exact * s_b_exact != -1:
        return None
    lo, hi, hit = _bisect(ev.exact_value, a, b, s_a_exact, tol)
    if hit is not None:
        return _exact_point_root(ev, hit, EXACT, tol)
    return HankelRoot((lo + hi) / 2, Bracket(lo, hi, s_a_exact, s_b_exact), EXACT, True)


def hankel_sequence(
    table: SeriesTable,
    D_values: Sequence[int],
    d: int,
    lo,
    hi,
    grid_n: int = 200,
    tol=Fraction(1, 10**25),
    precision: int = DEFAULT_DIGITS,
    focus=None,
    confirm: bool = True,
    cluster_zoom: bool = False,
    refocus: bool = True,
) -> list[HankelResult]:
    """hankel_roots for each D, zooming on a moving estimate of the limit.

    Without an explicit ``focus`` the zoom centre for each D is the root of
    the previous order that best agrees with the orders before it.  With
    ``refocus`` every order is then scanned again around the final such
    estimate, and the two root lists are merged.
    """
    results: list[HankelResult] = []
    history: list[list[Fraction]] = []
    centres = []
    for D in D_values:
        centre = focus
        if centre is None and history:
            centre = consensus_root(history[-1], history[-3:-1])
        res = hankel_roots(
            table, HankelSpec(D, d), lo, hi, grid_n, tol, FLOAT, precision, centre, confirm=confirm, cluster_zoom=cluster_zoom
        )
        log.info("H_%d^%d: %d roots in (%s, %s)", D, d, len(res.roots), float(res.interval[0]), float(res.interval[1]))
        results.append(res)
        history.append(res.values)
        centres.append(centre)
    if focus is not None or not refocus or not history:
        return results
    target = consensus_root(history[-1], history[-3:-1])
    if target is None:
        return results
    out = []
    for res, centre in zip(results, centres):
        if centre == target:
            out.append(res)
            continue
        again = hankel_roots(table, res.spec, lo, hi, grid_n, tol, FLOAT, precision, target, confirm=confirm, cluster_zoom=False)
        out.append(_merge(res, again, tol))
    return out


def _merge(first: HankelResult, second: HankelResult, tol: Fraction) -> HankelResult:
    roots = list(first.roots)
    for r in second.roots:
        if all(abs(r.value - q.value) > 2 * tol for q in roots):
            roots.append(r)
    roots.sort(key=lambda r: r.value)
    return HankelResult(first.spec, tuple(roots), first.interval, first.degenerate)


def consensus_root(current: Sequence[Fraction], previous: Sequence[Sequence[Fraction]]) -> Fraction | None:
    """Root of ``current`` closest to any root of the ``previous`` orders."""
    if not current:
        return None
    pool = [r for roots in previous for r in roots]
    if not pool:
        return current[len(current) // 2] if len(current) > 1 else current[0]
    return min(current, key=lambda r: (min(abs(r - q) for q in pool), r))


# Padé construction


@dataclass(frozen=True)
class PadeApproximant:
    """[N+d / N] approximant in t = x^2; ``residual`` is the one matching
    condition not imposed by the linear solve (zero exactly at a root of
    H_{N+1}^d)."""

    numerator: tuple
    denominator: tuple
    residual: HighPrecFloat
    E: object
    N: int
    d: int
    coefficients: tuple = field(repr=False, default=())

    def expansion(self, n: int) -> list:
        """First n+1 Taylor coefficients of numerator/denominator."""
        b = self.denominator
        out = []
        for k in range(n + 1):
            acc = self.numerator[k] if k < len(self.numerator) else 0 * b[0]
            for i in range(1, min(k, len(b) - 1) + 1):
                acc -= b[i] * out[k - i]
            out.append(acc / b[0])
        return out


def pade_coefficients(table: SeriesTable, N: int, d: int, E, precision: int = DEFAULT_DIGITS) -> PadeApproximant:
    """Solve for b_1..b_N from the conditions at t^(N+d+2)..t^(2N+d+1),
    then a_0..a_(N+d) by convolution; the t^(N+d+1) condition is the residual."""
    if N < 0:
        raise ValueError("N must be non-negative")
    need = 2 * N + d + 1
    if table.J < need:
        raise ValueError(f"series too short: Padé [{N + d}/{N}] needs J = {need}, table has J = {table.J}")
    with working_precision(precision):
        x = E if isinstance(E, HighPrecFloat) else to_hp(as_rational(E))
        c = table.values_at(x, need)
        rows = [[c[k - i] for i in range(1, N + 1)] for k in range(N + d + 2, 2 * N + d + 2)]
        rhs = [-c[k] for k in range(N + d + 2, 2 * N + d + 2)]
        b_tail = _solve(rows, rhs) if N else []
        b = [x * 0 + 1] + b_tail
        num = [sum((b[i] * c[k - i] for i in range(0, min(k, N) + 1)), x * 0) for k in range(N + d + 1)]
        k = N + d + 1
        residual = sum((b[i] * c[k - i] for i in range(0, min(k, N) + 1)), x * 0)
    return PadeApproximant(tuple(num), tuple(b), residual, E, N, d, tuple(c))


def _solve(rows: list[list], rhs: list) -> list:
    n = len(rows)
    scale = max((abs(v) for row in rows for v in row), default=0)
    rscale = max((abs(v) for v in rhs), default=0)
    if scale == 0:
        if rscale == 0:
            return [rhs[0] * 0 for _ in range(n)]
        raise ArithmeticError("Padé system singular at this E")
    eps = gmpy2.mpfr(2) ** (-gmpy2.get_context().precision + 16) * scale
    a = [list(r) + [v] for r, v in zip(rows, rhs)]
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if abs(a[p][k]) <= eps:
            raise ArithmeticError("Padé system singular at this E")
        a[k], a[p] = a[p], a[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n + 1):
                a[i][j] -= f * a[k][j]
    out = [None] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n]
        for j in range(i + 1, n):
            acc -= a[i][j] * out[j]
        out[i] = acc / a[i][i]
    return out
