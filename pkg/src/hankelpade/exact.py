"""Exact arithmetic substrate.

Polynomials in the energy variable E with rational (or nested polynomial)
coefficients, fraction-free determinants, and real-root isolation by Sturm
sequences with dyadic bisection.  Nothing in this module ever rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import gmpy2

Rational = Fraction


def as_rational(x) -> Fraction:
    """Convert ints, Fractions, mpfr values and 'p/q' or decimal strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, type(gmpy2.mpfr(0))):
        if not gmpy2.is_finite(x):
            raise ValueError(f"cannot convert {x} to a rational")
        n, d = x.as_integer_ratio()
        return Fraction(int(n), int(d))
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def _coerce(c):
    return Fraction(c) if isinstance(c, int) else c


class EPoly:
    """Dense univariate polynomial; ``coeffs[k]`` multiplies ``E**k``.

    Coefficients are normally Fractions, but any exact ring element works,
    including another EPoly (giving polynomials in E whose coefficients are
    polynomials in a second variable).  Use :meth:`scale` rather than ``*``
    when multiplying such nested polynomials by an inner element.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def variable(cls) -> EPoly:
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> EPoly:
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, EPoly):
            return self.coeffs == other.coeffs
        if not self.coeffs:
            return other == 0
        return len(self.coeffs) == 1 and self.coeffs[0] == other

    def __hash__(self) -> int:
        if len(self.coeffs) == 0:
            return hash(0)
        if len(self.coeffs) == 1:
            return hash(self.coeffs[0])
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"EPoly({list(self.coeffs)!r})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            cs = f"({c})" if isinstance(c, EPoly) else str(c)
            if k == 0:
                terms.append(cs)
            elif k == 1:
                terms.append(f"{cs}*E")
            else:
                terms.append(f"{cs}*E^{k}")
        return " + ".join(terms)

    # ring operations

    def __neg__(self) -> EPoly:
        return EPoly([-c for c in self.coeffs])

    def __add__(self, other) -> EPoly:
        if not isinstance(other, EPoly):
            other = EPoly((other,))
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return EPoly(out)

    __radd__ = __add__

    def __sub__(self, other) -> EPoly:
        if not isinstance(other, EPoly):
            other = EPoly((other,))
        return self + (-other)

    def __rsub__(self, other) -> EPoly:
        return EPoly((other,)) - self

    def __mul__(self, other) -> EPoly:
        if not isinstance(other, EPoly):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return EPoly()
        out = [None] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                t = x * y
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        zero = a[0] - a[0]
        return EPoly([zero if c is None else c for c in out])

    def __rmul__(self, other) -> EPoly:
        return self.scale(other)

    def __pow__(self, n: int) -> EPoly:
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = EPoly((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> EPoly:
        """Multiply every coefficient by the ring element ``c``."""
        return EPoly([x * c for x in self.coeffs])

    def shift(self, k: int = 1) -> EPoly:
        """Multiply by ``E**k``."""
        if not self.coeffs:
            return self
        zero = self.coeffs[0] - self.coeffs[0]
        return EPoly((zero,) * k + self.coeffs)

    def divmod(self, other: EPoly) -> tuple[EPoly, EPoly]:
        if not isinstance(other, EPoly):
            other = EPoly((other,))
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        d = other.coeffs
        r = list(self.coeffs)
        if len(r) < len(d):
            return EPoly(), EPoly(r)
        lead = d[-1]
        q = [None] * (len(r) - len(d) + 1)
        for k in range(len(q) - 1, -1, -1):
            coef = r[k + len(d) - 1] / lead
            q[k] = coef
            if coef != 0:
                for i, dc in enumerate(d):
                    r[k + i] = r[k + i] - coef * dc
        return EPoly(q), EPoly(r[: len(d) - 1])

    def __truediv__(self, other) -> EPoly:
        if isinstance(other, EPoly):
            if len(other.coeffs) == 1:
                other = other.coeffs[0]
            else:
                q, r = self.divmod(other)
                if r:
                    raise ArithmeticError("inexact polynomial division")
                return q
        if other == 0:
            raise ZeroDivisionError("polynomial division by zero")
        if isinstance(other, int):
            other = Fraction(other)
        return EPoly([c / other for c in self.coeffs])

    def __floordiv__(self, other) -> EPoly:
        return self.divmod(other)[0]

    def __mod__(self, other) -> EPoly:
        return self.divmod(other)[1]

    def derivative(self) -> EPoly:
        return EPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation; exact when ``x`` and the coefficients are."""
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return Fraction(0) if acc is None else acc

    evaluate = __call__

    def monic(self) -> EPoly:
        if not self.coeffs:
            return self
        return self / self.coeffs[-1]

    def primitive(self) -> EPoly:
        """Positive rational multiple with coprime integer coefficients.

        Only for Fraction coefficients.  Sign is preserved, so sign
        variations of a Sturm chain are unaffected.
        """
        if not self.coeffs:
            return self
        den = math.lcm(*(c.denominator for c in self.coeffs))
        nums = [c.numerator * (den // c.denominator) for c in self.coeffs]
        g = math.gcd(*nums)
        return EPoly([Fraction(n // g) for n in nums])


def poly_arith(p: EPoly, q, op: str) -> EPoly:
    """Dispatch ``add``/``sub``/``mul``/``scale`` (q is a scalar for scale)."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(q)
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_eval(p: EPoly, e) -> Fraction:
    return p(as_rational(e))


def poly_gcd(p: EPoly, q: EPoly) -> EPoly:
    """Monic gcd over the rationals."""
    while q:
        p, q = q, (p % q).primitive()
    return p.monic()


# determinants


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


def _bareiss(a: list[list], divide: Callable) -> object:
    n = len(a)
    sign = 1
    prev = None
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return a[0][0] - a[0][0]
        piv = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                t = rowi[j] * piv - aik * rowk[j]
                rowi[j] = t if prev is None else divide(t, prev)
        prev = piv
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def _det_rational(m: Sequence[Sequence]) -> Fraction:
    rows = []
    scale = 1
    for row in m:
        row = [Fraction(x) for x in row]
        den = math.lcm(*(x.denominator for x in row))
        scale *= den
        rows.append([gmpy2.mpz(x.numerator * (den // x.denominator)) for x in row])
    d = _bareiss(rows, gmpy2.divexact)
    return Fraction(int(d), scale)


def det_exact(m: Sequence[Sequence]):
    """Determinant by fraction-free (Bareiss) elimination.

    Rational matrices are cleared to integers row by row and eliminated in
    GMP integers; polynomial entries use exact polynomial division.
    """
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise ValueError("determinant needs a non-empty square matrix")
    if all(_is_rational(x) for row in m for x in row):
        return _det_rational(m)
    a = [list(row) for row in m]
    if n == 1:
        return a[0][0]
    return _bareiss(a, lambda t, p: t / p)


# root isolation


@dataclass(frozen=True)
class Bracket:
    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("bracket needs lo < hi")
        if {self.sign_lo, self.sign_hi} != {-1, 1}:
            raise ValueError("bracket endpoints must carry opposite nonzero signs")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class DegenerateRoot:
    """Root of even multiplicity: located, but with no sign change to certify.

    ``lo == hi`` when the root was hit exactly.  ``factor`` is the square-free
    factor vanishing there; it does change sign and can be refined.
    """

    lo: Fraction
    hi: Fraction
    multiplicity: int
    factor: EPoly

    def refine(self, tol: Fraction) -> Fraction:
        if self.lo == self.hi:
            return self.lo
        s_lo, s_hi = _sign(self.factor(self.lo)), _sign(self.factor(self.hi))
        return refine_root(self.factor, Bracket(self.lo, self.hi, s_lo, s_hi), tol)


class Isolation(NamedTuple):
    brackets: list[Bracket]
    degenerate: list[DegenerateRoot]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_sequence(p: EPoly) -> list[EPoly]:
    """Sturm chain of ``p`` (which should be square-free), primitive-normalised."""
    seq = [p.primitive(), p.derivative().primitive()]
    while seq[-1].degree > 0:
        r = seq[-2] % seq[-1]
        if not r:
            break
        seq.append((-r).primitive())
    return seq


def sign_variations(seq: Sequence[EPoly], x: Fraction) -> int:
    count = 0
    last = 0
    for q in seq:
        s = _sign(q(x))
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def count_roots(seq: Sequence[EPoly], a: Fraction, b: Fraction) -> int:
    """Distinct roots of ``seq[0]`` in the open interval (a, b)."""
    n = sign_variations(seq, a) - sign_variations(seq, b)
    if seq[0](b) == 0:
        n -= 1
    return n


def squarefree_decomposition(p: EPoly) -> list[tuple[EPoly, int]]:
    """Yun's algorithm: monic square-free factors ``f_i`` with ``p ~ prod f_i**i``."""
    if not p:
        raise ValueError("zero polynomial has no square-free decomposition")
    dp = p.derivative()
    a0 = poly_gcd(p, dp)
    b = p / a0
    c = dp / a0
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b / a
        c = d / a
        d = c - b.derivative()
        i += 1
    return out


def _pow2(k: int) -> Fraction:
    return Fraction(2**k) if k >= 0 else Fraction(1, 2 ** (-k))


def dyadic_between(lo: Fraction, hi: Fraction) -> Fraction:
    """A point of the middle half of (lo, hi) with power-of-two denominator."""
    quarter = (hi - lo) / 4
    k = math.floor(math.log2(quarter.numerator) - math.log2(quarter.denominator))
    while _pow2(k) > quarter:
        k -= 1
    while _pow2(k + 1) <= quarter:
        k += 1
    step = _pow2(k)
    return math.floor((lo + hi) / 2 / step) * step


def isolate_real_roots(p: EPoly, lo, hi) -> Isolation:
    """Isolate every distinct real root of ``p`` in the open interval (lo, hi).

    Odd-multiplicity roots come back as sign-change brackets of ``p``;
    even-multiplicity roots are listed separately as degenerate roots.
    """
    if not p:
        raise ValueError("zero polynomial has no isolated roots")
    lo, hi = as_rational(lo), as_rational(hi)
    if not lo < hi:
        raise ValueError("isolation interval needs lo < hi")
    if p.degree == 0:
        return Isolation([], [])
    factors = squarefree_decomposition(p)
    sqf = EPoly((1,))
    for f, _ in factors:
        sqf = sqf * f
    seq = sturm_sequence(sqf)

    intervals: list[tuple[Fraction, Fraction]] = []
    exact: list[Fraction] = []
    stack = [(lo, hi, count_roots(seq, lo, hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and sqf(a) != 0 and sqf(b) != 0:
            intervals.append((a, b))
            continue
        m = dyadic_between(a, b)
        if sqf(m) == 0:
            exact.append(m)
        stack.append((a, m, count_roots(seq, a, m)))
        stack.append((m, b, count_roots(seq, m, b)))

    brackets: list[Bracket] = []
    degenerate: list[DegenerateRoot] = []
    for a, b in intervals:
        for f, mult in factors:
            if _sign(f(a)) != _sign(f(b)):
                break
        else:  # pragma: no cover - one factor must own the root
            raise ArithmeticError("root owner not found during isolation")
        if mult % 2:
            brackets.append(Bracket(a, b, _sign(p(a)), _sign(p(b))))
        else:
            degenerate.append(DegenerateRoot(a, b, mult, f))
    for r in exact:
        f, mult = next((f, m) for f, m in factors if f(r) == 0)
        if mult % 2 == 0:
            degenerate.append(DegenerateRoot(r, r, mult, f))
            continue
        # symmetric bracket so that dyadic refinement lands back on r
        delta = Fraction(1)
        while True:
            a, b = r - delta, r + delta
            if a > lo and b < hi and sqf(a) != 0 and sqf(b) != 0 and count_roots(seq, a, b) == 1:
                break
            delta /= 2
        brackets.append(Bracket(a, b, _sign(p(a)), _sign(p(b))))
    brackets.sort(key=lambda br: br.lo)
    degenerate.sort(key=lambda dr: dr.lo)
    return Isolation(brackets, degenerate)


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in the closed interval [lo, hi]."""
    if lo > hi:
        lo, hi = hi, lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part: recurse on reciprocals of the fractional parts
    rest = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


def refine_root(f: Callable, b: Bracket, tol) -> Fraction:
    """Bisect ``b`` with dyadic midpoints until narrower than ``tol``.

    Every sign is taken from ``f`` evaluated exactly.  An exact zero at a
    midpoint, or at the simplest rational inside the final bracket, is
    returned as is; otherwise the final midpoint is returned.
    """
    return narrow_bracket(f, b, tol)[0]


def narrow_bracket(f: Callable, b: Bracket, tol) -> tuple[Fraction, Bracket | None]:
    """Like :func:`refine_root` but also returns the final bracket
    (``None`` when an exact zero was hit)."""
    tol = as_rational(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lo, hi, s_lo = b.lo, b.hi, b.sign_lo
    while hi - lo >= tol:
        m = dyadic_between(lo, hi)
        s = _sign(f(m))
        if s == 0:
            return m, None
        if s == s_lo:
            lo = m
        else:
            hi = m
    q = simplest_between(lo, hi)
    if lo < q < hi and f(q) == 0:
        return q, None
    return (lo + hi) / 2, Bracket(lo, hi, s_lo, -s_lo)


def format_rational(x: Fraction) -> str:
    x = as_rational(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_fixed(x, digits: int) -> str:
    """Fixed-point decimal string with exactly ``digits`` fractional digits."""
    x = as_rational(x)
    q = round(x * 10**digits)
    sign = "-" if q < 0 else ""
    q = abs(q)
    if digits == 0:
        return f"{sign}{q}"
    s = str(q).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"
