from fractions import Fraction as F
from itertools import permutations

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankelpade.exact import (
    Bracket,
    EPoly,
    count_roots,
    det_exact,
    dyadic_between,
    format_fixed,
    format_rational,
    isolate_real_roots,
    poly_arith,
    poly_eval,
    poly_gcd,
    refine_root,
    sturm_sequence,
)

E = EPoly.variable()
fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def cofactor_det(m):
    # Leibniz formula; only for tiny matrices
    n = len(m)
    total = F(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = F(1)
        for i, j in enumerate(perm):
            term *= m[i][j]
        total += -term if inv % 2 else term
    return total


def test_poly_arith_examples():
    p = poly_arith(poly_arith(E - 1, E - 5, "mul"), F(1, 24), "scale")
    assert p == EPoly([F(5, 24), F(-6, 24), F(1, 24)])
    assert poly_arith(p, -p, "add").is_zero()
    c1 = EPoly([1, F(-1, 2)])  # a - E/2 at a = 1
    assert poly_arith(c1, c1, "mul") == EPoly([1, -1, F(1, 4)])


def test_degree_rules():
    p, q = EPoly([1, 2, 3]), EPoly([0, 1])
    assert (p * q).degree == p.degree + q.degree
    assert (p + q).degree <= max(p.degree, q.degree)
    assert EPoly([]).degree == -1


def test_poly_eval_examples():
    assert poly_eval(EPoly([1, 0, 0, F(-1, 24)]), 2) == F(2, 3)
    assert poly_eval(EPoly([F(1, 2), F(-1, 2)]), 1) == 0
    assert poly_eval(EPoly([0, 0, F(1, 24)]), 2) == F(1, 6)


def test_division_and_gcd():
    a, b = (E - 1) * (E - 2), (E - 1) * (E + 3)
    assert a / (E - 1) == E - 2
    assert poly_gcd(a, b) == E - 1
    with pytest.raises(ArithmeticError):
        _ = a / (E - 3)


def test_det_identity_and_singular():
    eye = [[F(int(i == j)) for j in range(4)] for i in range(4)]
    assert det_exact(eye) == 1
    assert det_exact([[F(1), F(2)], [F(2), F(4)]]) == 0
    assert det_exact([[E, 1], [1, E]]) == E * E - 1


def test_det_polynomial_entries_match_cofactor():
    m = [[E, 1, E * E], [2, E - 1, 3], [E, 0, 1]]
    assert det_exact(m) == (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_equals_cofactor(m):
    assert det_exact(m) == cofactor_det(m)


@pytest.mark.parametrize("D", [2, 3, 4, 5])
def test_row_scaling_gives_kappa_power(D):
    m = [[F(i * i + 3 * j + 1, j + 2) for j in range(D)] for i in range(D)]
    scaled = [[3 * x for x in row] for row in m]
    assert det_exact(scaled) == 3**D * det_exact(m)


@settings(max_examples=50, deadline=None)
@given(fractions, fractions, fractions)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


def test_isolate_examples():
    iso = isolate_real_roots((5 - E) * (1 - E) / 24, 0, 10)
    roots = [refine_root(lambda x: poly_eval((5 - E) * (1 - E), x), b, F(1, 10**6)) for b in iso.brackets]
    assert roots == [1, 5]
    assert not iso.degenerate

    cubic = 1 - E**3 / 24
    iso = isolate_real_roots(cubic, 0, 10)
    assert len(iso.brackets) == 1
    r = refine_root(cubic, iso.brackets[0], F(1, 10**30))
    with gmpy2.context(gmpy2.get_context(), precision=200):
        ref = gmpy2.cbrt(gmpy2.mpfr(24))
        assert abs(gmpy2.mpfr(r.numerator) / r.denominator - ref) < gmpy2.mpfr(10) ** -29

    iso = isolate_real_roots(E * E / 24, -1, 1)
    assert not iso.brackets
    assert len(iso.degenerate) == 1
    assert iso.degenerate[0].multiplicity == 2
    assert iso.degenerate[0].refine(F(1, 100)) == 0


def test_isolate_zero_polynomial_errors():
    with pytest.raises(ValueError, match="zero polynomial has no isolated roots"):
        isolate_real_roots(EPoly([]), 0, 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6), st.integers(1, 3))
def test_sturm_count_matches_brackets(roots, extra_mult):
    p = EPoly([1])
    for i, r in enumerate(roots):
        p = p * (E - F(r, 2)) ** (extra_mult if i == 0 else 1)
    lo, hi = F(-7, 3), F(10, 3)
    iso = isolate_real_roots(p, lo, hi)
    sqf = p / poly_gcd(p, p.derivative())
    expected = count_roots(sturm_sequence(sqf), lo, hi)
    assert len(iso.brackets) + len(iso.degenerate) == expected
    assert expected == len({F(r, 2) for r in roots if lo < F(r, 2) < hi})
    for b in iso.brackets:
        assert lo <= b.lo < b.hi <= hi


def test_refine_root_certificate():
    f = lambda x: x - F(1, 3)  # noqa: E731
    tol = F(1, 2**20)
    r = refine_root(f, Bracket(F(0), F(1), -1, 1), tol)
    assert abs(r - F(1, 3)) < tol
    assert r == F(1, 3)  # the simplest rational in the last bracket is tried

    g = E * E - 2
    r = refine_root(g, Bracket(F(1), F(2), -1, 1), tol)
    assert r.denominator & (r.denominator - 1) == 0  # dyadic midpoint
    assert g(r - tol / 2) < 0 < g(r + tol / 2)


def test_refine_root_exact_hit():
    assert refine_root(lambda x: x - F(1, 2), Bracket(F(0), F(1), -1, 1), F(1, 100)) == F(1, 2)


def test_bracket_validation():
    with pytest.raises(ValueError):
        Bracket(F(1), F(0), -1, 1)
    with pytest.raises(ValueError):
        Bracket(F(0), F(1), 1, 1)


def test_dyadic_between_is_dyadic_and_inside():
    x = dyadic_between(F(1, 3), F(2, 5))
    assert F(1, 3) < x < F(2, 5)
    assert x.denominator & (x.denominator - 1) == 0


def test_formatting():
    assert format_rational(F(-3, 4)) == "-3/4"
    assert format_rational(F(2)) == "2"
    assert format_fixed(F(1, 3), 5) == "0.33333"
    assert format_fixed(F(-2, 3), 2) == "-0.67"
