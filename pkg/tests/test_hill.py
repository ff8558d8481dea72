from fractions import Fraction as F

import pytest

from hankelpade.exact import format_fixed
from hankelpade.hill import hill_roots, hill_sequence
from hankelpade.potentials import HARMONIC, QUARTIC, expand_rational
from hankelpade.series import SeriesParams, generate_series


def rational_table(g, J=21):
    return generate_series(expand_rational(1, g, J), SeriesParams(a=F(1, 2), J=J))


def test_harmonic_exact_roots():
    table = generate_series(HARMONIC, SeriesParams(a=F(1, 2), J=5))
    res = hill_roots(table, 3, 0, 12)
    assert res.values == [1, 5, 9]
    assert all(r.exact for r in res.roots)
    for res in hill_sequence(table, range(2, 6), 0, 2):
        assert res.values == [1]


def test_second_order_root_sits_above_the_window():
    # the M = 2 root is 3 - sqrt(2) for any g, so (0.5, 1.5) holds nothing
    table = rational_table(F(1, 10))
    assert hill_roots(table, 2, F(1, 2), F(3, 2)).roots == ()
    (r,) = hill_roots(table, 2, F(1, 2), 2).roots
    assert format_fixed(r.value, 2) == "1.59"
    assert abs(r.value - F(3) + F(14142135623730950488, 10**19)) < F(1, 10**18)


def test_g02_m12_has_no_root_in_window():
    assert hill_roots(rational_table(F(1, 5)), 12, F(1, 2), F(3, 2)).roots == ()


def test_roots_have_narrow_brackets():
    res = hill_roots(rational_table(F(1, 10)), 9, F(1, 2), F(3, 2), tol=F(1, 10**20))
    (r,) = res.roots
    assert r.bracket.width < F(1, 10**20)
    assert r.bracket.lo <= r.value <= r.bracket.hi


def test_series_too_short():
    table = generate_series(QUARTIC, SeriesParams(a=1, J=4))
    with pytest.raises(ValueError, match="series too short"):
        hill_roots(table, 5, 0, 2)
    with pytest.raises(ValueError, match="series too short"):
        hill_sequence(table, range(2, 6), 0, 2)


def test_quartic_hill_errors_shrink_overall():
    ref = F("1.0603620904841828996")
    table = generate_series(QUARTIC, SeriesParams(a=1, J=29))
    errs = [abs(hill_roots(table, M, F(9, 10), F(6, 5)).nearest(ref).value - ref) for M in (3, 11, 19, 29)]
    assert errs == sorted(errs, reverse=True)
