from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankelpade.exact import EPoly, isolate_real_roots, refine_root
from hankelpade.potentials import HARMONIC, QUARTIC, expand_rational, polynomial_potential
from hankelpade.series import SeriesParams, SeriesTable, generate_series, residual_check, series_values

E = EPoly.variable()
small = st.fractions(min_value=-3, max_value=3, max_denominator=7)


def test_quartic_symbolic_a():
    A = EPoly([0, 1])  # the width parameter as a polynomial variable
    table = generate_series(QUARTIC, SeriesParams(a=A, J=2))
    assert list(table.c[1].coeffs) == [A, F(-1, 2)]
    assert list(table.c[2].coeffs) == [A * A / 2, A.scale(F(-1, 2)), F(1, 24)]


def test_harmonic_ground_state():
    table = generate_series(HARMONIC, SeriesParams(a=F(1, 2), J=8))
    assert table.c[1] == (1 - E) / 2
    assert table.c[2] == (5 - E) * (1 - E) / 24
    assert all(c(1) == 0 for c in table.c[1:])


def test_quartic_a0_c3():
    table = generate_series(QUARTIC, SeriesParams(a=0, J=3))
    assert table.c[3] == (1 - E**3 / 24) / 30


@pytest.mark.parametrize("pot", [QUARTIC, HARMONIC, polynomial_potential([1, 0, F(1, 2)]), expand_rational(1, F(1, 5), 12)])
@pytest.mark.parametrize("s", [0, 1])
def test_degree_equals_index(pot, s):
    table = generate_series(pot, SeriesParams(a=F(2, 3), s=s, J=12))
    assert [c.degree for c in table.c] == list(range(13))


def test_residual_examples():
    harmonic = generate_series(HARMONIC, SeriesParams(a=F(1, 2), J=6))
    assert residual_check(harmonic, 1) == 0
    quartic = generate_series(QUARTIC, SeriesParams(a=1, J=10))
    assert residual_check(quartic, F(17, 13)) == 0
    c = list(quartic.c)
    c[5] = c[5] + F(1, 1000)
    corrupted = SeriesTable(quartic.params, quartic.potential, tuple(c))
    assert residual_check(corrupted, F(17, 13)) != 0


@settings(max_examples=40, deadline=None)
@given(small, small, st.lists(small, min_size=1, max_size=3).filter(any), st.sampled_from([0, 1]))
def test_residual_vanishes(a, e, v, s):
    table = generate_series(polynomial_potential(v), SeriesParams(a=a, s=s, J=8))
    assert residual_check(table, e) == 0


def test_normalisation_is_linear():
    t1 = generate_series(QUARTIC, SeriesParams(a=1, J=6))
    t3 = generate_series(QUARTIC, SeriesParams(a=1, J=6), c0=3)
    assert all(b == a * 3 for a, b in zip(t1.c, t3.c))


def test_numeric_recurrence_agrees():
    pot = expand_rational(1, F(1, 10), 10)
    table = generate_series(pot, SeriesParams(a=F(1, 2), J=10))
    assert table.values_at(F(7, 5)) == series_values(pot, F(1, 2), 0, 10, F(7, 5))


def test_truncation_error_names_coefficient():
    with pytest.raises(ValueError, match="v_6"):
        generate_series(expand_rational(1, 1, 5), SeriesParams(a=F(1, 2), J=6))


@pytest.mark.parametrize("M", [1, 2, 3, 4, 6])
def test_harmonic_closed_form_roots(M):
    table = generate_series(HARMONIC, SeriesParams(a=F(1, 2), J=M))
    iso = isolate_real_roots(table.c[M], -1, 4 * M + 2)
    roots = [refine_root(table.c[M], b, F(1, 10**6)) for b in iso.brackets]
    assert roots == [4 * k + 1 for k in range(M)]


def test_params_validation():
    with pytest.raises(ValueError):
        SeriesParams(a=1, s=2)
    with pytest.raises(ValueError):
        SeriesParams(a=1, J=0)
