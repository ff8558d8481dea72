from fractions import Fraction as F

import gmpy2
import pytest

from hankelpade.exact import as_rational
from hankelpade.numerov import ODD, ShootingConfig, numerov_eigenvalue, numerov_with_error
from hankelpade.potentials import HARMONIC, QUARTIC, expand_rational


def solve(pot, bracket, h=F(1, 200), x_max=12, parity="even"):
    cfg = ShootingConfig(x_max, h, parity)
    with gmpy2.context(gmpy2.get_context(), precision=110):
        v = pot.closed_form()
    return as_rational(numerov_eigenvalue(v, cfg, bracket))


def test_harmonic():
    assert abs(solve(HARMONIC, (F(1, 2), F(3, 2))) - 1) < F(1, 10**9)


def test_harmonic_odd():
    assert abs(solve(HARMONIC, (F(5, 2), F(7, 2)), parity=ODD) - 3) < F(1, 10**8)


def test_fourth_order():
    e1 = abs(solve(HARMONIC, (F(1, 2), F(3, 2)), h=F(1, 50)) - 1)
    e2 = abs(solve(HARMONIC, (F(1, 2), F(3, 2)), h=F(1, 100)) - 1)
    assert 12 < e1 / e2 < 20


def test_quartic():
    assert abs(solve(QUARTIC, (F(9, 10), F(6, 5))) - F("1.0603620904841828996")) < F(1, 10**9)


def test_rational():
    e = solve(expand_rational(1, 1, 1), (F(11, 10), F(13, 10)))
    assert abs(e - F("1.23235072340605781386")) < F(1, 10**9)


def test_domain_insensitivity():
    a = solve(QUARTIC, (F(9, 10), F(6, 5)), x_max=8)
    b = solve(QUARTIC, (F(9, 10), F(6, 5)), x_max=12)
    assert abs(a - b) < F(1, 10**12)


def test_error_estimate():
    res = numerov_with_error(HARMONIC.closed_form, ShootingConfig(12, F(1, 100)), (F(1, 2), F(3, 2)))
    err = abs(as_rational(res.E) - 1)
    assert err < as_rational(res.error_estimate) * 2
    assert res.h == F(1, 200)


def test_bad_bracket():
    with pytest.raises(ValueError, match="no eigenvalue isolated in bracket"):
        solve(HARMONIC, (F(3, 2), F(2)))


def test_config_validation():
    with pytest.raises(ValueError):
        ShootingConfig(12, F(7, 1000))
    with pytest.raises(ValueError):
        ShootingConfig(0, F(1, 10))
    with pytest.raises(ValueError):
        ShootingConfig(1, F(1, 10), "sideways")
