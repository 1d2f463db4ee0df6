import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscillab import forcing as fc
from oscillab._periods import common_period
from oscillab.errors import IncommensuratePeriods
from oscillab.forcing import CatalogFunction, Forcing, OscillatoryForcing, Term


def test_term_values_scalar_and_array():
    f = fc.sin(2.0, 3.0, 0.5)
    assert f(0.1) == pytest.approx(2 * math.sin(0.3 + 0.5), abs=1e-15)
    t = np.linspace(0, 1, 5)
    assert np.allclose(f(t), 2 * np.sin(3 * t + 0.5), atol=1e-15)
    assert fc.const(1.5)(t).shape == t.shape


def test_unknown_term_kind():
    with pytest.raises(ValueError):
        Term("tan", 1.0)


def test_catalog_limits():
    with pytest.raises(ValueError):
        CatalogFunction(())
    five = fc.sin() + fc.cos() + fc.sin() + fc.cos()
    with pytest.raises(ValueError):
        five + fc.const(1.0)


def test_catalog_period_and_mean():
    f = fc.sin(1.0, 2.0) + fc.cos(0.5, 3.0) + fc.const(0.25)
    assert f.period == pytest.approx(2 * math.pi)
    assert f.mean == 0.25
    assert fc.const(2.0).period is None
    assert fc.zero().is_zero


def test_derivative_and_bound():
    f = fc.sin(0.3)
    d = f.derivative()
    t = np.linspace(0, 7, 50)
    assert np.allclose(d(t), 0.3 * np.cos(t), atol=1e-15)
    assert np.allclose(d.derivative()(t), -0.3 * np.sin(t), atol=1e-15)
    assert (fc.sin(0.3) + fc.cos(0.2)).bound() == pytest.approx(0.5)


def test_forcing_from_catalog_check():
    f = Forcing.from_catalog(fc.cos(0.5))
    assert f.f_bound == 0.5 and f.f_dot_bound == 0.5
    assert f.check()
    assert Forcing(lambda t: 2 * np.ones_like(t), 1.0, 0.0).check() is False


def test_oscillatory_forcing():
    g = OscillatoryForcing.from_catalog(fc.sin(), 10.0)
    assert g(0.05) == pytest.approx(math.sin(0.5))
    assert g.omega_max == pytest.approx(10.0)
    assert g.fast_period == pytest.approx(2 * math.pi / 10)
    assert g.is_periodic()
    with pytest.raises(ValueError):
        OscillatoryForcing.from_catalog(fc.sin(), -1.0)
    flat = g.replaced_by(0.0)
    assert flat.omega_max == 0.0 and flat(1.234) == 0.0


def test_constant_forcing_not_resolved():
    g = OscillatoryForcing.from_catalog(fc.const(1.0), 50.0)
    assert g.omega_max == 0.0


# common periods --------------------------------------------------------------------

def test_common_period_examples():
    assert common_period([2 * math.pi, 2 * math.pi / 8]) == pytest.approx(2 * math.pi)
    assert common_period([5.0]) == 5.0
    assert common_period([2 * math.pi, math.pi]) == pytest.approx(2 * math.pi)
    assert common_period([2.0, 3.0]) == pytest.approx(6.0)


def test_common_period_incommensurate():
    # no fraction with denominator <= 1e6 lies within 1e-9 of this ratio
    with pytest.raises(IncommensuratePeriods):
        common_period([1.0, 1.0 + 1.4142e-7])


def test_common_period_denominator_cap_accepts_close_rationals():
    # sqrt(2) is matched to ~1e-12 by a convergent with denominator < 1e6
    T = common_period([1.0, math.sqrt(2)])
    assert T > 1e5


def test_common_period_base_divisibility():
    assert common_period([math.pi / 4], base=2 * math.pi) == pytest.approx(2 * math.pi)
    with pytest.raises(IncommensuratePeriods):
        common_period([2 * math.pi / 8.5], base=2 * math.pi)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 50), st.integers(1, 50))
def test_common_period_is_multiple(p, q):
    T = common_period([p * 0.1, q * 0.1])
    for per in (p * 0.1, q * 0.1):
        r = T / per
        assert abs(r - round(r)) < 1e-9
    assert T <= p * q * 0.1 * (1 + 1e-12)
