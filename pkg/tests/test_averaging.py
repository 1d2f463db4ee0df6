import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscillab import forcing as fc
from oscillab.averaging import (averaged_field, convergence_study, deviation, fit_order,
                                mean_value)
from oscillab.errors import DegenerateFit
from oscillab.forcing import OscillatoryForcing
from oscillab.models import StripSystem, pendulum_field, pendulum_system, strip_field, strip_system
from oscillab.ode import State

HALF_PI = math.pi / 2


def osc(fn=fc.sin(), lam=10.0):
    return OscillatoryForcing.from_catalog(fn, lam)


def exp_strip(u=None):
    return strip_system(StripSystem(lambda x, y: 1.0, lambda x, y: y, u))


def strip_deviation_exact(lam, horizon=3.0, n=1000):
    # e' = e + sin(lam t), e(0) = 0
    t = np.linspace(0, horizon, n)
    e = (lam * np.exp(t) - lam * np.cos(lam * t) - np.sin(lam * t)) / (1 + lam**2)
    return float(np.max(np.abs(e)))


# mean_value ---------------------------------------------------------------------

def test_mean_of_sine():
    assert abs(mean_value(np.sin, 2 * math.pi)) < 1e-12


def test_mean_of_cos_squared():
    assert abs(mean_value(lambda t: np.cos(t) ** 2, 2 * math.pi) - 0.5) < 1e-12


def test_mean_of_constant():
    assert mean_value(lambda t: 1.0, 5.0) == pytest.approx(1.0, abs=1e-15)


def test_mean_needs_positive_period():
    with pytest.raises(ValueError):
        mean_value(np.sin, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_mean_linearity(a, b):
    g1 = lambda t: np.cos(t) ** 2  # noqa: E731
    g2 = lambda t: np.sin(t) + 0.3  # noqa: E731
    T = 2 * math.pi
    lhs = mean_value(lambda t: a * g1(t) + b * g2(t), T)
    assert abs(lhs - (a * mean_value(g1, T) + b * mean_value(g2, T))) < 1e-11


# averaged_field -------------------------------------------------------------------

def test_zero_mean_averaged_field_is_unforced():
    sys = pendulum_system(fc.cos(0.5), osc())
    avg = averaged_field(sys, n_samples=200)
    free = pendulum_field(fc.cos(0.5))
    rng = np.random.default_rng(3)
    for _ in range(1000):
        t = rng.uniform(0, 20)
        y = rng.uniform([-1, -2], [4, 2])
        assert np.max(np.abs(avg.averaged(t, y) - free(t, y))) < 1e-12
    assert avg.mean == pytest.approx(0.0, abs=1e-12)


def test_strip_averaged_field_drops_forcing():
    avg = averaged_field(exp_strip(osc()), n_samples=100)
    y = np.array([0.2, -0.4])
    assert avg.averaged(1.234, y) == pytest.approx([1.0, -0.4], abs=1e-12)


def test_nonzero_mean_shifts_gravity():
    cos2 = fc.const(0.5) + fc.cos(0.5, 2.0)
    avg = averaged_field(pendulum_system(None, osc(cos2)), n_samples=100)
    assert avg.mean == pytest.approx(0.5, abs=1e-12)
    assert avg.averaged(0.0, np.array([0.0, 0.0]))[1] == pytest.approx(-1.5, abs=1e-12)


def test_diagnostics_are_reproducible():
    sys = pendulum_system(fc.cos(0.5), osc())
    a = averaged_field(sys, seed=5, n_samples=500)
    b = averaged_field(sys, seed=5, n_samples=500)
    assert (a.M, a.mu) == (b.M, b.mu)
    # |x''| <= 0.5 + 2 on the box and |x'| <= 2
    assert 1.0 < a.M <= 2.5 + 1e-12
    assert a.mu > 0


# deviation ------------------------------------------------------------------------

def test_zero_forcing_gives_zero_deviation():
    sys = pendulum_system(fc.cos(0.5), osc(fc.zero()))
    avg = averaged_field(sys, diagnostics=False)
    assert deviation(avg, State(0.0, [HALF_PI, 0.0]), 5.0, 1e-10) <= 2e-10


@pytest.mark.parametrize("lam", [20.0, 40.0, 80.0])
def test_strip_deviation_matches_closed_form(lam):
    avg = averaged_field(exp_strip(osc(lam=lam)), diagnostics=False)
    got = deviation(avg, State(0.0, [0.0, 0.0]), 3.0, 1e-11)
    assert got == pytest.approx(strip_deviation_exact(lam), rel=1e-6)


def test_pendulum_deviation_decreases():
    sys = pendulum_system(fc.cos(0.5), osc())
    ic = State(0.0, [HALF_PI, 0.0])
    d10 = deviation(averaged_field(sys.with_lambda(10.0), diagnostics=False), ic, 5.0, 1e-11)
    d160 = deviation(averaged_field(sys.with_lambda(160.0), diagnostics=False), ic, 5.0, 1e-11)
    assert 0 < d160 < d10


# convergence_study -----------------------------------------------------------------

def test_fit_order_exact_power_law():
    lams = np.array([10.0, 20.0, 40.0, 80.0])
    order, mask = fit_order(lams, 3.0 / lams**1.5, 1e-10)
    assert order == pytest.approx(1.5, abs=1e-12)
    assert all(mask)


def test_fit_ignores_noise_level_points():
    lams = np.array([10.0, 20.0, 40.0, 80.0])
    devs = np.array([1e-3, 5e-4, 5e-9, 1e-9])
    order, mask = fit_order(lams, devs, 1e-10)
    assert list(mask) == [True, True, False, False]
    assert order == pytest.approx(1.0, abs=1e-12)


def test_zero_forcing_is_degenerate():
    sys = pendulum_system(fc.cos(0.5), osc(fc.zero()))
    with pytest.raises(DegenerateFit):
        convergence_study(sys, [10, 20, 40, 80], State(0.0, [HALF_PI, 0.0]), 5.0)


def test_study_preconditions():
    sys = exp_strip(osc())
    ic = State(0.0, [0.0, 0.0])
    with pytest.raises(ValueError):
        convergence_study(sys, [10, 20, 40], ic, 3.0)
    with pytest.raises(ValueError):
        convergence_study(sys, [10, 40, 20, 80], ic, 3.0)


def test_strip_convergence_order():
    rep = convergence_study(exp_strip(osc()), [20, 40, 80, 160], State(0.0, [0.0, 0.0]), 3.0)
    assert 0.8 <= rep.fitted_order <= 1.2
    assert all(d >= 0 for d in rep.deviations)
    d = rep.to_dict()
    assert d["lambdas"] == [20.0, 40.0, 80.0, 160.0]
    assert rep.rows()[0] == (20.0, rep.deviations[0])


def test_pendulum_monotone_trend():
    sys = pendulum_system(fc.cos(0.5), osc())
    rep = convergence_study(sys, [10, 20, 40, 80, 160], State(0.0, [HALF_PI, 0.0]), 5.0)
    for a, b in zip(rep.deviations, rep.deviations[1:]):
        assert b <= 1.5 * a
    assert rep.fitted_order >= 0.8
