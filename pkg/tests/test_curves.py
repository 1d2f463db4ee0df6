import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as spi

from oscillab import forcing as fc
from oscillab.curves import (RotationLaw, boundary_curves, curve_constants, make_circle,
                             make_ellipse, rotation_condition, vertical_tangent_points,
                             vertical_tangent_points_fast)

ELLIPSE = make_ellipse(2.0, 1.0)


def ellipse_length(a, b):
    val, _ = spi.quad(lambda u: math.hypot(a * math.sin(u), b * math.cos(u)), 0, 2 * math.pi,
                      epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def test_circle_closed_form():
    c = make_circle(1.0)
    assert abs(c.total_length - 2 * math.pi) < 1e-12
    x, e, xp, ep = c.frame(0.0)
    assert (x, e) == pytest.approx((1.0, 0.0), abs=1e-15)
    assert (xp, ep) == pytest.approx((0.0, 1.0), abs=1e-15)


def test_ellipse_length_matches_quadrature():
    assert abs(ELLIPSE.total_length - ellipse_length(2.0, 1.0)) < 1e-10
    assert ELLIPSE.total_length == pytest.approx(9.688448, abs=1e-6)


@pytest.mark.parametrize("curve", [make_circle(1.0), make_circle(2.0, (1.0, -0.5)), ELLIPSE,
                                   make_ellipse(1.0, 3.0, (0.2, 0.1))])
def test_natural_parametrization(curve):
    s = np.linspace(0, curve.total_length, 10**4)
    _, _, xp, ep = curve.frame(s)
    assert np.max(np.abs(np.hypot(xp, ep) - 1.0)) < 1e-9
    k = curve.curvature(s)
    assert np.all(np.sign(k) == np.sign(k[0])) and np.min(np.abs(k)) > 1e-3


@pytest.mark.parametrize("curve", [make_circle(1.0), ELLIPSE])
def test_periodicity(curve):
    s = np.linspace(0, 3, 7)
    a = np.array(curve.frame(s))
    b = np.array(curve.frame(s + curve.total_length))
    assert np.max(np.abs(a - b)) < 1e-9


def test_ellipse_points_on_curve():
    s = np.linspace(0, ELLIPSE.total_length, 500)
    x, e, _, _ = ELLIPSE.frame(s)
    assert np.max(np.abs((x / 2) ** 2 + e**2 - 1)) < 1e-10


def test_tangent_angle_lift():
    for curve in (make_circle(1.0), ELLIPSE):
        s = np.linspace(0, 2 * curve.total_length, 2000)
        th = curve.tangent_angle(s)
        assert np.all(np.diff(th) * curve.orientation > 0)
        back = curve.inverse_tangent_angle(th)
        assert np.max(np.abs(back - s)) < 1e-9


def test_vertical_points_circle():
    c = make_circle(1.0)
    s1, s2 = vertical_tangent_points(c, 0.0)
    assert abs(s1 - math.pi) < 1e-10 and abs(s2 - 2 * math.pi) < 1e-10
    s1, s2 = vertical_tangent_points(c, 0.4)
    assert abs(s1 - (math.pi - 0.4)) < 1e-10 and abs(s2 - (2 * math.pi - 0.4)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(-3.0, 3.0))
def test_vertical_points_defining_equation(phi):
    for curve in (make_circle(1.3, (0.2, 0.0)), ELLIPSE):
        s1, s2 = vertical_tangent_points(curve, phi)
        _, _, xp1, ep1 = curve.frame(s1 % curve.total_length)
        _, _, xp2, ep2 = curve.frame(s2 % curve.total_length)
        assert abs(xp1 * math.sin(phi) + ep1 * math.cos(phi) + 1) < 1e-10
        assert abs(xp2 * math.sin(phi) + ep2 * math.cos(phi) - 1) < 1e-10
        assert s1 < s2 < s1 + curve.total_length
        f1, f2 = vertical_tangent_points_fast(curve, phi)
        assert abs(f1 - s1) < 1e-10 and abs(f2 - s2) < 1e-10


def test_vertical_points_continuous_in_phi():
    phis = np.linspace(-2, 2, 401)
    pts = np.array([vertical_tangent_points(ELLIPSE, p) for p in phis])
    assert np.max(np.abs(np.diff(pts, axis=0))) < 0.1


def test_curve_constants():
    assert curve_constants(make_circle(1.0)) == pytest.approx((1.0, 0.0), abs=1e-8)
    assert curve_constants(make_circle(2.0)) == pytest.approx((2.0, 0.0), abs=1e-8)
    m1, m2 = curve_constants(make_circle(1.0, (1.0, 0.0)))
    assert m2 > 0.5
    s = np.linspace(0, ELLIPSE.total_length, 20001)
    x, e, xp, ep = ELLIPSE.frame(s)
    m1, m2 = curve_constants(ELLIPSE)
    assert m1 >= np.max(np.abs(x * ep - e * xp)) - 1e-12
    assert m2 >= np.max(np.abs(x * xp + e * ep)) - 1e-12


def test_rotation_condition():
    assert rotation_condition(0.3, 1.0, 0.0)
    assert rotation_condition(0.0, 5.0, 7.0)
    assert not rotation_condition(1.5, 1.0, 0.0)


def test_rotation_law():
    law = RotationLaw.from_catalog(fc.sin(0.3))
    assert law.c == pytest.approx(0.3)
    assert law.period == pytest.approx(2 * math.pi)
    assert law.check()
    assert law.phi_ddot(1.0) == pytest.approx(-0.3 * math.sin(1.0))
    bad = RotationLaw.from_catalog(fc.sin(0.3), c=0.1)
    assert not bad.check()


def test_boundary_curves_follow_rotation():
    c = make_circle(1.0)
    law = RotationLaw.from_catalog(fc.sin(0.3))
    s1, s2 = boundary_curves(c, law)
    t = np.linspace(0, 6, 13)
    phi = 0.3 * np.sin(t)
    assert np.max(np.abs(s1(t) - (math.pi - phi))) < 1e-10
    assert np.max(np.abs(s2(t) - (2 * math.pi - phi))) < 1e-10
