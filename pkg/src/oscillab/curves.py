"""Closed strictly convex curves in natural (arclength) parametrization.

A curve exposes ``xi(s), eta(s)`` and the unit tangent ``(xi'(s), eta'(s))``
for any real ``s`` (taken modulo the total length), plus the lifted tangent
angle and its inverse, which locate the points where the tangent of the
rotated curve is vertical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, interpolate, optimize

from .errors import RootNotBracketed
from .forcing import CatalogFunction

TWO_PI = 2 * math.pi
GRID_NODES = 4096
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


class ConvexCurve:
    """Base class; subclasses provide :meth:`frame` and :meth:`second`."""

    total_length: float
    orientation: int = 1  # +1 counter-clockwise, -1 clockwise

    def frame(self, s):
        """``(xi, eta, xi', eta')`` at arclength ``s``."""
        raise NotImplementedError

    def second(self, s):
        """``(xi'', eta'')`` at arclength ``s``."""
        raise NotImplementedError

    def xi(self, s):
        return self.frame(s)[0]

    def eta(self, s):
        return self.frame(s)[1]

    def xi_prime(self, s):
        return self.frame(s)[2]

    def eta_prime(self, s):
        return self.frame(s)[3]

    def curvature(self, s):
        _, _, xp, ep = self.frame(s)
        xpp, epp = self.second(s)
        return xp * epp - ep * xpp

    # Lifted tangent angle --------------------------------------------------

    def _build_angle_table(self):
        s = np.linspace(0.0, self.total_length, GRID_NODES + 1)
        _, _, xp, ep = self.frame(s[:-1])
        theta = np.unwrap(np.arctan2(ep, xp))
        theta = np.append(theta, theta[0] + TWO_PI * self.orientation)
        if np.any(np.diff(theta) * self.orientation <= 0):
            raise RootNotBracketed("tangent angle is not strictly monotone: curve is not strictly convex")
        self._s_grid = s
        self._theta_grid = theta

    def tangent_angle(self, s):
        """Continuous angle of the unit tangent, ``Theta(s + L) = Theta(s) + 2*pi*orientation``."""
        s = np.asarray(s, dtype=float)
        L = self.total_length
        m = np.floor(s / L)
        r = s - m * L
        ref = np.interp(r, self._s_grid, self._theta_grid)
        _, _, xp, ep = self.frame(r)
        a = np.arctan2(ep, xp)
        a = a + TWO_PI * np.round((ref - a) / TWO_PI)
        return a + TWO_PI * m * self.orientation

    def _reduce_angle(self, theta):
        theta = np.asarray(theta, dtype=float)
        m = np.floor(self.orientation * (theta - self._theta_grid[0]) / TWO_PI)
        return theta - TWO_PI * m * self.orientation, m

    def inverse_tangent_angle(self, theta):
        """Arclength ``s`` on the covering line with ``tangent_angle(s) == theta``."""
        tr, m = self._reduce_angle(theta)
        grid_t, grid_s = self._theta_grid, self._s_grid
        if self.orientation < 0:
            grid_t, grid_s = grid_t[::-1], grid_s[::-1]
        r = np.interp(tr, grid_t, grid_s)
        for _ in range(4):
            r = r - (self.tangent_angle(r) - tr) / self.curvature(r)
        return r + m * self.total_length

    def _bracket(self, theta):
        tr, m = self._reduce_angle(theta)
        j = np.searchsorted(self._theta_grid * self.orientation, tr * self.orientation) - 1
        j = int(np.clip(j, 0, GRID_NODES - 1))
        shift = float(m) * self.total_length
        return self._s_grid[j] + shift, self._s_grid[j + 1] + shift

    def reference_angle(self) -> float:
        """Lift of ``-pi/2`` whose preimage lies in ``[0, L)``; anchors the ``s_1`` branch."""
        t0 = self._theta_grid[0]
        if self.orientation > 0:
            k = math.ceil((t0 + math.pi / 2) / TWO_PI)
        else:
            k = math.floor((t0 + math.pi / 2) / TWO_PI)
        return -math.pi / 2 + TWO_PI * k


class Circle(ConvexCurve):
    """``xi = cx + R cos(s/R)``, ``eta = cy + R sin(s/R)``, counter-clockwise."""

    def __init__(self, R: float, center=(0.0, 0.0)):
        if not R > 0:
            raise ValueError(f"radius must be positive, got {R!r}")
        self.R = float(R)
        self.center = (float(center[0]), float(center[1]))
        self.total_length = TWO_PI * self.R
        self.orientation = 1
        self._build_angle_table()

    def frame(self, s):
        u = np.asarray(s, dtype=float) / self.R
        c, sn = np.cos(u), np.sin(u)
        return self.center[0] + self.R * c, self.center[1] + self.R * sn, -sn, c

    def second(self, s):
        u = np.asarray(s, dtype=float) / self.R
        return -np.cos(u) / self.R, -np.sin(u) / self.R

    def tangent_angle(self, s):
        return np.asarray(s, dtype=float) / self.R + math.pi / 2

    def inverse_tangent_angle(self, theta):
        return (np.asarray(theta, dtype=float) - math.pi / 2) * self.R

    def __repr__(self):
        return f"Circle(R={self.R!r}, center={self.center!r})"


class ParametricCurve(ConvexCurve):
    """Arclength reparametrization of a closed curve ``(x(u), y(u))``, ``u`` in ``[0, period)``.

    Cumulative length is tabulated at ``nodes`` parameter values by adaptive
    quadrature; ``u(s)`` is a cubic Hermite interpolant polished by Newton
    steps on a Gauss-Legendre length integral.
    """

    def __init__(self, x, y, dx, dy, ddx, ddy, period=TWO_PI, nodes=GRID_NODES, name="curve"):
        self._x, self._y = x, y
        self._dx, self._dy = dx, dy
        self._ddx, self._ddy = ddx, ddy
        self.period = float(period)
        self.name = name
        u = np.linspace(0.0, self.period, nodes + 1)
        pieces = [integrate.quad(self._speed, a, b, epsabs=1e-15, epsrel=1e-14)[0]
                  for a, b in zip(u[:-1], u[1:])]
        S = np.concatenate([[0.0], np.cumsum(pieces)])
        self._u_nodes, self._S_nodes = u, S
        self.total_length = float(S[-1])
        self._u_of_s = interpolate.CubicHermiteSpline(S, u, 1.0 / self._speed(u))
        cross = dx(u) * ddy(u) - dy(u) * ddx(u)
        if not (np.all(cross > 0) or np.all(cross < 0)):
            raise RootNotBracketed("curvature changes sign: curve is not strictly convex")
        self.orientation = 1 if cross[0] > 0 else -1
        self._build_angle_table()

    def _speed(self, u):
        return np.hypot(self._dx(u), self._dy(u))

    def _length_to(self, u):
        k = np.clip(np.searchsorted(self._u_nodes, u, side="right") - 1, 0, self._u_nodes.size - 2)
        a = self._u_nodes[k]
        half = 0.5 * (u - a)
        mid = a + half
        pts = mid[..., None] + half[..., None] * _GL_X
        return self._S_nodes[k] + half * (self._speed(pts) @ _GL_W)

    def param(self, s):
        """Curve parameter ``u`` at arclength ``s`` (reduced modulo the length)."""
        s = np.asarray(s, dtype=float)
        r = np.mod(s, self.total_length)
        u = self._u_of_s(r)
        for _ in range(2):
            u = u - (self._length_to(u) - r) / self._speed(u)
        return u

    def frame(self, s):
        u = self.param(s)
        dx, dy = self._dx(u), self._dy(u)
        v = np.hypot(dx, dy)
        return self._x(u), self._y(u), dx / v, dy / v

    def second(self, s):
        u = self.param(s)
        dx, dy = self._dx(u), self._dy(u)
        v = np.hypot(dx, dy)
        kappa = (dx * self._ddy(u) - dy * self._ddx(u)) / v**3
        return -kappa * dy / v, kappa * dx / v

    def __repr__(self):
        return f"ParametricCurve({self.name}, length={self.total_length!r})"


def make_circle(R: float = 1.0, center=(0.0, 0.0)) -> Circle:
    return Circle(R, center)


def make_ellipse(a: float, b: float, center=(0.0, 0.0)) -> ParametricCurve:
    """Ellipse with semi-axes ``a`` (along xi) and ``b`` (along eta), counter-clockwise."""
    if not (a > 0 and b > 0):
        raise ValueError("ellipse semi-axes must be positive")
    cx, cy = center
    curve = ParametricCurve(
        lambda u: cx + a * np.cos(u), lambda u: cy + b * np.sin(u),
        lambda u: -a * np.sin(u), lambda u: b * np.cos(u),
        lambda u: -a * np.cos(u), lambda u: -b * np.sin(u),
        name=f"ellipse(a={a!r}, b={b!r})")
    curve.a, curve.b = float(a), float(b)
    return curve


# Vertical-tangent points ---------------------------------------------------

def _bisect_angle(curve, target, tol=1e-13):
    lo, hi = curve._bracket(target)
    sign = curve.orientation
    f_lo = sign * (float(curve.tangent_angle(lo)) - target)
    f_hi = sign * (float(curve.tangent_angle(hi)) - target)
    # targets on a grid node land on a bracket end up to rounding
    if abs(f_lo) <= 1e-12:
        return lo
    if abs(f_hi) <= 1e-12:
        return hi
    if f_lo > 0 or f_hi < 0:
        raise RootNotBracketed(f"tangent angle {target!r} not bracketed on [{lo!r}, {hi!r}]")
    for _ in range(200):
        if hi - lo <= tol * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if sign * (float(curve.tangent_angle(mid)) - target) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def vertical_tangent_points(curve: ConvexCurve, phi: float):
    """Arclengths ``(s1, s2)`` with ``xi' sin(phi) + eta' cos(phi) = -1`` and ``+1``.

    The branch is continuous in ``phi`` on the covering line: ``s1`` lies in
    ``[0, L)`` at ``phi = 0`` and ``s1 < s2 < s1 + L`` always.
    """
    target = curve.reference_angle() - float(phi)
    s1 = _bisect_angle(curve, target)
    s2 = _bisect_angle(curve, target + math.pi * curve.orientation)
    return s1, s2


def vertical_tangent_points_fast(curve: ConvexCurve, phi):
    """Vectorized Newton variant of :func:`vertical_tangent_points`."""
    target = curve.reference_angle() - np.asarray(phi, dtype=float)
    return (curve.inverse_tangent_angle(target),
            curve.inverse_tangent_angle(target + math.pi * curve.orientation))


def boundary_curves(curve: ConvexCurve, law: "RotationLaw"):
    """Callables ``t -> s1(t)`` and ``t -> s2(t)`` (vectorized in ``t``)."""
    ref = curve.reference_angle()
    half_turn = math.pi * curve.orientation

    def s1(t):
        return curve.inverse_tangent_angle(ref - law.phi(np.asarray(t, dtype=float)))

    def s2(t):
        return curve.inverse_tangent_angle(ref + half_turn - law.phi(np.asarray(t, dtype=float)))

    return s1, s2


# Constants of the rotating-curve problem --------------------------------------

def _moment_arm(curve, s):
    x, y, xp, yp = curve.frame(s)
    return np.abs(x * yp - y * xp)


def _radial_rate(curve, s):
    x, y, xp, yp = curve.frame(s)
    return np.abs(x * xp + y * yp)


def _refined_max(fn, L, n=10**4):
    s = np.linspace(0.0, L, n, endpoint=False)
    vals = fn(s)
    j = int(np.argmax(vals))
    best = float(vals[j])
    ds = L / n
    res = optimize.minimize_scalar(lambda x: -float(fn(np.array([x]))[0]),
                                   bounds=(s[j] - ds, s[j] + ds), method="bounded",
                                   options={"xatol": 1e-9})
    return max(best, -float(res.fun))


def curve_constants(curve: ConvexCurve):
    """``m1 = max |xi eta' - eta xi'|`` and ``m2 = max |xi xi' + eta eta'|``."""
    L = curve.total_length
    return (_refined_max(lambda s: _moment_arm(curve, s), L),
            _refined_max(lambda s: _radial_rate(curve, s), L))


def rotation_condition(c: float, m1: float, m2: float) -> bool:
    """``|c*m1 - c**2*m2| < 1``."""
    if c < 0:
        raise ValueError("c must be non-negative")
    return abs(c * m1 - c * c * m2) < 1


@dataclass(frozen=True)
class RotationLaw:
    """Rotation angle ``phi(t)`` with derivatives and the bound ``c``."""

    phi: Callable
    phi_dot: Callable
    phi_ddot: Callable
    c: float
    period: Optional[float] = None

    @classmethod
    def from_catalog(cls, fn: CatalogFunction, c: Optional[float] = None) -> "RotationLaw":
        d1 = fn.derivative()
        d2 = d1.derivative()
        if c is None:
            c = max(d1.bound(), d2.bound())
        return cls(fn, d1, d2, float(c), fn.period)

    @classmethod
    def constant(cls, angle: float = 0.0) -> "RotationLaw":
        from .forcing import const
        return cls.from_catalog(const(angle), c=0.0)

    def check(self, n=10**4) -> bool:
        """Sampled ``|phi'| <= c`` and ``|phi''| <= c`` (``c`` is a supremum bound)."""
        t = np.linspace(0.0, self.period if self.period else 100.0, n)
        tol = 1e-12 * max(1.0, self.c)
        return bool(np.all(np.abs(self.phi_dot(t)) <= self.c + tol)
                    and np.all(np.abs(self.phi_ddot(t)) <= self.c + tol))
