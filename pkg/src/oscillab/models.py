"""Vector fields of the three mechanical model families.

* pendulum with a moving pivot in an oscillating gravity field,
  ``x'' = f(t) sin x - (1 + sigma(x, x') g(lam t)) cos x``;
* the planar strip system ``x' = v(x, y)``, ``y' = w(x, y) + sigma(y) u(lam t)``;
* a point sliding on a rotating convex curve.

Each factory returns an :class:`~oscillab.ode.VectorField`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .curves import ConvexCurve, RotationLaw, boundary_curves
from .forcing import Forcing, OscillatoryForcing
from .mollifier import Mollifier
from .ode import VectorField, Window

__all__ = [
    "pendulum_field",
    "strip_field",
    "rotating_curve_field",
    "lagrangian_residual",
    "kinetic_energy",
    "potential_energy",
    "StripSystem",
    "ForcedSystem",
    "pendulum_system",
    "strip_system",
    "rotating_curve_system",
    "pendulum_window",
    "strip_window",
    "curve_window",
]


_HALF_PI = 0.5 * math.pi


def _as_forcing(f) -> Optional[Forcing]:
    if f is None or isinstance(f, Forcing):
        return f
    return Forcing.from_catalog(f)


def _omega(*parts):
    return max([p for p in parts if p] or [0.0])


def pendulum_field(f=None, g: Optional[OscillatoryForcing] = None,
                   sigma: Optional[Mollifier] = None) -> VectorField:
    """``x'' = f(t) sin x - (1 + sigma(x, x') g(lam t)) cos x`` on the state ``(x, x')``.

    ``f`` may be a :class:`Forcing` or a catalog function; missing ``f`` or ``g``
    are zero and a missing ``sigma`` is identically one.
    """
    f = _as_forcing(f)
    f_fn = None if f is None or f.is_zero else f.f
    g_fn = None if g is None or g.is_zero else g.g
    lam = g.lam if g is not None else 1.0

    def rhs(t, y):
        x, v = float(y[0]), float(y[1])
        push = f_fn(t) if f_fn is not None else 0.0
        weight = 1.0
        if g_fn is not None:
            gate = sigma(t, y) if sigma is not None else 1.0
            if gate != 0.0:
                weight += gate * g_fn(lam * t)
        # cos x as sin(pi/2 - x): exactly zero at the float nearest pi/2, so the
        # inverted rest point is a fixed point of the discrete flow
        return np.array([v, push * math.sin(x) - weight * math.sin(_HALF_PI - x)])

    omega = _omega(g.omega_max if g is not None else 0.0, f.omega if f is not None else 0.0)
    return VectorField(2, rhs, omega, ("q", "v"), "pendulum")


@dataclass(frozen=True)
class StripSystem:
    """``x' = v(x, y)``, ``y' = w(x, y) + u(lam t)`` with ``w(x, 1) > a``, ``w(x, -1) < -a``."""

    v: Callable
    w: Callable
    u: Optional[OscillatoryForcing] = None
    margin: float = 0.0
    x_range: tuple = (-10.0, 10.0)

    def check_margin(self, n=10**4) -> bool:
        x = np.linspace(*self.x_range, n)
        top = np.array([self.w(xi, 1.0) for xi in x])
        bottom = np.array([self.w(xi, -1.0) for xi in x])
        return bool(np.all(top > self.margin) and np.all(bottom < -self.margin))


def strip_field(sys: StripSystem, sigma: Optional[Mollifier] = None) -> VectorField:
    """``x' = v(x, y)``, ``y' = w(x, y) + sigma(y) u(lam t)``."""
    v, w, u = sys.v, sys.w, sys.u
    u_fn = None if u is None or u.is_zero else u.g
    lam = u.lam if u is not None else 1.0

    def rhs(t, y):
        x, yy = float(y[0]), float(y[1])
        dy = w(x, yy)
        if u_fn is not None:
            gate = sigma(t, y) if sigma is not None else 1.0
            if gate != 0.0:
                dy += gate * u_fn(lam * t)
        return np.array([v(x, yy), dy])

    return VectorField(2, rhs, u.omega_max if u is not None else 0.0, ("x", "y"), "strip")


def rotating_curve_field(curve: ConvexCurve, law: RotationLaw,
                         g: Optional[OscillatoryForcing] = None,
                         sigma: Optional[Mollifier] = None) -> VectorField:
    """Point sliding without friction on ``curve`` rotated by ``phi(t)``, state ``(s, s')``.

    ``s'' = -phi'' (xi eta' - eta xi') + phi'^2 (xi xi' + eta eta')
    + (1 + sigma g(lam t)) (xi' sin phi + eta' cos phi)``,
    which is the Euler-Lagrange equation of the kinetic energy
    :func:`kinetic_energy` and potential :func:`potential_energy`.
    Curve terms are evaluated at ``s`` modulo the total length.
    """
    L = curve.total_length
    g_fn = None if g is None or g.is_zero else g.g
    lam = g.lam if g is not None else 1.0
    phi, phi_dot, phi_ddot = law.phi, law.phi_dot, law.phi_ddot

    def rhs(t, y):
        s, sd = float(y[0]), float(y[1])
        x, e, xp, ep = curve.frame(s % L)
        ang = phi(t)
        slope = xp * math.sin(ang) + ep * math.cos(ang)
        weight = 1.0
        if g_fn is not None:
            gate = sigma(t, y) if sigma is not None else 1.0
            if gate != 0.0:
                weight += gate * g_fn(lam * t)
        w1 = phi_dot(t)
        acc = -phi_ddot(t) * (x * ep - e * xp) + w1 * w1 * (x * xp + e * ep) + weight * slope
        return np.array([sd, float(acc)])

    omega = _omega(g.omega_max if g is not None else 0.0,
                   2 * math.pi / law.period if law.period else 0.0)
    return VectorField(2, rhs, omega, ("q", "v"), "rotating_curve")


def kinetic_energy(curve, law, s, s_dot, t):
    """``(s'^2 + phi'^2 (xi^2 + eta^2) + 2 phi' s' (xi eta' - eta xi')) / 2`` (unit mass)."""
    x, e, xp, ep = curve.frame(s)
    w = law.phi_dot(t)
    return 0.5 * (s_dot**2 + w**2 * (x**2 + e**2) + 2 * w * s_dot * (x * ep - e * xp))


def potential_energy(curve, law, s, t):
    """``-(xi sin phi + eta cos phi)`` (unit mass and gravity)."""
    x, e, _, _ = curve.frame(s)
    ang = law.phi(t)
    return -(x * math.sin(ang) + e * math.cos(ang))


def _lagrangian(curve, law, s, s_dot, t):
    return float(kinetic_energy(curve, law, s, s_dot, t) - potential_energy(curve, law, s, t))


def _richardson(d, h):
    return (4.0 * d(h / 2) - d(h)) / 3.0


def lagrangian_residual(curve: ConvexCurve, law: RotationLaw, s: float, s_dot: float,
                        t: float, step: float = 1e-5) -> float:
    """Euler-Lagrange expression of ``T - V`` minus the model's equation of motion.

    ``d/dt dL/ds' - dL/ds`` is formed by central differences (outer step
    ``step``, one Richardson extrapolation) along the local motion with the
    acceleration supplied by :func:`rotating_curve_field`; the model's own
    left-hand side is zero there, so the result measures their disagreement.
    """
    acc = float(rotating_curve_field(curve, law)(t, np.array([s, s_dot]))[1])
    inner = 1e-3  # L is quadratic in s', so this difference is exact up to rounding

    def momentum(tau):
        dt = tau - t
        q = s + s_dot * dt + 0.5 * acc * dt * dt
        qd = s_dot + acc * dt
        return (_lagrangian(curve, law, q, qd + inner, tau)
                - _lagrangian(curve, law, q, qd - inner, tau)) / (2 * inner)

    def d_momentum(h):
        return (momentum(t + h) - momentum(t - h)) / (2 * h)

    def d_position(h):
        return (_lagrangian(curve, law, s + h, s_dot, t)
                - _lagrangian(curve, law, s - h, s_dot, t)) / (2 * h)

    euler_lagrange = _richardson(d_momentum, step) - _richardson(d_position, step)
    x, e, xp, ep = curve.frame(s)
    ang = law.phi(t)
    model_lhs = (acc + law.phi_ddot(t) * (x * ep - e * xp)
                 - law.phi_dot(t) ** 2 * (x * xp + e * ep)
                 - (xp * math.sin(ang) + ep * math.cos(ang)))
    return float(euler_lagrange - model_lhs)


# Windows ------------------------------------------------------------------

def pendulum_window() -> Window:
    """``0 < x < pi``."""
    return Window.constant(0, 0.0, math.pi, velocity_coord=1)


def strip_window() -> Window:
    """``-1 < y < 1``."""
    return Window.constant(1, -1.0, 1.0)


def curve_window(curve: ConvexCurve, law: RotationLaw) -> Window:
    """``s1(t) < s < s2(t)`` on the unwrapped arclength."""
    s1, s2 = boundary_curves(curve, law)
    return Window(0, s1, s2, velocity_coord=1)


# Forced systems (model + fast forcing slot), used by averaging -------------------

@dataclass(frozen=True)
class ForcedSystem:
    """A model together with its fast forcing slot.

    ``build(g)`` returns the vector field with the oscillatory forcing ``g``
    installed. ``box`` is the study region used for diagnostics, one
    ``(lo, hi)`` pair per state component.
    """

    name: str
    build: Callable[[Optional[OscillatoryForcing]], VectorField]
    forcing: Optional[OscillatoryForcing]
    box: tuple
    window: Optional[Window] = None
    extras: dict = field(default_factory=dict, compare=False)

    def field(self) -> VectorField:
        return self.build(self.forcing)

    def unforced(self) -> VectorField:
        return self.build(None)

    def with_lambda(self, lam: float) -> "ForcedSystem":
        forcing = None if self.forcing is None else self.forcing.with_lambda(lam)
        return ForcedSystem(self.name, self.build, forcing, self.box, self.window, self.extras)


def pendulum_system(f=None, g: Optional[OscillatoryForcing] = None,
                    sigma: Optional[Mollifier] = None,
                    box=((0.0, math.pi), (-2.0, 2.0))) -> ForcedSystem:
    f = _as_forcing(f)
    return ForcedSystem("pendulum", lambda gg: pendulum_field(f, gg, sigma), g, tuple(box),
                        pendulum_window(), {"f": f, "sigma": sigma})


def strip_system(sys: StripSystem, sigma: Optional[Mollifier] = None,
                 box=((-1.0, 1.0), (-1.0, 1.0))) -> ForcedSystem:
    def build(u):
        return strip_field(StripSystem(sys.v, sys.w, u, sys.margin, sys.x_range), sigma)

    return ForcedSystem("strip", build, sys.u, tuple(box), strip_window(),
                        {"system": sys, "sigma": sigma})


def rotating_curve_system(curve: ConvexCurve, law: RotationLaw,
                          g: Optional[OscillatoryForcing] = None,
                          sigma: Optional[Mollifier] = None, box=None) -> ForcedSystem:
    if box is None:
        s1, s2 = boundary_curves(curve, law)
        box = ((float(s1(0.0)), float(s2(0.0))), (-2.0, 2.0))
    return ForcedSystem("rotating_curve", lambda gg: rotating_curve_field(curve, law, gg, sigma),
                        g, tuple(box), curve_window(curve, law),
                        {"curve": curve, "law": law, "sigma": sigma})
