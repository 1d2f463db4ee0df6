"""Periodic solutions: Poincare (time-T) map shooting and an upper/lower
solution verifier for ``u'' = f(t, u)`` with periodic boundary conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._periods import common_period as _common_period
from .errors import NoConvergence, NonFinite, OscillabError, SingularJacobian, StepUnderflow
from .ode import State, Trajectory, VectorField, Window, integrate

__all__ = [
    "PeriodicOrbit",
    "UpperLowerPair",
    "UpperLowerReport",
    "time_T_map",
    "common_period",
    "forced_period",
    "monodromy",
    "find_periodic",
    "find_periodic_with_fallback",
    "survivor_seed",
    "orbit_window_check",
    "verify_upper_lower",
    "orbit_between",
]

MAP_TOL = 1e-11
ORBIT_SAMPLES = 1024


def time_T_map(field: VectorField, z, T: float, t0: float = 0.0, tol: float = MAP_TOL) -> np.ndarray:
    """Phase point reached from ``z`` at ``t0`` after time ``T``."""
    return integrate(field, State(t0, z), t0 + T, tol).final.y.copy()


def _period_of(item):
    if item is None:
        return None
    if isinstance(item, (int, float)):
        return float(item)
    fast = getattr(item, "fast_period", None)
    if fast is not None and getattr(item, "resolve", True):
        return fast
    return getattr(item, "period", None)


def common_period(forcings, base: Optional[float] = None) -> float:
    """Least common period of forcings (objects with a period, or plain numbers).

    Oscillatory forcings contribute the period of ``t -> g(lam t)``. Raises
    :class:`~oscillab.errors.IncommensuratePeriods` when two periods have no
    rational ratio with denominator up to 1e6, or, with ``base`` given, when
    some period does not divide ``base``.
    """
    periods = [p for p in (_period_of(f) for f in forcings) if p is not None]
    return _common_period(periods, base=base)


def forced_period(f=None, g=None, law=None) -> float:
    """Period ``T`` for which ``f``, ``phi`` and ``g`` are ``T``-periodic and so is ``g(lam t)``.

    ``g(lam t)`` shares ``T`` only when ``lam * T / T_g`` is an integer, so a
    non-integer ``lam`` raises ``IncommensuratePeriods`` for this configuration.
    """
    slow = [p for p in (getattr(f, "period", None),
                        g.period if g is not None and g.resolve else None,
                        getattr(law, "period", None)) if p]
    if not slow:
        raise ValueError("no periodic forcing to take the period from")
    T = _common_period(slow)
    if g is not None and g.resolve:
        _common_period([g.fast_period], base=T)
    return T


def monodromy(field: VectorField, z, T: float, t0: float = 0.0, tol: float = 1e-12,
              rel_step: float = 1e-7) -> np.ndarray:
    """Jacobian of the time-``T`` map at ``z`` by central differences.

    Column ``j`` uses perturbations ``+-h_j e_j`` with ``h_j = rel_step (1 + |z_j|)``
    and ``h_j / 2``, combined by one Richardson extrapolation. The scaled
    deviations ``(y_pert - y) / h`` are integrated together with ``y`` as one
    system, so a single adaptive step sequence resolves all of them.
    """
    z = np.asarray(z, dtype=float)
    n = z.size
    hs, dirs = [], []
    for j in range(n):
        h = rel_step * (1.0 + abs(z[j]))
        for step in (h, h / 2):
            for sign in (1.0, -1.0):
                e = np.zeros(n)
                e[j] = sign
                hs.append(step)
                dirs.append(e)
    hs = np.array(hs)
    k = hs.size
    fn = field.fn

    def rhs(t, Y):
        y = Y[:n]
        f0 = np.asarray(fn(t, y), dtype=float)
        D = Y[n:].reshape(k, n)
        out = [f0]
        for h, d in zip(hs, D):
            out.append((np.asarray(fn(t, y + h * d), dtype=float) - f0) / h)
        return np.concatenate(out)

    aug = VectorField(n * (k + 1), rhs, field.omega_max)
    Y = integrate(aug, State(t0, np.concatenate([z] + dirs)), t0 + T, tol).final.y
    D = Y[n:].reshape(n, 4, n)
    coarse = (D[:, 0] - D[:, 1]) / 2
    fine = (D[:, 2] - D[:, 3]) / 2
    return ((4 * fine - coarse) / 3).T


@dataclass
class PeriodicOrbit:
    ic: State
    period: float
    residual: float
    multipliers: np.ndarray
    monodromy: np.ndarray
    newton_iters: int
    trajectory: Trajectory = field(repr=False)
    window_ok: Optional[bool] = None

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.monodromy))

    def samples(self, n: int = ORBIT_SAMPLES):
        """``n`` equispaced samples over one period, as ``(t, y)`` arrays."""
        ts = np.linspace(self.ic.t, self.ic.t + self.period, n)
        return ts, self.trajectory(ts)

    def to_dict(self):
        mult = np.asarray(self.multipliers)
        return {
            "ic": {"t": self.ic.t, "y": [float(v) for v in self.ic.y]},
            "period": self.period,
            "residual": self.residual,
            "multipliers": [{"re": float(m.real), "im": float(m.imag)} for m in mult],
            "determinant": self.determinant,
            "newton_iters": self.newton_iters,
            "window_ok": self.window_ok,
        }


def _shoot(field, z, T, t0, tol):
    traj = integrate(field, State(t0, z), t0 + T, tol)
    r = traj.final.y - z
    return traj, r, float(np.max(np.abs(r)))


def find_periodic(field: VectorField, T: float, seed, tol: float = 1e-10,
                  window: Optional[Window] = None, t0: float = 0.0, max_iter: int = 50,
                  map_tol: float = MAP_TOL) -> PeriodicOrbit:
    """Damped Newton on ``P(z) - z`` for the time-``T`` map ``P``.

    The Jacobian is the finite-difference monodromy (:func:`monodromy`) minus
    the identity; a step is halved up to ten times while the residual fails to
    decrease. Floquet multipliers come from the same monodromy at the root.

    Raises
    ------
    NoConvergence
        No residual below ``tol`` within ``max_iter`` iterations, or no
        decreasing damped step.
    SingularJacobian
        ``M - I`` has condition number above 1e12.
    """
    if isinstance(seed, State):
        t0, z = seed.t, seed.y.copy()
    else:
        z = np.array(seed, dtype=float)
    traj, r, res = _shoot(field, z, T, t0, map_tol)
    iters = 0
    while res >= tol:
        if iters >= max_iter:
            raise NoConvergence(f"Newton stalled at residual {res!r} after {iters} iterations")
        J = monodromy(field, z, T, t0) - np.eye(z.size)
        if np.linalg.cond(J) > 1e12:
            raise SingularJacobian("time-T map Jacobian minus identity is singular")
        dz = np.linalg.solve(J, -r)
        step = 1.0
        for _ in range(11):
            cand = z + step * dz
            try:
                c_traj, c_r, c_res = _shoot(field, cand, T, t0, map_tol)
            except (NonFinite, StepUnderflow):
                c_res = math.inf
            if c_res < res:
                break
            step *= 0.5
        else:
            raise NoConvergence(f"no damped Newton step reduces the residual {res!r}")
        z, traj, r, res = cand, c_traj, c_r, c_res
        iters += 1
    M = monodromy(field, z, T, t0)
    orbit = PeriodicOrbit(State(t0, z), float(T), res, np.linalg.eigvals(M), M, iters, traj)
    if window is not None:
        orbit.window_ok = orbit_window_check(orbit, window)
    return orbit


def _fallback_seeds(window: Window, seed: State, n=9):
    lo = float(window.lower(np.array([seed.t]))[0])
    hi = float(window.upper(np.array([seed.t]))[0])
    seeds = []
    for q in np.linspace(lo, hi, n + 2)[1:-1]:
        y = seed.y.copy()
        y[window.coord] = q
        seeds.append(State(seed.t, y))
    return seeds


def survivor_seed(field: VectorField, window: Window, segment, T: float, periods: int = 3,
                  tol: float = 1e-10) -> State:
    """Initial state from topological shooting across ``segment`` over ``periods * T``.

    The survivor lies near the stable manifold of the orbit that stays in the
    window, which puts damped Newton inside its basin.
    """
    from .wazewski import bisect_survivor

    return bisect_survivor(field, segment, window, periods * T, 1e-10, tol).ic_star


def find_periodic_with_fallback(field: VectorField, T: float, seed: Optional[State],
                                window: Window, tol: float = 1e-10, require_inside: bool = True,
                                segment=None) -> PeriodicOrbit:
    """:func:`find_periodic` over a sequence of seeds until one gives an orbit.

    Seeds are tried in order: ``seed`` (when given), the :func:`survivor_seed`
    of ``segment`` (when given), then 9 seeds spread across the window at
    ``t = 0``. With ``require_inside`` an orbit that leaves the window counts
    as a failure and the next seed is tried.
    """
    def seeds():
        if seed is not None:
            yield seed
        if segment is not None:
            try:
                yield survivor_seed(field, window, segment, T)
            except (OscillabError, ValueError):
                pass
        yield from _fallback_seeds(window, seed if seed is not None else State(0.0, np.zeros(field.dim)))

    last = NoConvergence("no seed available")
    for s in seeds():
        try:
            orbit = find_periodic(field, T, s, tol, window)
        except (NoConvergence, SingularJacobian, NonFinite, StepUnderflow) as exc:
            last = exc
            continue
        if orbit.window_ok or not require_inside:
            return orbit
        last = NoConvergence("converged orbit leaves the window")
    raise last if isinstance(last, NoConvergence) else NoConvergence(str(last))


def orbit_window_check(orbit: PeriodicOrbit, window: Window, samples: int = ORBIT_SAMPLES) -> bool:
    """Containment at ``samples`` points per period and at the per-step dense output."""
    ts, ys = orbit.samples(samples)
    td, yd = orbit.trajectory.dense()
    t_all = np.concatenate([ts, td])
    q_all = np.concatenate([ys[:, window.coord], yd[:, window.coord]])
    return window.contains(t_all, q_all)


# Upper and lower solutions ---------------------------------------------------------

def _second_derivative(fn, t, h=1e-4):
    return (fn(t + h) - 2.0 * fn(t) + fn(t - h)) / (h * h)


def _vectorize(fn):
    def wrapped(t):
        out = np.asarray(fn(t), dtype=float)
        return np.broadcast_to(out, np.shape(t)) if out.ndim == 0 else out
    return wrapped


@dataclass(frozen=True)
class UpperLowerPair:
    """Lower solution ``alpha`` and upper solution ``beta``, both ``T``-periodic."""

    alpha: Callable
    beta: Callable
    T: float
    grid_n: int = 1000
    alpha_dd: Optional[Callable] = None
    beta_dd: Optional[Callable] = None

    @classmethod
    def constant(cls, a: float, b: float, T: float, grid_n: int = 1000) -> "UpperLowerPair":
        zero = lambda t: np.zeros(np.shape(t))  # noqa: E731
        return cls(lambda t: np.full(np.shape(t), float(a)), lambda t: np.full(np.shape(t), float(b)),
                   T, grid_n, zero, zero)


@dataclass
class UpperLowerReport:
    order_margin: float
    lower_margin: float
    upper_margin: float
    slack: float

    @property
    def ordered(self) -> bool:
        return self.order_margin >= -self.slack

    @property
    def lower_ok(self) -> bool:
        return self.lower_margin >= -self.slack

    @property
    def upper_ok(self) -> bool:
        return self.upper_margin >= -self.slack

    @property
    def passed(self) -> bool:
        return self.ordered and self.lower_ok and self.upper_ok

    def to_dict(self):
        return {"order_margin": self.order_margin, "lower_margin": self.lower_margin,
                "upper_margin": self.upper_margin, "passed": self.passed}


def verify_upper_lower(f: Callable, pair: UpperLowerPair, slack: float = 1e-9) -> UpperLowerReport:
    """Check ``alpha <= beta``, ``alpha'' >= f(t, alpha)`` and ``beta'' <= f(t, beta)``
    on ``grid_n`` uniform points of ``[0, T]``; margins are worst cases (>= 0 passes)."""
    t = np.linspace(0.0, pair.T, pair.grid_n)
    alpha, beta = _vectorize(pair.alpha), _vectorize(pair.beta)
    a, b = alpha(t), beta(t)
    add = pair.alpha_dd(t) if pair.alpha_dd else _second_derivative(alpha, t)
    bdd = pair.beta_dd(t) if pair.beta_dd else _second_derivative(beta, t)
    fa = np.array([f(ti, ai) for ti, ai in zip(t, a)])
    fb = np.array([f(ti, bi) for ti, bi in zip(t, b)])
    return UpperLowerReport(float(np.min(b - a)), float(np.min(add - fa)),
                            float(np.min(fb - bdd)), slack)


def orbit_between(orbit: PeriodicOrbit, pair: UpperLowerPair, coord: int = 0,
                  samples: int = ORBIT_SAMPLES) -> bool:
    """``alpha(t) <= x(t) <= beta(t)`` on ``samples`` points of one period."""
    ts, ys = orbit.samples(samples)
    tt = ts - orbit.ic.t
    q = ys[:, coord]
    return bool(np.all(_vectorize(pair.alpha)(tt) <= q) and np.all(q <= _vectorize(pair.beta)(tt)))
