"""Adaptive Dormand-Prince 5(4) integration with dense output and window exits.

Every experiment in the package runs on :func:`integrate` and
:func:`integrate_with_exit`. The pair is fixed (no method selection) so that
runs are reproducible bit for bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonFinite, OutOfSpan, StepUnderflow

__all__ = [
    "State",
    "VectorField",
    "Trajectory",
    "Window",
    "Outcome",
    "ExitReport",
    "integrate",
    "integrate_with_exit",
    "sample",
    "SAMPLES_PER_STEP",
]

# Dormand-Prince 5(4) tableau with the 4th order continuous extension.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200,
               -22 / 525, 1 / 40])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423,
     69997945 / 29380423],
])

# PI controller constants (Hairer, Norsett & Wanner, DOPRI5).
_SAFETY = 0.9
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA
_FAC_MIN = 0.2
_FAC_MAX = 10.0

SAMPLES_PER_STEP = 64
_THETA = np.arange(1, SAMPLES_PER_STEP + 1) / SAMPLES_PER_STEP
_THETA_POW = np.vstack([_THETA, _THETA**2, _THETA**3, _THETA**4])

EVENT_RTOL = 1e-12
GRAZE_TOL = 1e-12
_MAX_BISECTIONS = 50


@dataclass(frozen=True)
class State:
    """A phase point ``y`` at time ``t``."""

    t: float
    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=float).reshape(-1)
        if y.size < 1:
            raise ValueError("state must have at least one component")
        if not (math.isfinite(self.t) and np.all(np.isfinite(y))):
            raise ValueError(f"non-finite state at t={self.t!r}: {y}")
        y.setflags(write=False)
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.size

    def __getitem__(self, i):
        return self.y[i]


@dataclass(frozen=True)
class VectorField:
    """Right-hand side ``dy/dt = fn(t, y)``.

    ``omega_max`` is the largest angular frequency of the forcing (rad/s);
    accepted steps never exceed ``2*pi / (20*omega_max)``.
    """

    dim: int
    fn: Callable[[float, np.ndarray], np.ndarray]
    omega_max: float = 0.0
    labels: tuple = ()
    name: str = ""

    def __call__(self, t, y):
        return self.fn(t, y)

    @property
    def max_step(self) -> float:
        if self.omega_max <= 0:
            return math.inf
        return 2 * math.pi / (20 * self.omega_max)


class Trajectory:
    """Accepted steps of one integration together with their interpolants.

    On step ``k`` the solution is ``y_k + coef_k @ (theta, theta^2, theta^3,
    theta^4)`` with ``theta = (t - t_k) / (t_{k+1} - t_k)``.
    """

    def __init__(self, t, y, coef):
        self.t = np.asarray(t, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.coef = np.asarray(coef, dtype=float)
        for arr in (self.t, self.y, self.coef):
            arr.setflags(write=False)
        if self.t.size < 1 or self.coef.shape[0] != self.t.size - 1:
            raise ValueError("inconsistent trajectory arrays")

    def __len__(self):
        return self.t.size - 1

    @property
    def dim(self) -> int:
        return self.y.shape[1]

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def final(self) -> State:
        return State(self.t[-1], self.y[-1])

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.t)

    def __call__(self, t):
        """Interpolated phase vector(s) at time(s) ``t``; shape ``(n,)`` or ``(m, n)``."""
        scalar = np.ndim(t) == 0
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.t[0], self.t[-1]
        if np.any(ts < lo) or np.any(ts > hi) or np.any(np.isnan(ts)):
            raise OutOfSpan(f"time outside trajectory span [{lo!r}, {hi!r}]")
        if len(self) == 0:
            out = np.repeat(self.y[:1], ts.size, axis=0)
            return out[0] if scalar else out
        k = np.clip(np.searchsorted(self.t, ts, side="right") - 1, 0, len(self) - 1)
        h = self.t[k + 1] - self.t[k]
        theta = (ts - self.t[k]) / h
        powers = np.stack([theta, theta**2, theta**3, theta**4], axis=-1)
        out = self.y[k] + np.einsum("mnj,mj->mn", self.coef[k], powers)
        # Nodes are returned verbatim.
        at_node = ts == self.t[k]
        out[at_node] = self.y[k[at_node]]
        at_end = ts == hi
        out[at_end] = self.y[-1]
        return out[0] if scalar else out

    def dense(self, per_step: int = SAMPLES_PER_STEP):
        """Times and values at ``per_step`` equispaced points inside every step,
        plus the initial node."""
        if len(self) == 0:
            return self.t.copy(), self.y.copy()
        theta = np.arange(1, per_step + 1) / per_step
        h = np.diff(self.t)
        times = (self.t[:-1, None] + theta[None, :] * h[:, None]).reshape(-1)
        powers = np.stack([theta, theta**2, theta**3, theta**4])
        vals = self.y[:-1, None, :] + np.einsum("knj,jm->kmn", self.coef, powers)
        vals[:, -1, :] = self.y[1:]
        times = times.reshape(len(self), per_step)
        times[:, -1] = self.t[1:]
        return (np.concatenate([self.t[:1], times.reshape(-1)]),
                np.concatenate([self.y[:1], vals.reshape(-1, self.dim)]))


def sample(traj: Trajectory, t: float) -> State:
    return State(t, traj(t))


def _as_state(y0, t0=None) -> State:
    if isinstance(y0, State):
        return y0
    return State(0.0 if t0 is None else t0, y0)


def _rk_step(fn, t, y, f0, h):
    n = y.size
    K = np.empty((7, n))
    K[0] = f0
    for s in range(1, 6):
        K[s] = fn(t + _C[s] * h, y + h * (_A[s, :s] @ K[:s]))
    y_new = y + h * (_B @ K[:6])
    K[6] = fn(t + h, y_new)
    err = h * (_E @ K)
    return y_new, K, err


def _initial_step(fn, t, y, f0, tol, max_step):
    scale = tol * (np.abs(y) + 1.0)
    d0 = np.max(np.abs(y) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    f1 = fn(t + h0, y + h0 * f0)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, max_step)


def _check_tol(tol):
    if not 1e-13 <= tol <= 1e-3:
        raise ValueError(f"tol must lie in [1e-13, 1e-3], got {tol!r}")


def _steps(field: VectorField, t0: float, y0: np.ndarray, t_end: float, tol: float):
    """Yield accepted steps ``(t, y, h, coef, t_new, y_new)`` up to ``t_end``."""
    fn = field.fn
    max_step = field.max_step
    t, y = t0, np.array(y0, dtype=float)
    f0 = np.asarray(fn(t, y), dtype=float)
    if not np.all(np.isfinite(f0)):
        raise NonFinite(t)
    h = _initial_step(fn, t, y, f0, tol, max_step)
    err_old = 1e-4
    rejected = False
    while t < t_end:
        remaining = t_end - t
        if h >= remaining * (1 - 1e-12):
            h = remaining
        elif h < 1e-14 * max(abs(t), 1.0):
            raise StepUnderflow(t, h)
        y_new, K, err = _rk_step(fn, t, y, f0, h)
        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(K))):
            h *= 0.25
            rejected = True
            if h < 1e-14 * max(abs(t), 1.0):
                raise NonFinite(t)
            continue
        scale = tol * (np.maximum(np.abs(y), np.abs(y_new)) + 1.0)
        err_norm = float(np.max(np.abs(err) / scale))
        fac11 = err_norm**_EXPO if err_norm > 0 else 0.0
        if err_norm <= 1.0:
            fac = fac11 / err_old**_BETA
            fac = min(1 / _FAC_MIN, max(1 / _FAC_MAX, fac / _SAFETY))
            h_new = h / fac
            if rejected:
                h_new = min(h_new, h)
            err_old = max(err_norm, 1e-4)
            rejected = False
            coef = h * (K.T @ _P)
            t_new = t_end if h == remaining else t + h
            yield t, y, t_new - t, coef, t_new, y_new
            t, y, f0 = t_new, y_new, K[6]
            h = min(h_new, max_step)
        else:
            h = h / min(1 / _FAC_MIN, fac11 / _SAFETY)
            rejected = True


def integrate(field: VectorField, y0, t1: float, tol: float = 1e-10) -> Trajectory:
    """Integrate ``field`` from ``y0`` (a :class:`State`) to time ``t1``.

    Raises
    ------
    NonFinite
        The state or its derivative stopped being finite.
    StepUnderflow
        The controller asked for a step below ``1e-14*|t|``.
    """
    y0 = _as_state(y0)
    _check_tol(tol)
    if not t1 > y0.t:
        raise ValueError(f"t1={t1!r} must exceed the initial time {y0.t!r}")
    if y0.y.size != field.dim:
        raise ValueError(f"state has {y0.y.size} components, field expects {field.dim}")
    ts, ys, coefs = [y0.t], [y0.y], []
    for _, _, _, coef, t_new, y_new in _steps(field, y0.t, y0.y, t1, tol):
        ts.append(t_new)
        ys.append(y_new)
        coefs.append(coef)
    return Trajectory(ts, ys, np.array(coefs).reshape(len(coefs), field.dim, 4))


def _constant(value):
    value = float(value)

    def bound(t):
        return np.full(np.shape(t), value)

    return bound


@dataclass(frozen=True)
class Window:
    """Open window ``lower(t) < y[coord] < upper(t)``.

    ``lower`` and ``upper`` must accept numpy arrays of times. ``velocity_coord``
    names the component holding the time derivative of ``y[coord]`` for
    second-order systems; it is only used by transversality diagnostics.
    """

    coord: int
    lower: Callable
    upper: Callable
    velocity_coord: Optional[int] = None

    @classmethod
    def constant(cls, coord, lower, upper, velocity_coord=None):
        if not lower < upper:
            raise ValueError("window needs lower < upper")
        return cls(coord, _constant(lower), _constant(upper), velocity_coord)

    def margins(self, t, q):
        t = np.asarray(t, dtype=float)
        return q - self.lower(t), self.upper(t) - q

    def contains(self, t, q) -> bool:
        lo, hi = self.margins(t, q)
        return bool(np.all(lo > 0) and np.all(hi > 0))


class Outcome(str, enum.Enum):
    EXIT_LOW = "ExitLow"
    EXIT_HIGH = "ExitHigh"
    SURVIVED = "Survived"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ExitReport:
    outcome: Outcome
    t_exit: Optional[float]
    state_exit: Optional[State]
    trajectory: Trajectory
    near_grazes: int = 0

    @property
    def exited(self) -> bool:
        return self.outcome is not Outcome.SURVIVED

    @property
    def survival_time(self) -> float:
        """Time of the exit, or the end of the horizon when none occurred."""
        return self.t_exit if self.exited else self.trajectory.t1


def _truncate(coef, r):
    scale = np.array([r, r**2, r**3, r**4])
    return coef * scale


def integrate_with_exit(field: VectorField, y0, t_max: float, window: Window,
                        tol: float = 1e-10) -> ExitReport:
    """Integrate until ``y[window.coord]`` leaves the open window or ``t_max``.

    Each accepted step is scanned at 64 dense samples; the first crossing is
    bisected on the interpolant down to ``1e-12*max(1, |t|)``. Samples that
    come within 1e-12 of a boundary without crossing it count as near grazes
    and are not exits.
    """
    y0 = _as_state(y0)
    _check_tol(tol)
    if not t_max > y0.t:
        raise ValueError(f"t_max={t_max!r} must exceed the initial time {y0.t!r}")
    c = window.coord
    lo0, hi0 = window.margins(np.array([y0.t]), y0.y[c])
    if not (lo0[0] > 0 and hi0[0] > 0):
        raise ValueError("initial state must lie strictly inside the window")

    ts, ys, coefs = [y0.t], [y0.y], []
    grazes = 0
    for t, y, h, coef, t_new, y_new in _steps(field, y0.t, y0.y, t_max, tol):
        times = t + _THETA * h
        times[-1] = t_new
        q = y[c] + coef[c] @ _THETA_POW
        q[-1] = y_new[c]
        g_lo, g_hi = window.margins(times, q)
        bad_lo = np.flatnonzero(g_lo < 0)
        bad_hi = np.flatnonzero(g_hi < 0)
        if bad_lo.size == 0 and bad_hi.size == 0:
            if min(g_lo.min(), g_hi.min()) <= GRAZE_TOL:
                grazes += 1
            ts.append(t_new)
            ys.append(y_new)
            coefs.append(coef)
            continue

        j_lo = bad_lo[0] if bad_lo.size else SAMPLES_PER_STEP
        j_hi = bad_hi[0] if bad_hi.size else SAMPLES_PER_STEP
        if j_lo < j_hi or (j_lo == j_hi and g_lo[j_lo] <= g_hi[j_hi]):
            outcome, j, bound, sign = Outcome.EXIT_LOW, j_lo, window.lower, 1.0
        else:
            outcome, j, bound, sign = Outcome.EXIT_HIGH, j_hi, window.upper, -1.0

        def gap(theta):
            tt = t + theta * h
            qq = y[c] + coef[c] @ np.array([theta, theta**2, theta**3, theta**4])
            return sign * (qq - float(bound(np.array([tt]))[0]))

        a = _THETA[j - 1] if j > 0 else 0.0
        b = _THETA[j]
        width = EVENT_RTOL * max(1.0, abs(t))
        for _ in range(_MAX_BISECTIONS):
            if (b - a) * h <= width:
                break
            m = 0.5 * (a + b)
            if gap(m) < 0:
                b = m
            else:
                a = m
        t_exit = t + b * h if b < 1.0 else t_new
        r = (t_exit - t) / h
        cut = _truncate(coef, r)
        y_exit = y + cut @ np.ones(4)
        if b >= 1.0:
            y_exit = y_new
        ts.append(t_exit)
        ys.append(y_exit)
        coefs.append(cut)
        traj = Trajectory(ts, ys, np.array(coefs))
        return ExitReport(outcome, t_exit, State(t_exit, y_exit), traj, grazes)

    traj = Trajectory(ts, ys, np.array(coefs).reshape(len(coefs), field.dim, 4))
    return ExitReport(Outcome.SURVIVED, None, None, traj, grazes)
